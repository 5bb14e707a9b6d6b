# src/multiview_cvae/common/telemetry.py
from __future__ import annotations

import logging
import os
from contextlib import contextmanager
from typing import Any

from opentelemetry import metrics, trace
from opentelemetry.metrics import Meter
from opentelemetry.sdk.metrics import MeterProvider
from opentelemetry.sdk.metrics.export import (
    ConsoleMetricExporter,
    PeriodicExportingMetricReader,
)
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor, ConsoleSpanExporter
from opentelemetry.trace import Tracer

# Azure Monitor exporters are optional; they read APPLICATIONINSIGHTS_CONNECTION_STRING.
try:
    from azure.monitor.opentelemetry.exporter import (
        AzureMonitorMetricExporter,
        AzureMonitorTraceExporter,
    )
    _HAS_AZURE_EXPORTERS = True
except Exception:
    _HAS_AZURE_EXPORTERS = False


class TelemetryService:
    """
    Abstraction over Python logging + OpenTelemetry.

    - Always provides Python logger methods (info/debug/warning/error/exception).
    - Provides tracing via OpenTelemetry spans around training epochs and evaluation stages.
    - Provides a counter of optimizer steps per variant, a histogram of training losses,
      and a histogram of evaluation metrics.

    Azure Monitor export is enabled if 'APPLICATIONINSIGHTS_CONNECTION_STRING' is set
    and azure-monitor-opentelemetry-exporter is installed. Console exporters are only
    attached when explicitly enabled, since training runs emit a span per epoch.
    """

    def __init__(
        self,
        service_name: str = "multiview-cvae",
        service_version: str = "0.1.0",
        logger: logging.Logger | None = None,
        enable_console_exporters: bool = False,
        metric_export_interval_millis: int = 15000,
    ) -> None:
        self._logger = logger or logging.getLogger(service_name)
        self._logger.propagate = True

        connection_string = os.getenv("APPLICATIONINSIGHTS_CONNECTION_STRING")
        resource = Resource.create({"service.name": service_name, "service.version": service_version})

        is_testing = (
            os.getenv("PYTEST_CURRENT_TEST") is not None or
            "pytest" in service_name.lower()
        )
        use_azure = _HAS_AZURE_EXPORTERS and bool(connection_string) and not is_testing
        use_console = enable_console_exporters and not is_testing

        # ---------- Tracing ----------
        tracer_provider = TracerProvider(resource=resource)
        if use_azure:
            tracer_exporter = AzureMonitorTraceExporter(connection_string=connection_string)
            tracer_provider.add_span_processor(BatchSpanProcessor(tracer_exporter))
        elif use_console:
            tracer_provider.add_span_processor(BatchSpanProcessor(ConsoleSpanExporter()))
        self._tracer_provider = tracer_provider
        self._tracer: Tracer = tracer_provider.get_tracer(__name__, service_version)

        # ---------- Metrics ----------
        metric_readers = []
        if use_azure:
            metric_exporter = AzureMonitorMetricExporter(connection_string=connection_string)
            metric_readers.append(
                PeriodicExportingMetricReader(
                    exporter=metric_exporter,
                    export_interval_millis=metric_export_interval_millis,
                )
            )
        elif use_console:
            metric_readers.append(
                PeriodicExportingMetricReader(
                    exporter=ConsoleMetricExporter(),
                    export_interval_millis=metric_export_interval_millis,
                )
            )

        self._meter_provider = MeterProvider(resource=resource, metric_readers=metric_readers)
        self._meter: Meter = self._meter_provider.get_meter(__name__, service_version)

        self._step_counter = self._meter.create_counter(
            name="training_steps_total",
            description="Optimizer steps taken per training variant",
            unit="1",
        )
        self._loss_histogram = self._meter.create_histogram(
            name="training_loss",
            description="Total loss per optimizer step",
            unit="1",
        )
        self._metric_histogram = self._meter.create_histogram(
            name="evaluation_metric",
            description="Evaluation metric values by metric name",
            unit="1",
        )

    # ------------- Python logger facade -------------

    def debug(self, msg: str, *args, **kwargs) -> None:
        self._logger.debug(msg, *args, **kwargs)

    def info(self, msg: str, *args, **kwargs) -> None:
        self._logger.info(msg, *args, **kwargs)

    def warning(self, msg: str, *args, **kwargs) -> None:
        self._logger.warning(msg, *args, **kwargs)

    def error(self, msg: str, *args, **kwargs) -> None:
        self._logger.error(msg, *args, **kwargs)

    def exception(self, msg: str, *args, **kwargs) -> None:
        self._logger.exception(msg, *args, **kwargs)

    # ------------- Tracing helpers -------------

    @contextmanager
    def start_span(self, name: str, attributes: dict[str, Any] | None = None):
        """Context manager to create a span around operations."""
        with self._tracer.start_as_current_span(name) as span:
            if attributes:
                for k, v in attributes.items():
                    span.set_attribute(k, v)
            yield span

    # ------------- Metrics -------------

    def record_training_step(self, variant: str, total_loss: float) -> None:
        """Counts one optimizer step and records its total loss."""
        attributes = {"variant": variant}
        self._step_counter.add(1, attributes)
        self._loss_histogram.record(total_loss, attributes)

    def record_metric(self, name: str, value: float, attributes: dict[str, Any] | None = None) -> None:
        """Records one evaluation metric value, e.g. correspondence_l2 for a checkpoint."""
        self._metric_histogram.record(value, {"metric": name, **(attributes or {})})

    # ------------- Cleanup -------------

    def shutdown(self) -> None:
        """
        Flush and shutdown providers to ensure clean exit.
        """
        try:
            self._tracer_provider.force_flush(timeout_millis=5000)
            self._meter_provider.force_flush(timeout_millis=5000)
            self._tracer_provider.shutdown()
            self._meter_provider.shutdown()
        except Exception as e:
            # Shutdown must never mask the command's own outcome
            self._logger.debug(f"Error during telemetry shutdown: {e}")
