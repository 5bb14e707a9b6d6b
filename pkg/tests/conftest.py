"""
Shared test configuration and fixtures for the multiview_cvae package.

This conftest.py provides a mock telemetry service, a clean environment for every test,
and small model configurations that keep gradient checks and training runs fast.
"""

import os
from unittest.mock import Mock

import numpy as np
import pytest

from multiview_cvae.common import Batch
from multiview_cvae.models import ModelConfig
from multiview_cvae.services import reset_container
from multiview_cvae.synthgen import SynthConfig, build_dataset


class MockTelemetryService:
    """Mock TelemetryService that provides the same interface without OpenTelemetry."""

    def __init__(self, *args, **kwargs):
        # Mock logger methods
        self.debug = Mock()
        self.info = Mock()
        self.warning = Mock()
        self.error = Mock()
        self.exception = Mock()

        # Mock telemetry methods
        self.record_training_step = Mock()
        self.record_metric = Mock()
        self.shutdown = Mock()

    def start_span(self, name, attributes=None):
        """Mock span context manager."""
        return MockSpan()


class MockSpan:
    """Mock span object."""

    def __init__(self):
        self.set_attribute = Mock()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        return False


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Clean up environment variables and the global container that might affect tests."""
    monkeypatch.delenv("APPLICATIONINSIGHTS_CONNECTION_STRING", raising=False)
    for name in list(os.environ):
        if name.startswith("MVD_"):
            monkeypatch.delenv(name, raising=False)
    reset_container()
    yield
    reset_container()


@pytest.fixture
def mock_telemetry_service():
    """Provide a mock telemetry service for explicit use in tests."""
    return MockTelemetryService()


@pytest.fixture
def tiny_model_config():
    """16x16 float64 geometry small enough for finite differences."""

    def make(variant="baseline", **overrides):
        params = dict(
            image_size=16,
            conv_stages=2,
            base_channels=2,
            latent_dim=4,
            num_identities=3,
            identity_code_dim=3,
            keypoint_dim=20,
            keypoint_hidden=6,
            keypoint_layers=2,
            keypoint_head_hidden=5,
            keypoint_head_layers=2,
            variant=variant,
            dtype="float64",
        )
        params.update(overrides)
        return ModelConfig(**params)

    return make


@pytest.fixture
def random_batch():
    """Builds a Batch of uniform images and keypoints matching a ModelConfig."""

    def make(config, size=2, seed=0):
        gen = np.random.default_rng(seed)
        return Batch(
            images=gen.uniform(0.0, 1.0, (size, 1, config.image_size, config.image_size)),
            keypoints=gen.uniform(-0.8, 0.8, (size, config.keypoint_dim)),
            identities=np.arange(size) % config.num_identities,
            semantics=gen.uniform(0.0, 1.0, (size, 4)),
        )

    return make


@pytest.fixture(scope="session")
def small_dataset():
    """Three identities, twelve samples each, 16x16 images (built once per session)."""
    return build_dataset(SynthConfig(num_identities=3, samples_per_id=12, image_size=16, seed=5))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
