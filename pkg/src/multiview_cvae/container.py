"""
Dependency injection container for the multiview-cvae toolkit.

This module defines the main dependency injection container using dependency-injector
that wires together telemetry, configurations, training variants, the trainer and the
evaluator.
"""

import os
from typing import Any

from dependency_injector import containers, providers
from dotenv import load_dotenv

from multiview_cvae.common.telemetry import TelemetryService
from multiview_cvae.evaluation.config import EvaluationConfig
from multiview_cvae.evaluation.evaluator import Evaluator
from multiview_cvae.models.config import ModelConfig
from multiview_cvae.training.config import TrainConfig
from multiview_cvae.training.trainer import Trainer
from multiview_cvae.variants import create_variant


class ApplicationContainer(containers.DeclarativeContainer):
    """Main application container for dependency injection."""

    config = providers.Configuration()

    # Telemetry service - singleton shared by every component
    telemetry = providers.Singleton(
        TelemetryService,
        service_name=config.telemetry.service_name,
        service_version=config.telemetry.service_version,
        enable_console_exporters=config.telemetry.enable_console_exporters,
    )

    # Configuration objects - singletons
    model_config = providers.Singleton(
        ModelConfig,
        latent_dim=config.model.latent_dim,
        base_channels=config.model.base_channels,
        lambda_kl=config.model.lambda_kl,
        lambda_z=config.model.lambda_z,
        lambda_key=config.model.lambda_key,
        variant=config.model.variant,
    )

    train_config = providers.Singleton(
        TrainConfig,
        batch_size=config.train.batch_size,
        epochs=config.train.epochs,
        lr=config.train.lr,
        seed=config.train.seed,
        model=model_config,
        checkpoint_every=config.train.checkpoint_every,
        log_every=config.train.log_every,
    )

    evaluation_config = providers.Singleton(
        EvaluationConfig,
        seed=config.evaluation.seed,
        threads=config.runtime.threads,
        vae_epochs=config.evaluation.vae_epochs,
        classifier_epochs=config.evaluation.classifier_epochs,
    )

    # Training variant named by the model config - transient for fresh instances
    variant = providers.Factory(
        create_variant,
        model_config=model_config,
        telemetry=telemetry,
    )

    trainer = providers.Factory(
        Trainer,
        config=train_config,
        telemetry=telemetry,
        variant=variant,
    )

    evaluator = providers.Factory(
        Evaluator,
        config=evaluation_config,
        telemetry=telemetry,
    )


def create_container() -> containers.DynamicContainer:
    """
    Create and configure the application container with defaults and environment overrides.

    Values from a .env file in the working directory are loaded first; variables already
    set in the process environment win.

    Returns:
        DynamicContainer: Configured container with all services
    """
    load_dotenv()
    container = ApplicationContainer()
    _configure_from_environment(container)
    return container


# (environment variable, configuration path, default)
CONFIG_MAPPINGS: tuple[tuple[str, str, Any], ...] = (
    # Telemetry configuration
    ("MVD_TELEMETRY_SERVICE_NAME", "telemetry.service_name", "multiview-cvae"),
    ("MVD_TELEMETRY_SERVICE_VERSION", "telemetry.service_version", "0.1.0"),
    ("MVD_TELEMETRY_CONSOLE", "telemetry.enable_console_exporters", False),
    # Runtime
    ("MVD_THREADS", "runtime.threads", 1),
    # Model configuration
    ("MVD_VARIANT", "model.variant", "baseline"),
    ("MVD_LATENT_DIM", "model.latent_dim", 128),
    ("MVD_BASE_CHANNELS", "model.base_channels", 32),
    ("MVD_LAMBDA_KL", "model.lambda_kl", 0.1),
    ("MVD_LAMBDA_Z", "model.lambda_z", 1.0),
    ("MVD_LAMBDA_KEY", "model.lambda_key", 1.0),
    # Training schedule
    ("MVD_SEED", "train.seed", 7),
    ("MVD_BATCH_SIZE", "train.batch_size", 32),
    ("MVD_EPOCHS", "train.epochs", 20),
    ("MVD_LR", "train.lr", 1e-3),
    ("MVD_LOG_EVERY", "train.log_every", 50),
    ("MVD_CHECKPOINT_EVERY", "train.checkpoint_every", 0),
    # Evaluation
    ("MVD_EVAL_SEED", "evaluation.seed", 0),
    ("MVD_VAE_EPOCHS", "evaluation.vae_epochs", 10),
    ("MVD_CLASSIFIER_EPOCHS", "evaluation.classifier_epochs", 10),
)

_INT_KEYS = (
    "threads",
    "latent_dim",
    "base_channels",
    "seed",
    "batch_size",
    "epochs",
    "log_every",
    "checkpoint_every",
)
_FLOAT_KEYS = ("lambda_", "lr")
_BOOL_KEYS = ("enable_",)


def _configure_from_environment(container: ApplicationContainer) -> None:
    """Configure container from environment variables with defaults."""
    for env_var, config_path, default_value in CONFIG_MAPPINGS:
        env_value = os.getenv(env_var)
        if env_value is not None:
            value = _convert_env_value(env_value, config_path)
        else:
            value = default_value
        _set_config_value(container.config, config_path, value)


def _convert_env_value(value: str, config_path: str) -> Any:
    """Convert environment variable string to appropriate type based on config path."""
    key = config_path.rsplit(".", 1)[-1]

    if any(key.startswith(prefix) for prefix in _BOOL_KEYS):
        return value.lower() in ("true", "1", "yes", "on")

    if key.endswith(_INT_KEYS):
        try:
            return int(value)
        except ValueError:
            return value

    if key.startswith(_FLOAT_KEYS):
        try:
            return float(value)
        except ValueError:
            return value

    if value.lower() in ("none", "null", ""):
        return None

    return value


def _set_config_value(config, path: str, value: Any) -> None:
    """Set a nested configuration value using dot notation."""
    parts = path.split(".")
    current = config
    for part in parts[:-1]:
        current = getattr(current, part)
    getattr(current, parts[-1]).override(value)
