"""
Tests for dependency injection using dependency-injector package.
"""

import os
from unittest.mock import MagicMock, patch

import pytest
from dependency_injector import containers

from multiview_cvae import (
    ApplicationContainer,
    BaselineVariant,
    DualDecoderVariant,
    EvaluationConfig,
    Evaluator,
    LatentConsistencyVariant,
    ModelConfig,
    TelemetryService,
    TrainConfig,
    Trainer,
    create_container,
    get_container,
    get_evaluator,
    get_trainer,
    reset_container,
)
from multiview_cvae.container import _convert_env_value


class TestApplicationContainer:
    """Test the dependency-injector container."""

    def test_create_container(self):
        container = create_container()

        assert isinstance(container, containers.DynamicContainer)
        assert container.config is not None

    def test_resolve_telemetry_service_singleton(self):
        container = create_container()

        telemetry1 = container.telemetry()
        telemetry2 = container.telemetry()

        assert telemetry1 is telemetry2
        assert isinstance(telemetry1, TelemetryService)

    def test_resolve_configs_with_defaults(self):
        container = create_container()

        model_config = container.model_config()
        train_config = container.train_config()
        evaluation_config = container.evaluation_config()

        assert model_config is container.model_config()
        assert model_config == ModelConfig(latent_dim=128, base_channels=32)
        assert isinstance(train_config, TrainConfig)
        assert train_config.model is model_config
        assert (train_config.batch_size, train_config.epochs, train_config.seed) == (32, 20, 7)
        assert evaluation_config == EvaluationConfig(seed=0, threads=1)

    @pytest.mark.parametrize(
        "name,cls",
        [
            ("baseline", BaselineVariant),
            ("a", LatentConsistencyVariant),
            ("latent_consistency", LatentConsistencyVariant),
            ("b", DualDecoderVariant),
        ],
    )
    def test_resolve_variants_transient(self, name, cls):
        container = create_container()
        container.config.model.variant.override(name)

        variant1 = container.variant()
        variant2 = container.variant()

        assert variant1 is not variant2
        assert isinstance(variant1, cls)
        assert variant1.model_config is container.model_config()

    def test_container_has_no_per_variant_providers(self):
        container = create_container()

        assert set(container.providers) >= {"variant", "trainer", "evaluator"}
        for name in ("baseline_variant", "latent_consistency_variant", "dual_decoder_variant"):
            assert name not in container.providers

    def test_resolve_trainer_and_evaluator_transient(self):
        container = create_container()

        trainer1, trainer2 = container.trainer(), container.trainer()
        evaluator1, evaluator2 = container.evaluator(), container.evaluator()

        assert trainer1 is not trainer2
        assert isinstance(trainer1, Trainer)
        assert trainer1.config is container.train_config()
        assert evaluator1 is not evaluator2
        assert isinstance(evaluator1, Evaluator)
        assert evaluator1.references is None

    def test_override_configuration(self):
        container = create_container()

        container.config.model.latent_dim.override(16)
        container.config.train.epochs.override(3)

        assert container.model_config().latent_dim == 16
        assert container.train_config().epochs == 3

    def test_override_model_config_object(self, tiny_model_config):
        container = create_container()
        config = tiny_model_config("a")

        container.model_config.override(config)
        try:
            assert container.variant().model_config is config
        finally:
            container.model_config.reset_override()

        assert container.model_config().latent_dim == 128

    def test_override_service_for_testing(self):
        container = create_container()

        mock_telemetry = MagicMock(spec=TelemetryService)
        container.telemetry.override(mock_telemetry)

        assert container.telemetry() is mock_telemetry
        container.variant().build_model(seed=0)
        mock_telemetry.info.assert_called_once()

        container.telemetry.reset_override()
        real_service = container.telemetry()
        assert real_service is not mock_telemetry
        assert isinstance(real_service, TelemetryService)


class TestConvenienceFunctions:
    """Test the convenience functions for dependency injection."""

    def setup_method(self):
        reset_container()

    def test_get_container(self):
        container = get_container()

        assert isinstance(container, containers.DynamicContainer)
        assert get_container() is container

    def test_get_trainer_and_evaluator(self):
        assert isinstance(get_trainer(), Trainer)
        assert isinstance(get_evaluator(), Evaluator)

    def test_reset_container(self):
        container1 = get_container()

        reset_container()
        container2 = get_container()

        assert container1 is not container2


class TestEnvironmentConfiguration:
    """Test environment variable configuration."""

    def test_configuration_from_environment_strings(self):
        env_vars = {
            "MVD_VARIANT": "latent_consistency",
            "MVD_TELEMETRY_SERVICE_NAME": "env-service",
        }

        with patch.dict(os.environ, env_vars):
            container = create_container()

            assert container.model_config().variant == "a"
            assert isinstance(container.variant(), LatentConsistencyVariant)
            assert container.config.telemetry.service_name() == "env-service"

    def test_configuration_from_environment_numbers(self):
        env_vars = {
            "MVD_LATENT_DIM": "64",
            "MVD_LAMBDA_Z": "2.5",
            "MVD_LR": "0.005",
            "MVD_EPOCHS": "4",
            "MVD_THREADS": "3",
            "MVD_VAE_EPOCHS": "2",
        }

        with patch.dict(os.environ, env_vars):
            container = create_container()

            assert container.model_config().latent_dim == 64
            assert container.model_config().lambda_z == 2.5
            assert container.train_config().lr == 0.005
            assert container.train_config().epochs == 4
            assert container.evaluation_config().threads == 3
            assert container.evaluation_config().vae_epochs == 2

    def test_configuration_from_environment_booleans(self):
        with patch.dict(os.environ, {"MVD_TELEMETRY_CONSOLE": "yes"}):
            container = create_container()
            assert container.config.telemetry.enable_console_exporters() is True

    def test_invalid_environment_value_is_reported(self):
        with patch.dict(os.environ, {"MVD_LATENT_DIM": "0"}):
            container = create_container()
            with pytest.raises(ValueError, match="latent_dim"):
                container.model_config()

    @pytest.mark.parametrize(
        "value,path,expected",
        [
            ("12", "model.latent_dim", 12),
            ("0.25", "model.lambda_kl", 0.25),
            ("1e-4", "train.lr", 1e-4),
            ("true", "telemetry.enable_console_exporters", True),
            ("off", "telemetry.enable_console_exporters", False),
            ("many", "train.epochs", "many"),
            ("none", "model.variant", None),
            ("b", "model.variant", "b"),
        ],
    )
    def test_convert_env_value(self, value, path, expected):
        assert _convert_env_value(value, path) == expected


class TestDependencyInjectionIntegration:
    """Integration tests for dependency injection."""

    def test_container_wiring_for_injection_decorators(self):
        from dependency_injector.wiring import Provide, inject

        @inject
        def describe(
            telemetry: TelemetryService = Provide[ApplicationContainer.telemetry],
        ) -> str:
            return f"Service: {type(telemetry).__name__}"

        container = create_container()
        container.config.telemetry.service_name.override("wiring-test")
        container.wire(modules=[__name__])

        try:
            assert describe() == "Service: TelemetryService"
        finally:
            container.unwire()

    def test_mixed_singleton_and_transient_behavior(self):
        container = create_container()

        trainer1 = container.trainer()
        trainer2 = container.trainer()

        assert trainer1 is not trainer2
        assert trainer1.config is trainer2.config
        assert container.telemetry() is container.telemetry()
