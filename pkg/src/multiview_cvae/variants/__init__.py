"""
Training variants package.

- baseline: identity-conditioned image CVAE
- latent_consistency: image and keypoint CVAEs with tied latent codes
- dual_decoder: one image encoder feeding an image decoder and a keypoint decoder
"""

from ..common import ContractViolationError, TelemetryService, TrainingVariant
from ..models import ModelConfig, normalize_variant
from .baseline import BaselineConfig, BaselineVariant, loss_baseline
from .dual_decoder import DualDecoderConfig, DualDecoderVariant, loss_variant_b
from .latent_consistency import (
    LatentConsistencyConfig,
    LatentConsistencyVariant,
    latent_consistency,
    loss_variant_a,
)

VARIANTS: dict[str, type] = {
    "baseline": BaselineVariant,
    "a": LatentConsistencyVariant,
    "b": DualDecoderVariant,
}


def create_variant(model_config: ModelConfig, telemetry: TelemetryService) -> TrainingVariant:
    """Instantiates the variant named by model_config.variant."""
    key = normalize_variant(model_config.variant)
    if key not in VARIANTS:
        raise ContractViolationError(f"no training variant registered for {key!r}")
    return VARIANTS[key](model_config=model_config, telemetry=telemetry)


__all__ = [
    "VARIANTS",
    # Baseline
    "BaselineConfig",
    "BaselineVariant",
    "loss_baseline",
    # Latent consistency
    "LatentConsistencyConfig",
    "LatentConsistencyVariant",
    "latent_consistency",
    "loss_variant_a",
    # Dual decoder
    "DualDecoderConfig",
    "DualDecoderVariant",
    "loss_variant_b",
    "create_variant",
]
