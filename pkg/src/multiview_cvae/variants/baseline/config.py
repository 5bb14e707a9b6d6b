"""
Configuration for the identity-conditioned image CVAE baseline.
"""

from dataclasses import dataclass

from ...models import ModelConfig


@dataclass(frozen=True)
class BaselineConfig:
    """Weights of the image-only objective."""

    lambda_kl: float = 0.1
    recon_reduction: str = "per_sample_sum"

    @classmethod
    def from_model_config(cls, config: ModelConfig) -> "BaselineConfig":
        return cls(lambda_kl=config.lambda_kl, recon_reduction=config.recon_reduction)
