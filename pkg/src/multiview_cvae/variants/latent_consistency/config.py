"""
Configuration for the latent-consistency variant (two CVAEs trained jointly).
"""

from dataclasses import dataclass

from ...models import ModelConfig


@dataclass(frozen=True)
class LatentConsistencyConfig:
    """Objective weights for the image and keypoint CVAEs and their consistency term."""

    lambda_kl: float = 0.1
    lambda_z: float = 1.0
    recon_reduction: str = "per_sample_sum"

    # Image decoder reads concat(z_x, z_K, z_c) during training and z_x in place of z_K
    # at inference.
    decoder_consumes_keypoint_code: bool = False

    @classmethod
    def from_model_config(cls, config: ModelConfig) -> "LatentConsistencyConfig":
        return cls(
            lambda_kl=config.lambda_kl,
            lambda_z=config.lambda_z,
            recon_reduction=config.recon_reduction,
            decoder_consumes_keypoint_code=config.decoder_consumes_keypoint_code,
        )
