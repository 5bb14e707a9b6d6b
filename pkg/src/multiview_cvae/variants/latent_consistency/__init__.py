"""
Latent-consistency variant: parallel image and keypoint CVAEs with tied latent codes.
"""

from .config import LatentConsistencyConfig
from .variant import LatentConsistencyVariant, latent_consistency, loss_variant_a

__all__ = [
    "LatentConsistencyConfig",
    "LatentConsistencyVariant",
    "latent_consistency",
    "loss_variant_a",
]
