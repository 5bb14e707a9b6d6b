from .config import DualDecoderConfig
from .variant import DualDecoderVariant, loss_variant_b

__all__ = ["DualDecoderConfig", "DualDecoderVariant", "loss_variant_b"]
