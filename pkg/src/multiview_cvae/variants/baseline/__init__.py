"""
Identity-conditioned image CVAE baseline.
"""

from .config import BaselineConfig
from .variant import BaselineVariant, loss_baseline

__all__ = ["BaselineConfig", "BaselineVariant", "loss_baseline"]
