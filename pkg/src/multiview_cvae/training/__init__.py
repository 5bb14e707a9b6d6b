"""
Training loop, checkpoints and loss history.
"""

from .checkpoint import (
    ModelCheckpoint,
    load_checkpoint,
    load_classifier,
    read_checkpoint,
    save_checkpoint,
    save_classifier,
)
from .config import TrainConfig
from .history import CSV_COLUMNS, LossHistory, read_history_csv
from .trainer import CHECKPOINT_DIR, HISTORY_FILE, Trainer, train

__all__ = [
    "CHECKPOINT_DIR",
    "CSV_COLUMNS",
    "HISTORY_FILE",
    "LossHistory",
    "ModelCheckpoint",
    "TrainConfig",
    "Trainer",
    "load_checkpoint",
    "load_classifier",
    "read_checkpoint",
    "read_history_csv",
    "save_checkpoint",
    "save_classifier",
    "train",
]
