"""
Common models, interfaces, and utilities shared across the training variants,
the trainer and the evaluation pipeline.
"""

from .errors import (
    CheckpointError,
    ContractViolationError,
    EvaluationRefusedError,
    ImageFileError,
    NonFiniteLossError,
)
from .models import (
    SEMANTIC_NAMES,
    Batch,
    IdentityBreakdown,
    LatentCode,
    LossBreakdown,
    MetricsReport,
    RunManifest,
    SampleRecord,
    SemanticFactors,
)
from .telemetry import TelemetryService
from .variant_base import BranchRngs, TrainingVariant, branch_rng

__all__ = [
    "SEMANTIC_NAMES",
    "Batch",
    "BranchRngs",
    "CheckpointError",
    "ContractViolationError",
    "EvaluationRefusedError",
    "IdentityBreakdown",
    "ImageFileError",
    "LatentCode",
    "LossBreakdown",
    "MetricsReport",
    "NonFiniteLossError",
    "RunManifest",
    "SampleRecord",
    "SemanticFactors",
    "TelemetryService",
    "TrainingVariant",
    "branch_rng",
]
