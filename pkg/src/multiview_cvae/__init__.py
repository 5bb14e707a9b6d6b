"""
Multi-view Conditional VAE Package

Learns identity-invariant latent codes for face images with identity-conditioned
variational autoencoders, using facial keypoints as a second view during training:
- baseline: image CVAE conditioned on a learned identity code
- latent consistency (variant a): image and keypoint CVAEs whose codes are tied together
- dual decoder (variant b): one image encoder feeding an image and a keypoint decoder

Around the models it provides a numpy autodiff core, a procedural face generator with
ground-truth correspondences, a deterministic trainer, the evaluation metrics and the
retarget / interpolate / new-identity procedures.

Dependency injection is provided through the dependency-injector package.
"""

# Common interfaces and models
from .common import (
    Batch,
    ContractViolationError,
    LossBreakdown,
    MetricsReport,
    RunManifest,
    TelemetryService,
    TrainingVariant,
)

# Dependency injection
from .container import ApplicationContainer, create_container
from .evaluation import EvaluationConfig, Evaluator

# Models and procedures
from .models import (
    ModelConfig,
    MultiViewModel,
    build_model,
    interpolate,
    reconstruct,
    regress_new_identity,
    retarget,
)
from .services import get_container, get_evaluator, get_trainer, reset_container
from .synthgen import SynthConfig, SyntheticDataset, generate_dataset, load_dataset
from .training import TrainConfig, Trainer, load_checkpoint, save_checkpoint

# Training variants
from .variants import (
    BaselineVariant,
    DualDecoderVariant,
    LatentConsistencyVariant,
    create_variant,
)

__all__ = [
    # Common models and interfaces
    "Batch",
    "ContractViolationError",
    "LossBreakdown",
    "MetricsReport",
    "RunManifest",
    "TelemetryService",
    "TrainingVariant",
    # Models
    "ModelConfig",
    "MultiViewModel",
    "build_model",
    "retarget",
    "reconstruct",
    "interpolate",
    "regress_new_identity",
    # Variants
    "BaselineVariant",
    "LatentConsistencyVariant",
    "DualDecoderVariant",
    "create_variant",
    # Data
    "SynthConfig",
    "SyntheticDataset",
    "generate_dataset",
    "load_dataset",
    # Training and evaluation
    "TrainConfig",
    "Trainer",
    "load_checkpoint",
    "save_checkpoint",
    "EvaluationConfig",
    "Evaluator",
    # Dependency injection
    "ApplicationContainer",
    "create_container",
    "get_container",
    "get_trainer",
    "get_evaluator",
    "reset_container",
]
