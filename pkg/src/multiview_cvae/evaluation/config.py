"""
Configuration for the evaluation pipeline.
"""

from dataclasses import asdict, dataclass

from ..common.errors import ContractViolationError


@dataclass(frozen=True)
class EvaluationConfig:
    """Reference-model schedules, probe settings and the metric seed."""

    seed: int = 0
    threads: int = 1

    # per-identity VAEs
    vae_epochs: int = 10
    vae_batch_size: int = 32
    vae_lr: float = 1e-3

    # identity classifier
    classifier_epochs: int = 10
    classifier_batch_size: int = 32
    classifier_lr: float = 1e-3
    classifier_channels: int = 16
    min_classifier_accuracy: float = 0.95

    # latent probes
    probe_train_fraction: float = 0.8
    probe_steps: int = 2000
    probe_lr: float = 0.05
    probe_ridge: float = 1e-6
    probe_tol: float = 1e-6

    def __post_init__(self) -> None:
        if not 0.0 < self.probe_train_fraction < 1.0:
            raise ContractViolationError(
                f"probe_train_fraction={self.probe_train_fraction} outside (0, 1)"
            )
        if self.probe_tol < 0.0:
            raise ContractViolationError(f"probe_tol={self.probe_tol} must be >= 0")
        if not 0.0 <= self.min_classifier_accuracy <= 1.0:
            raise ContractViolationError(
                f"min_classifier_accuracy={self.min_classifier_accuracy} outside [0, 1]"
            )
        positive = (
            "threads",
            "vae_epochs",
            "vae_batch_size",
            "classifier_epochs",
            "classifier_batch_size",
            "classifier_channels",
            "probe_steps",
        )
        for name in positive:
            if getattr(self, name) < 1:
                raise ContractViolationError(f"{name}={getattr(self, name)} must be >= 1")

    def to_dict(self) -> dict[str, object]:
        return asdict(self)
