"""
Configuration for the training loop.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any

from ..common.errors import ContractViolationError
from ..models import ModelConfig


@dataclass(frozen=True)
class TrainConfig:
    """Mini-batch schedule. checkpoint_every=0 disables intermediate checkpoints."""

    batch_size: int = 32
    epochs: int = 20
    lr: float = 1e-3
    seed: int = 7
    model: ModelConfig = field(default_factory=ModelConfig)
    checkpoint_every: int = 0
    log_every: int = 50

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ContractViolationError(f"batch_size={self.batch_size} must be >= 1")
        if self.epochs < 1:
            raise ContractViolationError(f"epochs={self.epochs} must be >= 1")
        if not self.lr >= 0.0:
            raise ContractViolationError(f"lr={self.lr} must be >= 0")
        if self.checkpoint_every < 0 or self.log_every < 0:
            raise ContractViolationError("checkpoint_every and log_every must be >= 0")

    @property
    def variant(self) -> str:
        return self.model.variant

    def to_dict(self) -> dict[str, Any]:
        payload = asdict(self)
        payload["variant"] = self.variant
        return payload

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> TrainConfig:
        """Accepts the nested form written by to_dict; a top-level variant updates the model."""
        data = dict(payload)
        model_payload = dict(data.pop("model", {}) or {})
        variant = data.pop("variant", None)
        if variant is not None:
            model_payload["variant"] = variant
        known = {f.name for f in fields(cls)} - {"model"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ContractViolationError(f"unknown train config fields {unknown}")
        return cls(model=ModelConfig.from_dict(model_payload), **data)

    def with_overrides(self, **overrides: Any) -> TrainConfig:
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})
