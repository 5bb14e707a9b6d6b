from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from .errors import ContractViolationError

if TYPE_CHECKING:
    from ..tensor import Tensor


SEMANTIC_NAMES: tuple[str, ...] = ("mouth_open", "mouth_width", "eye_open", "brow_raise")


@dataclass(frozen=True)
class SemanticFactors:
    mouth_open: float = 0.0
    mouth_width: float = 0.0
    eye_open: float = 0.0
    brow_raise: float = 0.0

    def __post_init__(self) -> None:
        for name in SEMANTIC_NAMES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ContractViolationError(f"semantic factor {name}={value} outside [0, 1]")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in SEMANTIC_NAMES], dtype=np.float64)

    @classmethod
    def from_array(cls, values: np.ndarray) -> SemanticFactors:
        return cls(*(float(v) for v in values))


@dataclass(frozen=True)
class SampleRecord:
    image: np.ndarray  # [1, H, W] in [0, 1]
    keypoints: np.ndarray  # [2 * P] in [-1, 1]
    identity: int
    semantics: SemanticFactors


@dataclass
class Batch:
    """Column-oriented block of samples: the unit every loss and metric consumes."""

    images: np.ndarray  # [B, 1, H, W]
    keypoints: np.ndarray  # [B, 2P]
    identities: np.ndarray  # [B] int
    semantics: np.ndarray  # [B, 4]

    def __len__(self) -> int:
        return int(self.identities.shape[0])

    def take(self, indices: np.ndarray | list[int]) -> Batch:
        idx = np.asarray(indices, dtype=np.int64)
        return Batch(
            images=self.images[idx],
            keypoints=self.keypoints[idx],
            identities=self.identities[idx],
            semantics=self.semantics[idx],
        )

    def where_identity(self, identity: int) -> Batch:
        return self.take(np.flatnonzero(self.identities == identity))

    def record(self, index: int) -> SampleRecord:
        return SampleRecord(
            image=self.images[index],
            keypoints=self.keypoints[index],
            identity=int(self.identities[index]),
            semantics=SemanticFactors.from_array(self.semantics[index]),
        )


@dataclass
class LatentCode:
    mu: Tensor
    logvar: Tensor
    z: Tensor


@dataclass
class LossBreakdown:
    """Weighted objective and its unweighted components; components a variant lacks stay None."""

    total: Tensor
    image_recon: Tensor | None = None
    keypoint_recon: Tensor | None = None
    kl_image: Tensor | None = None
    kl_keypoint: Tensor | None = None
    latent_consistency: Tensor | None = None

    COMPONENTS = (
        "total",
        "image_recon",
        "keypoint_recon",
        "kl_image",
        "kl_keypoint",
        "latent_consistency",
    )

    def as_floats(self) -> dict[str, float]:
        return {
            name: (0.0 if getattr(self, name) is None else float(getattr(self, name).item()))
            for name in self.COMPONENTS
        }

    def first_non_finite(self) -> tuple[str, float] | None:
        for name, value in self.as_floats().items():
            if not math.isfinite(value):
                return name, value
        return None


@dataclass
class IdentityBreakdown:
    ae_error: float
    classification_error: float
    correspondence_l2: float


@dataclass
class MetricsReport:
    ae_error: float
    classification_error: float
    correspondence_l2: float
    id_probe_accuracy: float
    semantic_probe_r2: float
    ground_truth_ae_error: float = 0.0
    ground_truth_classification_error: float = 0.0
    classifier_accuracy: float = 0.0
    per_identity: dict[int, IdentityBreakdown] = field(default_factory=dict)
    per_pair: list[dict[str, float]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        payload = asdict(self)
        payload["per_identity"] = {str(k): asdict(v) for k, v in self.per_identity.items()}
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass
class RunManifest:
    command: str
    config: dict[str, Any]
    seeds: dict[str, int]
    inputs: dict[str, str]
    outputs: dict[str, str]
    wall_clock_seconds: float
    git_describe: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=str)
