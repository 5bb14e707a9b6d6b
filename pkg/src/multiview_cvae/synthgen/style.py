"""
Per-identity appearance: face geometry, intensity, contrast and landmark jitter.

Styles are spread over their ranges with an additive low-discrepancy sequence started at
a seeded point, so neighbouring identities never collapse onto each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..common.errors import ContractViolationError

NUM_LANDMARKS = 10
MAX_OFFSET = 0.02

FACE_RANGE = (0.5, 0.9)
INTENSITY_RANGE = (0.3, 0.7)
CONTRAST_RANGE = (0.5, 1.5)

STYLE_STREAM = 11
OFFSET_STREAM = 12

# 1 / g**k for the 4-dimensional generalized golden ratio (g**5 = g + 1)
_G4 = 1.1673039782614187
_ALPHAS = np.array([_G4**-k for k in range(1, 5)])


@dataclass(frozen=True)
class IdentityStyle:
    face_width: float
    face_height: float
    base_intensity: float
    contrast: float
    feature_offsets: np.ndarray = field(
        default_factory=lambda: np.zeros((NUM_LANDMARKS, 2)), compare=False
    )

    def __post_init__(self) -> None:
        for name, (low, high) in (
            ("face_width", FACE_RANGE),
            ("face_height", FACE_RANGE),
            ("base_intensity", INTENSITY_RANGE),
            ("contrast", CONTRAST_RANGE),
        ):
            value = getattr(self, name)
            if not low <= value <= high:
                raise ContractViolationError(f"{name}={value} outside [{low}, {high}]")
        offsets = np.asarray(self.feature_offsets, dtype=np.float64)
        if offsets.shape != (NUM_LANDMARKS, 2):
            raise ContractViolationError(f"feature_offsets shape {offsets.shape} != ({NUM_LANDMARKS}, 2)")
        if np.abs(offsets).max(initial=0.0) > MAX_OFFSET:
            raise ContractViolationError(f"feature offsets exceed {MAX_OFFSET}")
        object.__setattr__(self, "feature_offsets", offsets)

    def to_dict(self) -> dict[str, object]:
        return {
            "face_width": self.face_width,
            "face_height": self.face_height,
            "base_intensity": self.base_intensity,
            "contrast": self.contrast,
            "feature_offsets": self.feature_offsets.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict[str, object]) -> IdentityStyle:
        return cls(
            face_width=float(payload["face_width"]),
            face_height=float(payload["face_height"]),
            base_intensity=float(payload["base_intensity"]),
            contrast=float(payload["contrast"]),
            feature_offsets=np.asarray(payload["feature_offsets"], dtype=np.float64),
        )


def _scale(unit: float, bounds: tuple[float, float]) -> float:
    low, high = bounds
    return float(low + unit * (high - low))


def identity_style(seed: int, index: int) -> IdentityStyle:
    """Style of identity ``index`` in the dataset generated with ``seed``."""
    if index < 0:
        raise ContractViolationError(f"identity index {index} must be non-negative")
    start = np.random.default_rng((seed, STYLE_STREAM)).random(4)
    unit = np.mod(start + (index + 1) * _ALPHAS, 1.0)
    offsets = np.random.default_rng((seed, OFFSET_STREAM, index)).uniform(
        -MAX_OFFSET, MAX_OFFSET, size=(NUM_LANDMARKS, 2)
    )
    return IdentityStyle(
        face_width=_scale(unit[0], FACE_RANGE),
        face_height=_scale(unit[1], FACE_RANGE),
        base_intensity=_scale(unit[2], INTENSITY_RANGE),
        contrast=_scale(unit[3], CONTRAST_RANGE),
        feature_offsets=offsets,
    )


def identity_styles(seed: int, count: int) -> list[IdentityStyle]:
    return [identity_style(seed, i) for i in range(count)]


def blend_styles(a: IdentityStyle, b: IdentityStyle, weight: float) -> IdentityStyle:
    """Convex combination (1 - weight) * a + weight * b of every style attribute."""
    if not 0.0 <= weight <= 1.0:
        raise ContractViolationError(f"blend weight={weight} outside [0, 1]")

    def mix(x, y):
        return (1.0 - weight) * x + weight * y

    return IdentityStyle(
        face_width=float(mix(a.face_width, b.face_width)),
        face_height=float(mix(a.face_height, b.face_height)),
        base_intensity=float(mix(a.base_intensity, b.base_intensity)),
        contrast=float(mix(a.contrast, b.contrast)),
        feature_offsets=mix(a.feature_offsets, b.feature_offsets),
    )
