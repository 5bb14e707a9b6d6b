"""
Landmarks as an affine function of the semantic factors.

Coordinates are normalized by the image half-extent: x grows to the right, y grows
downward, both in [-1, 1]. A landmark sits at

    face_scale * anchor + gain * displacement @ s + offset

The neutral layout scales with the face while the semantic displacement is shared by all
identities up to a gain within 10% that depends on the face height, so keypoints carry a
little identity information besides the offsets.
"""

from __future__ import annotations

import numpy as np

from ..common.errors import ContractViolationError
from ..common.models import SEMANTIC_NAMES, SemanticFactors
from .style import NUM_LANDMARKS, IdentityStyle

LANDMARKS: tuple[str, ...] = (
    "mouth_left",
    "mouth_top",
    "mouth_right",
    "mouth_bottom",
    "left_eye_top",
    "left_eye_bottom",
    "right_eye_top",
    "right_eye_bottom",
    "left_brow",
    "right_brow",
)
KEYPOINT_DIM = 2 * NUM_LANDMARKS

# neutral layout in face units (face ellipse spans [-1, 1] on both axes)
ANCHORS = np.array(
    [
        [-0.30, 0.50],
        [0.00, 0.45],
        [0.30, 0.50],
        [0.00, 0.55],
        [-0.35, -0.18],
        [-0.35, -0.12],
        [0.35, -0.18],
        [0.35, -0.12],
        [-0.35, -0.45],
        [0.35, -0.45],
    ]
)

# DISPLACEMENT[landmark, axis, factor]: normalized shift at factor value 1
DISPLACEMENT = np.zeros((NUM_LANDMARKS, 2, len(SEMANTIC_NAMES)))
_MOUTH_OPEN, _MOUTH_WIDTH, _EYE_OPEN, _BROW_RAISE = range(len(SEMANTIC_NAMES))
DISPLACEMENT[0, 0, _MOUTH_WIDTH] = -0.15
DISPLACEMENT[2, 0, _MOUTH_WIDTH] = 0.15
DISPLACEMENT[1, 1, _MOUTH_OPEN] = -0.05
DISPLACEMENT[3, 1, _MOUTH_OPEN] = 0.22
DISPLACEMENT[4, 1, _EYE_OPEN] = -0.10
DISPLACEMENT[5, 1, _EYE_OPEN] = 0.10
DISPLACEMENT[6, 1, _EYE_OPEN] = -0.10
DISPLACEMENT[7, 1, _EYE_OPEN] = 0.10
DISPLACEMENT[8, 1, _BROW_RAISE] = -0.15
DISPLACEMENT[9, 1, _BROW_RAISE] = -0.15


def semantic_gain(style: IdentityStyle) -> float:
    return 1.0 + 0.1 * (style.face_height - 0.7) / 0.2


def _semantic_array(s: SemanticFactors | np.ndarray) -> np.ndarray:
    if isinstance(s, SemanticFactors):
        return s.as_array()
    arr = np.asarray(s, dtype=np.float64)
    if arr.shape != (len(SEMANTIC_NAMES),):
        raise ContractViolationError(f"semantics must have {len(SEMANTIC_NAMES)} entries, got {arr.shape}")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ContractViolationError(f"semantic factors {arr.tolist()} outside [0, 1]")
    return arr


def keypoints_from(s: SemanticFactors | np.ndarray, style: IdentityStyle) -> np.ndarray:
    """Flat [x0, y0, x1, y1, ...] landmark vector in float64."""
    values = _semantic_array(s)
    scale = np.array([style.face_width, style.face_height])
    points = ANCHORS * scale + semantic_gain(style) * (DISPLACEMENT @ values) + style.feature_offsets
    return points.reshape(-1)


def landmark_points(keypoints: np.ndarray) -> np.ndarray:
    arr = np.asarray(keypoints, dtype=np.float64)
    if arr.shape != (KEYPOINT_DIM,):
        raise ContractViolationError(f"keypoint vector must have {KEYPOINT_DIM} entries, got {arr.shape}")
    return arr.reshape(NUM_LANDMARKS, 2)
