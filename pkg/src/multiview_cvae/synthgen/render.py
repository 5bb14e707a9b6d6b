"""
Anti-aliased grayscale rasterizer for the synthetic faces.

Every shape is described by a signed distance (negative inside) evaluated at pixel
centres; coverage falls linearly across one pixel around the boundary. Shapes are
composited back to front onto a black background and the identity's contrast is applied
last.
"""

from __future__ import annotations

import numpy as np

from ..common.errors import ContractViolationError
from .keypoints import landmark_points
from .style import IdentityStyle

EYE_VALUE = 0.08
MOUTH_VALUE = 0.05
BROW_VALUE = 0.12

EYE_HALF_WIDTH = 0.12
BROW_HALF_LENGTH = 0.14
BROW_THICKNESS = 0.07


def pixel_grid(size: int) -> tuple[np.ndarray, np.ndarray]:
    centers = (np.arange(size, dtype=np.float64) + 0.5) * (2.0 / size) - 1.0
    return np.meshgrid(centers, centers)  # xs vary along columns, ys along rows


def coverage(distance: np.ndarray, size: int) -> np.ndarray:
    return np.clip(0.5 - distance / (2.0 / size), 0.0, 1.0)


def ellipse_distance(xs, ys, cx: float, cy: float, ax: float, ay: float) -> np.ndarray:
    ax, ay = max(ax, 1e-6), max(ay, 1e-6)
    radial = np.sqrt(((xs - cx) / ax) ** 2 + ((ys - cy) / ay) ** 2)
    return (radial - 1.0) * min(ax, ay)


def convex_polygon_distance(xs, ys, vertices: np.ndarray) -> np.ndarray:
    """Max over edges of the signed distance to each edge line; vertices in either winding."""
    v = np.asarray(vertices, dtype=np.float64)
    cross = np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
    orientation = 1.0 if cross >= 0 else -1.0
    distance = np.full(xs.shape, -np.inf)
    for i in range(len(v)):
        p, q = v[i], v[(i + 1) % len(v)]
        edge = q - p
        length = float(np.hypot(edge[0], edge[1]))
        if length == 0.0:
            continue
        # outward normal for the given orientation
        nx, ny = orientation * edge[1] / length, -orientation * edge[0] / length
        distance = np.maximum(distance, (xs - p[0]) * nx + (ys - p[1]) * ny)
    return distance


def segment_distance(xs, ys, a: np.ndarray, b: np.ndarray, thickness: float) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    t = np.zeros_like(xs) if denom == 0.0 else np.clip(((xs - a[0]) * ab[0] + (ys - a[1]) * ab[1]) / denom, 0.0, 1.0)
    dx = xs - (a[0] + t * ab[0])
    dy = ys - (a[1] + t * ab[1])
    return np.sqrt(dx * dx + dy * dy) - 0.5 * thickness


def render(keypoints: np.ndarray, style: IdentityStyle, image_size: int) -> np.ndarray:
    """Rasterizes one face to a float32 [1, H, W] image in [0, 1]."""
    points = landmark_points(keypoints)
    if np.any(np.abs(points) > 1.0):
        raise ContractViolationError("keypoints must lie in [-1, 1]")
    xs, ys = pixel_grid(image_size)
    image = np.zeros((image_size, image_size))

    def paint(distance: np.ndarray, value: float) -> None:
        nonlocal image
        alpha = coverage(distance, image_size)
        image = image * (1.0 - alpha) + value * alpha

    paint(ellipse_distance(xs, ys, 0.0, 0.0, style.face_width, style.face_height), style.base_intensity)

    for top, bottom in ((points[4], points[5]), (points[6], points[7])):
        cx, cy = 0.5 * (top[0] + bottom[0]), 0.5 * (top[1] + bottom[1])
        half_height = 0.5 * abs(bottom[1] - top[1])
        paint(
            ellipse_distance(xs, ys, cx, cy, EYE_HALF_WIDTH * style.face_width, half_height),
            EYE_VALUE,
        )

    paint(convex_polygon_distance(xs, ys, points[[0, 1, 2, 3]]), MOUTH_VALUE)

    half = BROW_HALF_LENGTH * style.face_width
    for brow in (points[8], points[9]):
        paint(
            segment_distance(xs, ys, brow - [half, 0.0], brow + [half, 0.0], BROW_THICKNESS * style.face_height),
            BROW_VALUE,
        )

    image = np.clip(0.5 + style.contrast * (image - 0.5), 0.0, 1.0)
    return image.astype(np.float32)[None]
