"""
Grayscale image files read and written through Pillow: binary PGM (P5) for every output,
PNG on request, and any single-image format Pillow decodes as input.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ContractViolationError, ImageFileError


def to_bytes(image: np.ndarray) -> np.ndarray:
    """Maps a [H, W] or [1, H, W] float image in [0, 1] to uint8 with round-half-even."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[0] == 1:
        arr = arr[0]
    if arr.ndim != 2:
        raise ContractViolationError(f"expected a single-channel image, got shape {arr.shape}")
    return np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)


def _save(path: str | Path, image: np.ndarray, image_format: str) -> Path:
    path = Path(path)
    Image.fromarray(to_bytes(image)).save(path, format=image_format)
    return path


def write_pgm(path: str | Path, image: np.ndarray) -> Path:
    return _save(path, image, "PPM")


def write_png(path: str | Path, image: np.ndarray) -> Path:
    return _save(path, image, "PNG")


def read_image(path: str | Path) -> np.ndarray:
    """Reads an image file as [1, H, W] float32 grayscale in [0, 1]."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"image {path} not found")
    try:
        with Image.open(path) as img:
            arr = np.asarray(img.convert("L"), dtype=np.float32) / 255.0
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as ex:
        raise ImageFileError(f"cannot decode image {path}: {ex}", path=path) from ex
    return arr[None, :, :]


def image_strip(images: list[np.ndarray]) -> np.ndarray:
    """Concatenates [1, H, W] images left to right."""
    return np.concatenate(
        [np.asarray(img).reshape(img.shape[-2], img.shape[-1]) for img in images], axis=1
    )
