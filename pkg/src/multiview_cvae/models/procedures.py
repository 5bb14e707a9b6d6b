"""
Inference-time procedures. All of them use the posterior mean and only the image branch
unless stated otherwise; none of them records gradients or mutates the model.
"""

from __future__ import annotations

import numpy as np

from ..common.errors import ContractViolationError
from ..tensor import Tensor, no_grad
from .classifier import IdentityClassifier
from .multiview import MultiViewModel


def _as_batch(x: np.ndarray, image_size: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x)
    single = arr.ndim == 3
    if arr.ndim == 2:
        arr, single = arr[None], True
    if single:
        arr = arr[None]
    if arr.ndim != 4 or arr.shape[1:] != (1, image_size, image_size):
        raise ContractViolationError(
            f"expected image [1, {image_size}, {image_size}] or a batch of them, got {np.shape(x)}"
        )
    return arr, single


def _check_identity(model: MultiViewModel, identity: int, what: str) -> int:
    n = model.config.num_identities
    if isinstance(identity, bool) or int(identity) != identity or not 0 <= int(identity) < n:
        raise ContractViolationError(f"{what}={identity} outside [0, {n})")
    return int(identity)


def _decode(model: MultiViewModel, z: Tensor, identity) -> np.ndarray:
    return model.image.decode(z, identity, extra=z).values


def _unbatch(images: np.ndarray, single: bool) -> np.ndarray:
    return images[0] if single else images


def encode_means(model: MultiViewModel, images: np.ndarray) -> np.ndarray:
    """Posterior means [B, latent_dim] for an image batch."""
    batch, _ = _as_batch(images, model.config.image_size)
    with no_grad():
        return model.image.encode(batch)[0].numpy()


def retarget(x: np.ndarray, source_id: int, target_id: int, model: MultiViewModel) -> np.ndarray:
    """Decodes the posterior mean of x under target_id; the source only gets validated."""
    _check_identity(model, source_id, "source_id")
    target = _check_identity(model, target_id, "target_id")
    batch, single = _as_batch(x, model.config.image_size)
    with no_grad():
        mu, _ = model.image.encode(batch)
        out = _decode(model, mu, np.full(batch.shape[0], target, dtype=np.int64))
    return _unbatch(out, single)


def reconstruct(x: np.ndarray, identity: int, model: MultiViewModel) -> np.ndarray:
    return retarget(x, identity, identity, model)


def interpolate(
    x1: np.ndarray, x2: np.ndarray, t: float, render_id: int, model: MultiViewModel
) -> np.ndarray:
    """Decodes (1 - t) * mu(x1) + t * mu(x2) under render_id."""
    if not 0.0 <= t <= 1.0:
        raise ContractViolationError(f"interpolation weight t={t} outside [0, 1]")
    target = _check_identity(model, render_id, "render_id")
    a, single = _as_batch(x1, model.config.image_size)
    b, _ = _as_batch(x2, model.config.image_size)
    if a.shape != b.shape:
        raise ContractViolationError(f"endpoint shapes {a.shape} and {b.shape} differ")
    with no_grad():
        mu1, _ = model.image.encode(a)
        mu2, _ = model.image.encode(b)
        z = mu1 * (1.0 - t) + mu2 * t
        out = _decode(model, z, np.full(a.shape[0], target, dtype=np.int64))
    return _unbatch(out, single)


def interpolation_strip(
    x1: np.ndarray, x2: np.ndarray, steps: int, render_id: int, model: MultiViewModel
) -> list[np.ndarray]:
    if steps < 2:
        raise ContractViolationError(f"steps={steps}; need at least the two endpoints")
    return [interpolate(x1, x2, i / (steps - 1), render_id, model) for i in range(steps)]


def regress_new_identity(images: np.ndarray, classifier: IdentityClassifier) -> np.ndarray:
    """Mean classifier probability over an image set of one unseen person."""
    images = np.asarray(images)
    if images.ndim == 3:
        images = images[None]
    if images.shape[0] == 0:
        raise ContractViolationError("regress_new_identity needs at least one image")
    probs = classifier.predict_proba(images)
    soft = probs.mean(axis=0)
    return soft / soft.sum()


def retarget_to_soft_identity(
    x: np.ndarray, soft_label: np.ndarray, model: MultiViewModel
) -> np.ndarray:
    """Decodes with the identity code soft_label . W instead of a 1-hot code."""
    soft = np.asarray(soft_label, dtype=np.float64).reshape(-1)
    n = model.config.num_identities
    if soft.shape != (n,) or np.any(soft < 0) or not np.isclose(soft.sum(), 1.0, atol=1e-6):
        raise ContractViolationError(
            f"soft label must be a probability vector over {n} identities, got {soft_label}"
        )
    batch, single = _as_batch(x, model.config.image_size)
    with no_grad():
        mu, _ = model.image.encode(batch)
        out = _decode(model, mu, np.tile(soft, (batch.shape[0], 1)))
    return _unbatch(out, single)


def retarget_keypoints(
    k: np.ndarray, source_id: int, target_id: int, model: MultiViewModel
) -> np.ndarray:
    """Keypoint-view retargeting through the keypoint CVAE (latent-consistency models only)."""
    if model.keypoint is None:
        raise ContractViolationError(
            f"variant {model.config.variant!r} has no keypoint CVAE to retarget with"
        )
    _check_identity(model, source_id, "source_id")
    target = _check_identity(model, target_id, "target_id")
    arr = np.asarray(k)
    single = arr.ndim == 1
    batch = arr[None] if single else arr
    with no_grad():
        mu, _ = model.keypoint.encode(batch)
        out = model.keypoint.decode(mu, np.full(batch.shape[0], target, dtype=np.int64)).values
    return out[0] if single else out
