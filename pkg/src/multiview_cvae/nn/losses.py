"""
VAE loss primitives: reparameterization, KL to the standard normal, L1 and cross-entropy.
"""

from __future__ import annotations

import numpy as np

from ..common.errors import ContractViolationError
from ..tensor import Tensor, as_tensor, clamp, log_softmax

LOGVAR_MIN = -10.0
LOGVAR_MAX = 10.0

L1_REDUCTIONS = ("mean", "per_sample_sum")


def _require_same_shape(a: Tensor, b: Tensor, what: str) -> None:
    if a.shape != b.shape:
        raise ContractViolationError(f"{what}: shapes {a.shape} and {b.shape} differ")


def clamp_logvar(logvar: Tensor) -> Tensor:
    return clamp(logvar, LOGVAR_MIN, LOGVAR_MAX)


def reparameterize(mu: Tensor, logvar: Tensor, rng: np.random.Generator) -> Tensor:
    """z = mu + exp(0.5 * logvar) * eps with eps ~ N(0, I) drawn from rng."""
    _require_same_shape(mu, logvar, "reparameterize")
    eps = Tensor(rng.standard_normal(size=mu.shape), dtype=mu.dtype)
    return mu + (clamp_logvar(logvar) * 0.5).exp() * eps


def kl_standard_normal(mu: Tensor, logvar: Tensor) -> Tensor:
    """
    0.5 * sum(mu^2 + exp(logvar) - 1 - logvar) over the latent dimension.

    A [d] input gives the plain sum; a [B, d] batch gives the mean over samples of the
    per-sample sums.
    """
    _require_same_shape(mu, logvar, "kl_standard_normal")
    lv = clamp_logvar(logvar)
    terms = mu.square() + lv.exp() - 1.0 - lv
    per_sample = terms.sum(axis=-1) * 0.5
    return per_sample if per_sample.ndim == 0 else per_sample.mean()


def l1_loss(pred: Tensor, target: Tensor | np.ndarray, reduction: str = "mean") -> Tensor:
    """
    Absolute error. ``mean`` averages over every element; ``per_sample_sum`` sums each
    sample's elements (the L1 norm of the ELBO) and averages over the leading batch axis.
    """
    target = as_tensor(target, dtype=pred.dtype)
    _require_same_shape(pred, target, "l1_loss")
    err = (pred - target).abs()
    if reduction == "mean":
        return err.mean()
    if reduction == "per_sample_sum":
        return err.reshape(err.shape[0], -1).sum(axis=1).mean()
    raise ContractViolationError(f"unknown reduction {reduction!r}; expected one of {L1_REDUCTIONS}")


def one_hot(labels: np.ndarray, num_classes: int, dtype: np.dtype | str = np.float32) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise ContractViolationError(
            f"labels {sorted(set(labels.tolist()))} outside [0, {num_classes})"
        )
    out = np.zeros((labels.size, num_classes), dtype=dtype)
    out[np.arange(labels.size), labels] = 1.0
    return out


def cross_entropy(logits: Tensor, labels: np.ndarray) -> Tensor:
    """Mean negative log-likelihood of integer labels under softmax(logits)."""
    targets = Tensor(one_hot(labels, logits.shape[-1], dtype=logits.dtype))
    return -(log_softmax(logits, axis=-1) * targets).sum(axis=-1).mean()


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)
