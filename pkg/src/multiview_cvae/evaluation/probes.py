"""
Linear probes on posterior means: how much identity and how much semantics a latent
space exposes to a linear read-out.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np

from ..common import ContractViolationError
from ..common.variant_base import SHUFFLE_STREAM, branch_rng
from ..models import MultiViewModel, encode_means
from ..nn import Adam, cross_entropy
from ..synthgen import SyntheticDataset
from ..tensor import Tensor, default_dtype, no_grad
from .config import EvaluationConfig

PROBE_BRANCH = 9
ENCODE_CHUNK = 256
PLATEAU_WINDOW = 25


def split_indices(n: int, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 2:
        raise ContractViolationError(f"need at least 2 samples to split, got {n}")
    order = branch_rng(seed, SHUFFLE_STREAM, PROBE_BRANCH).permutation(n)
    cut = min(max(1, int(round(train_fraction * n))), n - 1)
    return np.sort(order[:cut]), np.sort(order[cut:])


def _standardize(train: np.ndarray, test: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    std[std < 1e-8] = 1.0
    return (train - mean) / std, (test - mean) / std


def fit_with_adam(
    params: list[Tensor], objective: Callable[[], Tensor], config: EvaluationConfig
) -> int:
    """
    Runs full-batch Adam on objective() until the loss plateaus or probe_steps is reached.

    The lowest loss of each PLATEAU_WINDOW steps is compared with the best so far; a relative
    improvement below probe_tol counts as converged. Returns the number of steps taken.
    """
    optimizer = Adam(params, lr=config.probe_lr)
    best = window_best = math.inf
    step = 0
    for step in range(1, config.probe_steps + 1):
        loss = objective()
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        window_best = min(window_best, loss.item())
        if step % PLATEAU_WINDOW == 0:
            converged = best - window_best <= config.probe_tol * max(abs(best), 1e-12)
            if math.isfinite(best) and converged:
                break
            best, window_best = window_best, math.inf
    return step


def softmax_probe_accuracy(
    features: np.ndarray, labels: np.ndarray, num_classes: int, config: EvaluationConfig
) -> float:
    """Held-out accuracy of a multinomial logistic regression trained with Adam."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    train_idx, test_idx = split_indices(len(features), config.probe_train_fraction, config.seed)
    x_train, x_test = _standardize(features[train_idx], features[test_idx])

    with default_dtype("float64"):
        weight = Tensor(np.zeros((features.shape[1], num_classes)), requires_grad=True)
        bias = Tensor(np.zeros(num_classes), requires_grad=True)
        inputs = Tensor(x_train)
        fit_with_adam(
            [weight, bias],
            lambda: cross_entropy(inputs @ weight + bias, labels[train_idx]),
            config,
        )
        with no_grad():
            logits = (Tensor(x_test) @ weight + bias).values
    return float(np.mean(logits.argmax(axis=1) == labels[test_idx]))


def linear_probe_r2(features: np.ndarray, targets: np.ndarray, config: EvaluationConfig) -> float:
    """
    Held-out R^2 of a linear regression trained with Adam, averaged over target columns.

    Minimizes the mean per-sample squared error plus probe_ridge * ||W||^2 (bias unpenalized)
    on standardized features.
    """
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim == 1:
        targets = targets[:, None]
    train_idx, test_idx = split_indices(len(features), config.probe_train_fraction, config.seed)
    x_train, x_test = _standardize(features[train_idx], features[test_idx])
    y_train = targets[train_idx]

    with default_dtype("float64"):
        weight = Tensor(np.zeros((features.shape[1], targets.shape[1])), requires_grad=True)
        bias = Tensor(y_train.mean(axis=0), requires_grad=True)
        inputs, wanted = Tensor(x_train), Tensor(y_train)

        def objective() -> Tensor:
            residual = inputs @ weight + bias - wanted
            return residual.square().sum(axis=1).mean() + weight.square().sum() * config.probe_ridge

        fit_with_adam([weight, bias], objective, config)
        with no_grad():
            pred = (Tensor(x_test) @ weight + bias).values

    y = targets[test_idx]
    ss_res = ((y - pred) ** 2).sum(axis=0)
    ss_tot = ((y - y.mean(axis=0)) ** 2).sum(axis=0)
    ss_tot[ss_tot == 0] = 1.0
    return float(np.mean(1.0 - ss_res / ss_tot))


def posterior_means(model: MultiViewModel, images: np.ndarray) -> np.ndarray:
    chunks = [
        encode_means(model, images[start:start + ENCODE_CHUNK])
        for start in range(0, len(images), ENCODE_CHUNK)
    ]
    return np.concatenate(chunks).astype(np.float64) if chunks else np.zeros((0, model.config.latent_dim))


def latent_probes(
    model: MultiViewModel, dataset: SyntheticDataset, config: EvaluationConfig
) -> tuple[float, float]:
    """(identity probe accuracy, semantic probe R^2) on posterior means of the train split."""
    z = posterior_means(model, dataset.train.images)
    accuracy = softmax_probe_accuracy(z, dataset.train.identities, dataset.num_identities, config)
    r2 = linear_probe_r2(z, dataset.train.semantics, config)
    return accuracy, r2
