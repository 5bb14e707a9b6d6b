"""
Central-difference gradient checking.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np

from ..common.errors import ContractViolationError
from .tensor import Tensor, no_grad


def grad_check(
    f: Callable[[], Tensor],
    params: Sequence[Tensor],
    eps: float = 1e-6,
    max_entries_per_param: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """
    Compares backward() against central differences of f around the current params.

    Returns max |analytic - numeric| / max(1, |analytic|, |numeric|) over the checked
    entries. f must be deterministic (recreate any generator inside it). All entries are
    checked unless max_entries_per_param caps the count, in which case a sample drawn
    from rng is checked. A NaN anywhere propagates as a NaN result.
    """
    for p in params:
        if p.dtype != np.float64:
            raise ContractViolationError(f"grad_check needs float64 params, got {p.dtype}")
        p.zero_grad()

    loss = f()
    loss.backward()
    analytic = [
        (p.grad if p.grad is not None else np.zeros_like(p.data)).reshape(-1).copy() for p in params
    ]

    worst = 0.0
    rng = rng or np.random.default_rng(0)
    for p, grad in zip(params, analytic, strict=True):
        flat = p.data.reshape(-1)
        indices = np.arange(flat.size)
        if max_entries_per_param is not None and flat.size > max_entries_per_param:
            indices = np.sort(rng.choice(flat.size, size=max_entries_per_param, replace=False))
        for idx in indices:
            original = flat[idx]
            with no_grad():
                flat[idx] = original + eps
                plus = f().item()
                flat[idx] = original - eps
                minus = f().item()
            flat[idx] = original
            numeric = (plus - minus) / (2.0 * eps)
            exact = float(grad[idx])
            err = abs(exact - numeric) / max(1.0, abs(exact), abs(numeric))
            if math.isnan(err):
                return float("nan")
            worst = max(worst, err)
        p.zero_grad()
    return worst
