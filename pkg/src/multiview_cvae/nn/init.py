"""
Parameter initializers. Every initializer takes an explicit numpy Generator.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from ..common.errors import ContractViolationError
from ..tensor import Tensor, get_default_dtype


def xavier_bound(fan_in: int, fan_out: int) -> float:
    if fan_in <= 0 or fan_out <= 0:
        raise ContractViolationError(f"fans must be positive, got fan_in={fan_in} fan_out={fan_out}")
    return math.sqrt(6.0 / (fan_in + fan_out))


def xavier_init(
    fan_in: int,
    fan_out: int,
    shape: Sequence[int],
    rng: np.random.Generator,
    dtype: str | np.dtype | None = None,
) -> Tensor:
    """Glorot uniform: entries in [-a, a] with a = sqrt(6 / (fan_in + fan_out))."""
    bound = xavier_bound(fan_in, fan_out)
    values = rng.uniform(-bound, bound, size=tuple(shape))
    return Tensor(values, requires_grad=True, dtype=dtype or get_default_dtype())


def normal_init(
    shape: Sequence[int], rng: np.random.Generator, dtype: str | np.dtype | None = None
) -> Tensor:
    return Tensor(rng.standard_normal(size=tuple(shape)), requires_grad=True, dtype=dtype or get_default_dtype())


def zeros_init(shape: Sequence[int], dtype: str | np.dtype | None = None) -> Tensor:
    return Tensor(np.zeros(tuple(shape)), requires_grad=True, dtype=dtype or get_default_dtype())
