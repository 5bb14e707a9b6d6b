"""
Adam with bias correction.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ..common.errors import ContractViolationError
from ..tensor import Tensor


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: list[np.ndarray] = field(default_factory=list)
    second_moment: list[np.ndarray] = field(default_factory=list)

    def ensure_buffers(self, params: Sequence[Tensor]) -> None:
        if not self.first_moment:
            self.first_moment = [np.zeros_like(p.data) for p in params]
            self.second_moment = [np.zeros_like(p.data) for p in params]
        if len(self.first_moment) != len(params):
            raise ContractViolationError(
                f"optimizer tracks {len(self.first_moment)} parameters, got {len(params)}"
            )


def adam_step(
    params: Sequence[Tensor], grads: Sequence[np.ndarray | None], state: AdamState
) -> None:
    """
    One Adam update in place.

    A parameter whose gradient is None is treated as having a zero gradient.
    """
    if len(params) != len(grads):
        raise ContractViolationError(f"{len(params)} parameters but {len(grads)} gradients")
    state.ensure_buffers(params)
    state.step_count += 1
    t = state.step_count
    correction1 = 1.0 - state.beta1**t
    correction2 = 1.0 - state.beta2**t
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment, strict=True):
        grad = np.zeros_like(p.data) if g is None else np.asarray(g)
        if grad.shape != p.shape or m.shape != p.shape:
            raise ContractViolationError(
                f"gradient shape {grad.shape} does not match parameter shape {p.shape}"
            )
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad
        if state.lr == 0.0:
            continue
        update = state.lr * (m / correction1) / (np.sqrt(v / correction2) + state.epsilon)
        p.data -= update.astype(p.dtype, copy=False)


class Adam:
    def __init__(
        self,
        params: Sequence[Tensor],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> None:
        self.params = list(params)
        self.state = AdamState(lr=lr, beta1=beta1, beta2=beta2, epsilon=epsilon)

    def step(self) -> None:
        adam_step(self.params, [p.grad for p in self.params], self.state)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()
