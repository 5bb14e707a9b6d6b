from __future__ import annotations

from typing import TYPE_CHECKING, Protocol

import numpy as np

from .models import Batch, LossBreakdown

if TYPE_CHECKING:
    from ..models import ModelConfig, MultiViewModel


# Stream tags keep initialization, reparameterization noise and shuffling independent.
INIT_STREAM = 0
NOISE_STREAM = 1
SHUFFLE_STREAM = 2

IMAGE_BRANCH = 0
KEYPOINT_BRANCH = 1
KEYPOINT_HEAD_BRANCH = 2


def branch_rng(seed: int, stream: int, branch: int = 0) -> np.random.Generator:
    return np.random.default_rng((seed, stream, branch))


class BranchRngs:
    """Reparameterization noise, one generator per encoder branch."""

    def __init__(self, seed: int) -> None:
        self.image = branch_rng(seed, NOISE_STREAM, IMAGE_BRANCH)
        self.keypoint = branch_rng(seed, NOISE_STREAM, KEYPOINT_BRANCH)


class TrainingVariant(Protocol):
    name: str
    model_config: ModelConfig

    def build_model(self, seed: int) -> MultiViewModel:
        ...

    def compute_loss(self, model: MultiViewModel, batch: Batch, rngs: BranchRngs) -> LossBreakdown:
        ...
