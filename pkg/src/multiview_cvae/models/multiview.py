from __future__ import annotations

from ..common.variant_base import (
    IMAGE_BRANCH,
    INIT_STREAM,
    KEYPOINT_BRANCH,
    KEYPOINT_HEAD_BRANCH,
    branch_rng,
)
from ..nn import Module
from ..tensor import default_dtype
from .config import ModelConfig
from .image_cvae import ImageCVAE
from .keypoint_cvae import KeypointCVAE, KeypointHead


class MultiViewModel(Module):
    """
    Every trainable branch of one model.

    The image CVAE is always present. The latent-consistency variant adds a full keypoint
    CVAE; the dual-decoder variant adds a keypoint head over the image latent.
    """

    def __init__(self, config: ModelConfig, seed: int) -> None:
        super().__init__()
        self.config = config
        self.seed = seed
        self.training_step = 0
        with default_dtype(config.dtype):
            self.image = self.register_module(
                "image", ImageCVAE(config, branch_rng(seed, INIT_STREAM, IMAGE_BRANCH))
            )
            self.keypoint: KeypointCVAE | None = None
            self.keypoint_head: KeypointHead | None = None
            if config.variant == "a":
                self.keypoint = self.register_module(
                    "keypoint", KeypointCVAE(config, branch_rng(seed, INIT_STREAM, KEYPOINT_BRANCH))
                )
            elif config.variant == "b":
                self.keypoint_head = self.register_module(
                    "keypoint_head",
                    KeypointHead(config, branch_rng(seed, INIT_STREAM, KEYPOINT_HEAD_BRANCH)),
                )

    def branch_names(self) -> list[str]:
        return list(self._children)


def build_model(config: ModelConfig, seed: int) -> MultiViewModel:
    return MultiViewModel(config, seed)
