from __future__ import annotations

import numpy as np

from ..common.errors import ContractViolationError
from ..nn import LayerSpec, Linear, Module, Sequential, softmax
from ..tensor import Tensor, as_tensor, default_dtype, no_grad

CLASSIFIER_STAGES = 3


class IdentityClassifier(Module):
    """Three k4/s2/p1 convolution stages and a linear head producing identity logits."""

    def __init__(
        self,
        image_size: int,
        num_identities: int,
        rng: np.random.Generator,
        base_channels: int = 16,
        dtype: str = "float32",
    ) -> None:
        super().__init__()
        if image_size >> CLASSIFIER_STAGES < 1 or image_size % (1 << CLASSIFIER_STAGES):
            raise ContractViolationError(
                f"image_size={image_size} too small for {CLASSIFIER_STAGES} stride-2 stages"
            )
        if num_identities < 2:
            raise ContractViolationError("classifier needs at least 2 identities")
        self.image_size = image_size
        self.num_identities = num_identities
        self.base_channels = base_channels
        self.dtype = dtype
        specs, channels = [], 1
        for stage in range(CLASSIFIER_STAGES):
            out = base_channels * 2**stage
            specs.append(LayerSpec("conv", channels, out, activation="leaky_relu"))
            channels = out
        extent = image_size >> CLASSIFIER_STAGES
        with default_dtype(dtype):
            self.trunk = self.register_module("trunk", Sequential(specs, rng))
            self.head = self.register_module(
                "head", Linear(LayerSpec("linear", channels * extent * extent, num_identities), rng)
            )

    def forward(self, x: Tensor | np.ndarray) -> Tensor:
        x = as_tensor(x, dtype=self.dtype)
        if x.ndim != 4 or tuple(x.shape[1:]) != (1, self.image_size, self.image_size):
            raise ContractViolationError(
                f"classifier expects [B, 1, {self.image_size}, {self.image_size}], got {x.shape}"
            )
        h = self.trunk(x)
        return self.head(h.reshape(h.shape[0], -1))

    def predict_proba(self, images: np.ndarray, batch_size: int = 256) -> np.ndarray:
        images = np.asarray(images)
        chunks = []
        with no_grad():
            for start in range(0, images.shape[0], batch_size):
                logits = self.forward(images[start:start + batch_size]).values.astype(np.float64)
                chunks.append(softmax(logits))
        if not chunks:
            return np.zeros((0, self.num_identities))
        return np.concatenate(chunks, axis=0)

    def config_dict(self) -> dict[str, object]:
        return {
            "image_size": self.image_size,
            "num_identities": self.num_identities,
            "base_channels": self.base_channels,
            "dtype": self.dtype,
        }
