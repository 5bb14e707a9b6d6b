"""
Fully connected branches over flattened keypoint vectors.
"""

from __future__ import annotations

import numpy as np

from ..common.errors import ContractViolationError
from ..common.models import LatentCode
from ..nn import Module, reparameterize
from ..tensor import Tensor, as_tensor, concat
from .config import ModelConfig
from .networks import MLP, GaussianHeads, IdentityEmbedding


class KeypointCVAE(Module):
    """keypoint_layers FC layers of keypoint_hidden units on each side, own identity embedding."""

    def __init__(self, config: ModelConfig, rng: np.random.Generator) -> None:
        super().__init__()
        self.config = config
        hidden, layers = config.keypoint_hidden, config.keypoint_layers
        self.encoder = self.register_module(
            "encoder", MLP(config.keypoint_dim, hidden, layers, None, "leaky_relu", rng)
        )
        self.heads = self.register_module("heads", GaussianHeads(hidden, config.latent_dim, rng))
        self.decoder = self.register_module(
            "decoder",
            MLP(
                config.latent_dim + config.identity_code_dim,
                hidden,
                layers,
                config.keypoint_dim,
                "relu",
                rng,
            ),
        )
        self.embedding = self.register_module(
            "embedding", IdentityEmbedding(config.num_identities, config.identity_code_dim, rng)
        )

    def _check(self, k: Tensor) -> Tensor:
        if k.ndim != 2 or k.shape[1] != self.config.keypoint_dim:
            raise ContractViolationError(
                f"keypoint branch expects [B, {self.config.keypoint_dim}], got {k.shape}"
            )
        return k

    def encode(self, k: Tensor | np.ndarray) -> tuple[Tensor, Tensor]:
        k = self._check(as_tensor(k, dtype=self.config.dtype))
        return self.heads(self.encoder(k))

    def latent(
        self, k: Tensor | np.ndarray, mode: str = "infer", rng: np.random.Generator | None = None
    ) -> LatentCode:
        mu, logvar = self.encode(k)
        if mode == "infer":
            return LatentCode(mu=mu, logvar=logvar, z=mu)
        if mode != "train" or rng is None:
            raise ContractViolationError(f"mode={mode!r} needs 'infer' or 'train' with a generator")
        return LatentCode(mu=mu, logvar=logvar, z=reparameterize(mu, logvar, rng))

    def decode(self, z: Tensor, identity: np.ndarray | int | list[int]) -> Tensor:
        return self.decoder(concat([z, self.embedding(identity)], axis=1))

    def forward(
        self,
        k: Tensor | np.ndarray,
        identity: np.ndarray | int | list[int],
        mode: str = "train",
        rng: np.random.Generator | None = None,
    ) -> tuple[Tensor, LatentCode]:
        code = self.latent(k, mode, rng)
        return self.decode(code.z, identity), code


class KeypointHead(Module):
    """
    The weaker keypoint decoder of the dual-decoder variant. It reads the image latent
    together with the image branch's identity code.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator) -> None:
        super().__init__()
        self.config = config
        self.body = self.register_module(
            "body",
            MLP(
                config.latent_dim + config.identity_code_dim,
                config.keypoint_head_hidden,
                config.keypoint_head_layers - 1,
                config.keypoint_dim,
                "relu",
                rng,
            ),
        )

    def forward(self, z: Tensor, identity_code: Tensor) -> Tensor:
        return self.body(concat([z, identity_code], axis=1))
