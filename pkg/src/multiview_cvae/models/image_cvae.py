"""
Identity-conditioned image VAE.

The encoder sees only the image; the identity reaches the model exclusively through the
decoder input concat(z, z_c). With ``conditioned=False`` the same architecture serves as
a plain per-identity VAE.
"""

from __future__ import annotations

import numpy as np

from ..common.errors import ContractViolationError
from ..common.models import LatentCode
from ..nn import Module, reparameterize
from ..tensor import Tensor, as_tensor, concat
from .config import ModelConfig
from .networks import ConvDecoder, ConvEncoder, IdentityEmbedding

MODES = ("train", "infer")


class ImageCVAE(Module):
    def __init__(self, config: ModelConfig, rng: np.random.Generator) -> None:
        super().__init__()
        self.config = config
        self.conditioned = config.conditioned
        self.encoder = self.register_module("encoder", ConvEncoder(config, rng))
        decoder_in = config.latent_dim
        if config.conditioned:
            decoder_in += config.identity_code_dim
        if config.decoder_consumes_keypoint_code:
            decoder_in += config.latent_dim
        self.decoder = self.register_module("decoder", ConvDecoder(config, decoder_in, rng))
        self.embedding: IdentityEmbedding | None = None
        if config.conditioned:
            self.embedding = self.register_module(
                "embedding",
                IdentityEmbedding(config.num_identities, config.identity_code_dim, rng),
            )

    def as_input(self, x: Tensor | np.ndarray) -> Tensor:
        return as_tensor(x, dtype=self.config.dtype) if not isinstance(x, Tensor) else x

    def encode(self, x: Tensor | np.ndarray) -> tuple[Tensor, Tensor]:
        return self.encoder(self.as_input(x))

    def latent(
        self, x: Tensor | np.ndarray, mode: str = "infer", rng: np.random.Generator | None = None
    ) -> LatentCode:
        if mode not in MODES:
            raise ContractViolationError(f"mode={mode!r}; expected one of {MODES}")
        mu, logvar = self.encode(x)
        if mode == "infer":
            return LatentCode(mu=mu, logvar=logvar, z=mu)
        if rng is None:
            raise ContractViolationError("train mode needs a noise generator")
        return LatentCode(mu=mu, logvar=logvar, z=reparameterize(mu, logvar, rng))

    def identity_code(self, identity: np.ndarray | int | list[int]) -> Tensor:
        if self.embedding is None:
            raise ContractViolationError("unconditioned VAE has no identity embedding")
        return self.embedding(identity)

    def decode(
        self,
        z: Tensor,
        identity: np.ndarray | int | list[int] | None = None,
        extra: Tensor | None = None,
    ) -> Tensor:
        """
        Args:
            z: latent codes [B, latent_dim].
            identity: labels [B] or soft label matrix [B, N]; required when conditioned.
            extra: the keypoint code when the decoder consumes it, else None.

        Returns:
            Images [B, 1, H, W] in [0, 1].
        """
        parts = [z]
        if self.config.decoder_consumes_keypoint_code:
            if extra is None:
                raise ContractViolationError("decoder expects a keypoint code")
            parts.append(extra)
        if self.conditioned:
            if identity is None:
                raise ContractViolationError("conditioned decoder needs an identity")
            code = self.identity_code(identity)
            if code.shape[0] != z.shape[0]:
                raise ContractViolationError(
                    f"{code.shape[0]} identities for a batch of {z.shape[0]} codes"
                )
            parts.append(code)
        return self.decoder(parts[0] if len(parts) == 1 else concat(parts, axis=1))

    def forward(
        self,
        x: Tensor | np.ndarray,
        identity: np.ndarray | int | list[int] | None = None,
        mode: str = "train",
        rng: np.random.Generator | None = None,
        extra: Tensor | None = None,
    ) -> tuple[Tensor, LatentCode]:
        code = self.latent(x, mode, rng)
        if self.config.decoder_consumes_keypoint_code and extra is None:
            extra = code.z
        return self.decode(code.z, identity, extra), code
