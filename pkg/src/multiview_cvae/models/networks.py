"""
Building blocks shared by the image and keypoint branches.

Encoders halve the resolution at every stage with k=4, s=2, p=1 convolutions and emit
separate mean and log-variance heads; decoders mirror them with transposed convolutions.
"""

from __future__ import annotations

import numpy as np

from ..common.errors import ContractViolationError
from ..nn import LayerSpec, Linear, Module, Sequential, normal_init
from ..tensor import Tensor, as_tensor
from .config import ModelConfig


def encoder_specs(config: ModelConfig, in_channels: int = 1) -> list[LayerSpec]:
    specs = []
    channels = in_channels
    for stage in range(config.conv_stages):
        out = config.base_channels * 2**stage
        specs.append(LayerSpec("conv", channels, out, activation="leaky_relu", slope=0.2))
        channels = out
    return specs


def decoder_specs(config: ModelConfig, out_channels: int = 1) -> list[LayerSpec]:
    specs = []
    for stage in reversed(range(config.conv_stages)):
        channels = config.base_channels * 2**stage
        if stage == 0:
            specs.append(LayerSpec("conv_transpose", channels, out_channels, activation="sigmoid"))
        else:
            specs.append(
                LayerSpec("conv_transpose", channels, channels // 2, activation="relu")
            )
    return specs


def encoder_output_shape(config: ModelConfig, batch: int = 1) -> tuple[int, ...]:
    """Feature-map shape the convolutional trunk produces, computed without allocating."""
    shape: tuple[int, ...] = (batch, 1, config.image_size, config.image_size)
    for spec in encoder_specs(config):
        shape = spec.output_shape(shape)
    return shape


def decoder_output_shape(config: ModelConfig, batch: int = 1) -> tuple[int, ...]:
    b = config.bottleneck
    shape: tuple[int, ...] = (batch, config.top_channels, b, b)
    for spec in decoder_specs(config):
        shape = spec.output_shape(shape)
    return shape


class GaussianHeads(Module):
    def __init__(self, in_dim: int, latent_dim: int, rng: np.random.Generator) -> None:
        super().__init__()
        self.mu = self.register_module("mu", Linear(LayerSpec("linear", in_dim, latent_dim), rng))
        self.logvar = self.register_module(
            "logvar", Linear(LayerSpec("linear", in_dim, latent_dim), rng)
        )

    def forward(self, h: Tensor) -> tuple[Tensor, Tensor]:
        return self.mu(h), self.logvar(h)


class ConvEncoder(Module):
    def __init__(self, config: ModelConfig, rng: np.random.Generator) -> None:
        super().__init__()
        self.config = config
        self.trunk = self.register_module("trunk", Sequential(encoder_specs(config), rng))
        flat = config.top_channels * config.bottleneck**2
        self.heads = self.register_module("heads", GaussianHeads(flat, config.latent_dim, rng))

    def forward(self, x: Tensor) -> tuple[Tensor, Tensor]:
        expected = (1, self.config.image_size, self.config.image_size)
        if x.ndim != 4 or tuple(x.shape[1:]) != expected:
            raise ContractViolationError(f"image encoder expects [B, {expected}], got {x.shape}")
        h = self.trunk(x)
        return self.heads(h.reshape(h.shape[0], -1))


class ConvDecoder(Module):
    """Projects the (latent, condition) vector to the bottleneck map, then upsamples."""

    def __init__(self, config: ModelConfig, in_dim: int, rng: np.random.Generator) -> None:
        super().__init__()
        self.config = config
        b = config.bottleneck
        self.project = self.register_module(
            "project",
            Linear(LayerSpec("linear", in_dim, config.top_channels * b * b, activation="relu"), rng),
        )
        self.trunk = self.register_module("trunk", Sequential(decoder_specs(config), rng))

    def forward(self, h: Tensor) -> Tensor:
        b = self.config.bottleneck
        x = self.project(h).reshape(h.shape[0], self.config.top_channels, b, b)
        return self.trunk(x)


class MLP(Module):
    def __init__(
        self,
        in_dim: int,
        hidden: int,
        layers: int,
        out_dim: int | None,
        activation: str,
        rng: np.random.Generator,
    ) -> None:
        super().__init__()
        specs = []
        width = in_dim
        for _ in range(layers):
            specs.append(LayerSpec("linear", width, hidden, activation=activation))
            width = hidden
        if out_dim is not None:
            specs.append(LayerSpec("linear", width, out_dim))
            width = out_dim
        self.out_dim = width
        self.body = self.register_module("body", Sequential(specs, rng))

    def forward(self, x: Tensor) -> Tensor:
        return self.body(x)


class IdentityEmbedding(Module):
    """
    Maps a 1-hot identity (or a soft mixture of identities) to its code through a
    single fully connected layer whose weight is drawn from N(0, 1).
    """

    def __init__(self, num_identities: int, code_dim: int, rng: np.random.Generator) -> None:
        super().__init__()
        self.num_identities = num_identities
        self.code_dim = code_dim
        self.weight = self.register_parameter("weight", normal_init((num_identities, code_dim), rng))

    def mixture(self, identity: np.ndarray | int | list[int]) -> np.ndarray:
        """Converts labels [B] or a soft label matrix [B, N] to a [B, N] weighting."""
        arr = np.asarray(identity)
        if arr.ndim == 2:
            if arr.shape[1] != self.num_identities:
                raise ContractViolationError(
                    f"soft identity has {arr.shape[1]} columns, model knows {self.num_identities}"
                )
            return arr.astype(self.weight.dtype)
        labels = arr.reshape(-1)
        if not np.issubdtype(labels.dtype, np.integer):
            if labels.size and not np.all(labels == np.round(labels)):
                raise ContractViolationError(f"identity labels must be integers, got {labels}")
            labels = labels.astype(np.int64)
        bad = labels[(labels < 0) | (labels >= self.num_identities)]
        if bad.size:
            raise ContractViolationError(
                f"identity index {int(bad[0])} outside [0, {self.num_identities})"
            )
        out = np.zeros((labels.size, self.num_identities), dtype=self.weight.dtype)
        out[np.arange(labels.size), labels] = 1.0
        return out

    def forward(self, identity: np.ndarray | int | list[int]) -> Tensor:
        return as_tensor(self.mixture(identity)) @ self.weight
