from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import Any

from ..common.errors import ContractViolationError
from ..tensor import DTYPES

VARIANT_ALIASES: dict[str, str] = {
    "baseline": "baseline",
    "cvae": "baseline",
    "a": "a",
    "latent_consistency": "a",
    "b": "b",
    "dual_decoder": "b",
}

RECON_REDUCTIONS = ("mean", "per_sample_sum")

MIN_BOTTLENECK = 4


def normalize_variant(name: str) -> str:
    key = str(name).strip().lower()
    if key not in VARIANT_ALIASES:
        raise ContractViolationError(
            f"unknown variant {name!r}; expected one of {sorted(set(VARIANT_ALIASES))}"
        )
    return VARIANT_ALIASES[key]


@dataclass(frozen=True)
class ModelConfig:
    """
    Geometry and loss weights shared by every network of a model.

    The desk default (32x32, three stages) and the full-scale geometry (256x256, six
    stages) both reach a 4x4 bottleneck.
    """

    image_size: int = 32
    conv_stages: int = 3
    base_channels: int = 32
    latent_dim: int = 128
    num_identities: int = 8
    keypoint_dim: int = 20
    keypoint_hidden: int = 500
    keypoint_layers: int = 4
    lambda_kl: float = 0.1
    lambda_z: float = 1.0
    lambda_key: float = 1.0
    variant: str = "baseline"
    identity_code_dim: int = 128
    recon_reduction: str = "per_sample_sum"
    dtype: str = "float32"
    decoder_consumes_keypoint_code: bool = False
    keypoint_head_hidden: int = 128
    keypoint_head_layers: int = 2
    conditioned: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", normalize_variant(self.variant))
        size = self.image_size
        if size <= 0 or size & (size - 1):
            raise ContractViolationError(f"image_size={size} must be a positive power of 2")
        if self.conv_stages < 1 or self.bottleneck < MIN_BOTTLENECK:
            raise ContractViolationError(
                f"image_size={size} with conv_stages={self.conv_stages} leaves a "
                f"{self.bottleneck}x{self.bottleneck} bottleneck; need >= {MIN_BOTTLENECK}"
            )
        positives = (
            "base_channels",
            "latent_dim",
            "keypoint_dim",
            "keypoint_hidden",
            "keypoint_layers",
            "identity_code_dim",
            "keypoint_head_hidden",
            "keypoint_head_layers",
        )
        for name in positives:
            if getattr(self, name) <= 0:
                raise ContractViolationError(f"{name}={getattr(self, name)} must be positive")
        if self.conditioned and self.num_identities < 2:
            raise ContractViolationError(
                f"num_identities={self.num_identities}; a conditioned model needs at least 2"
            )
        if self.num_identities < 1:
            raise ContractViolationError("num_identities must be positive")
        for name in ("lambda_kl", "lambda_z", "lambda_key"):
            if getattr(self, name) < 0:
                raise ContractViolationError(f"{name}={getattr(self, name)} must be >= 0")
        if self.recon_reduction not in RECON_REDUCTIONS:
            raise ContractViolationError(
                f"recon_reduction={self.recon_reduction!r}; expected one of {RECON_REDUCTIONS}"
            )
        if self.dtype not in DTYPES:
            raise ContractViolationError(f"dtype={self.dtype!r}; expected one of {sorted(DTYPES)}")
        if self.decoder_consumes_keypoint_code and self.variant != "a":
            raise ContractViolationError(
                "decoder_consumes_keypoint_code only applies to the latent-consistency variant"
            )

    @property
    def bottleneck(self) -> int:
        return self.image_size >> self.conv_stages

    @property
    def top_channels(self) -> int:
        return self.base_channels * 2 ** (self.conv_stages - 1)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> ModelConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(payload) - known)
        if unknown:
            raise ContractViolationError(f"unknown model config fields {unknown}")
        return cls(**payload)

    def with_overrides(self, **overrides: Any) -> ModelConfig:
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})
