from dataclasses import dataclass

from ...models import ModelConfig


@dataclass(frozen=True)
class DualDecoderConfig:
    lambda_kl: float = 0.1
    lambda_key: float = 1.0
    recon_reduction: str = "per_sample_sum"

    @classmethod
    def from_model_config(cls, config: ModelConfig) -> "DualDecoderConfig":
        return cls(
            lambda_kl=config.lambda_kl,
            lambda_key=config.lambda_key,
            recon_reduction=config.recon_reduction,
        )
