"""
Dual-decoder variant: one image encoder, a strong image decoder and a weak keypoint
decoder reading the same latent code.
"""

from ...common import Batch, BranchRngs, ContractViolationError, LossBreakdown, TelemetryService
from ...models import ModelConfig, MultiViewModel, build_model
from ...nn import kl_standard_normal, l1_loss
from .config import DualDecoderConfig


def loss_variant_b(
    model: MultiViewModel, batch: Batch, config: DualDecoderConfig, rngs: BranchRngs
) -> LossBreakdown:
    if model.keypoint_head is None:
        raise ContractViolationError("dual-decoder loss needs a model with a keypoint head")
    recon_x, code = model.image(batch.images, batch.identities, mode="train", rng=rngs.image)
    recon_k = model.keypoint_head(code.z, model.image.identity_code(batch.identities))

    image_recon = l1_loss(recon_x, batch.images, reduction=config.recon_reduction)
    keypoint_recon = l1_loss(recon_k, batch.keypoints, reduction=config.recon_reduction)
    kl_image = kl_standard_normal(code.mu, code.logvar)

    total = (image_recon + config.lambda_key * keypoint_recon) + config.lambda_kl * kl_image
    return LossBreakdown(
        total=total,
        image_recon=image_recon,
        keypoint_recon=keypoint_recon,
        kl_image=kl_image,
    )


class DualDecoderVariant:
    name = "b"

    def __init__(
        self,
        model_config: ModelConfig,
        telemetry: TelemetryService,
        config: DualDecoderConfig | None = None,
    ) -> None:
        self.model_config = model_config
        self._config = config or DualDecoderConfig.from_model_config(model_config)
        self._logger = telemetry

    def build_model(self, seed: int) -> MultiViewModel:
        model = build_model(self.model_config, seed)
        self._logger.info(
            "Built dual-decoder model seed=%d lambda_key=%s parameters=%d",
            seed,
            self._config.lambda_key,
            model.parameter_count(),
        )
        return model

    def compute_loss(self, model: MultiViewModel, batch: Batch, rngs: BranchRngs) -> LossBreakdown:
        return loss_variant_b(model, batch, self._config, rngs)
