"""
Latent-consistency variant.

An image CVAE and a keypoint CVAE are trained in parallel, each encoder reading only its
own view, and their latent codes are tied by lambda_z * ||z_x - z_K||^2. At lambda_z = 0
the objective is the naive joint loss and the branches train independently.
"""

from ...common import Batch, BranchRngs, ContractViolationError, LossBreakdown, TelemetryService
from ...models import ModelConfig, MultiViewModel, build_model
from ...nn import kl_standard_normal, l1_loss
from ...tensor import Tensor
from .config import LatentConsistencyConfig


def latent_consistency(z_x: Tensor, z_k: Tensor) -> Tensor:
    """Squared L2 distance summed over latent dimensions, averaged over the batch."""
    return (z_x - z_k).square().sum(axis=1).mean()


def loss_variant_a(
    model: MultiViewModel, batch: Batch, config: LatentConsistencyConfig, rngs: BranchRngs
) -> LossBreakdown:
    if model.keypoint is None:
        raise ContractViolationError("latent-consistency loss needs a model with a keypoint CVAE")
    recon_k, code_k = model.keypoint(batch.keypoints, batch.identities, mode="train", rng=rngs.keypoint)
    extra = code_k.z if config.decoder_consumes_keypoint_code else None
    recon_x, code_x = model.image(
        batch.images, batch.identities, mode="train", rng=rngs.image, extra=extra
    )

    image_recon = l1_loss(recon_x, batch.images, reduction=config.recon_reduction)
    keypoint_recon = l1_loss(recon_k, batch.keypoints, reduction=config.recon_reduction)
    kl_image = kl_standard_normal(code_x.mu, code_x.logvar)
    kl_keypoint = kl_standard_normal(code_k.mu, code_k.logvar)
    consistency = latent_consistency(code_x.z, code_k.z)

    total = (
        (image_recon + keypoint_recon)
        + config.lambda_kl * (kl_image + kl_keypoint)
        + config.lambda_z * consistency
    )
    return LossBreakdown(
        total=total,
        image_recon=image_recon,
        keypoint_recon=keypoint_recon,
        kl_image=kl_image,
        kl_keypoint=kl_keypoint,
        latent_consistency=consistency,
    )


class LatentConsistencyVariant:
    name = "a"

    def __init__(
        self,
        model_config: ModelConfig,
        telemetry: TelemetryService,
        config: LatentConsistencyConfig | None = None,
    ) -> None:
        self.model_config = model_config
        self._config = config or LatentConsistencyConfig.from_model_config(model_config)
        self._logger = telemetry

    def build_model(self, seed: int) -> MultiViewModel:
        model = build_model(self.model_config, seed)
        self._logger.info(
            "Built latent-consistency model seed=%d lambda_z=%s parameters=%d",
            seed,
            self._config.lambda_z,
            model.parameter_count(),
        )
        if self._config.lambda_z == 0:
            self._logger.warning("lambda_z=0: image and keypoint branches train independently")
        return model

    def compute_loss(self, model: MultiViewModel, batch: Batch, rngs: BranchRngs) -> LossBreakdown:
        return loss_variant_a(model, batch, self._config, rngs)
