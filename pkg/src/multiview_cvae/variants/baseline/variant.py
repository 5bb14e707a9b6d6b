"""
Image CVAE baseline: l1(G(z_x, c), x) + lambda_kl * KL(q(z|x) || N(0, I)).
"""

import numpy as np

from ...common import Batch, BranchRngs, LossBreakdown, TelemetryService
from ...models import ModelConfig, MultiViewModel, build_model
from ...nn import kl_standard_normal, l1_loss
from .config import BaselineConfig


def loss_baseline(
    model: MultiViewModel, batch: Batch, config: BaselineConfig, rng: np.random.Generator
) -> LossBreakdown:
    recon, code = model.image(batch.images, batch.identities, mode="train", rng=rng)
    image_recon = l1_loss(recon, batch.images, reduction=config.recon_reduction)
    kl_image = kl_standard_normal(code.mu, code.logvar)
    total = image_recon + config.lambda_kl * kl_image
    return LossBreakdown(total=total, image_recon=image_recon, kl_image=kl_image)


class BaselineVariant:
    """
    Trains the identity-conditioned image CVAE on its own. The identity label is
    privileged information that only the decoder sees.
    """

    name = "baseline"

    def __init__(
        self,
        model_config: ModelConfig,
        telemetry: TelemetryService,
        config: BaselineConfig | None = None,
    ) -> None:
        """Initialize the baseline variant.

        Args:
            model_config: Geometry and loss weights of the model to train
            telemetry: Telemetry service for logging and metrics
            config: Objective weights; derived from model_config when omitted
        """
        self.model_config = model_config
        self._config = config or BaselineConfig.from_model_config(model_config)
        self._logger = telemetry

    def build_model(self, seed: int) -> MultiViewModel:
        model = build_model(self.model_config, seed)
        self._logger.info(
            "Built baseline model seed=%d parameters=%d", seed, model.parameter_count()
        )
        return model

    def compute_loss(self, model: MultiViewModel, batch: Batch, rngs: BranchRngs) -> LossBreakdown:
        return loss_baseline(model, batch, self._config, rngs.image)
