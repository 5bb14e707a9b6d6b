"""
Latent-consistency weight sweep: the same latent-consistency model trained once per
lambda_z with identical seeds and data.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import asdict, dataclass, replace

import numpy as np

from ..common import Batch, ContractViolationError, TelemetryService
from ..models import MultiViewModel
from ..synthgen import SyntheticDataset
from ..tensor import no_grad
from ..training import TrainConfig, Trainer
from ..variants import LatentConsistencyVariant
from .metrics import correspondence_l2_error

ENCODE_CHUNK = 256


@dataclass
class LambdaZResult:
    lambda_z: float
    label: str
    mean_latent_distance: float
    correspondence_l2: float
    final_quarter_loss: float

    def to_dict(self) -> dict[str, object]:
        return asdict(self)


def mean_latent_distance(model: MultiViewModel, batch: Batch) -> float:
    """Mean ||mu_x - mu_K||_2 between the two encoders' posterior means."""
    if model.keypoint is None:
        raise ContractViolationError("latent distance needs a model with a keypoint CVAE")
    distances = []
    with no_grad():
        for start in range(0, len(batch), ENCODE_CHUNK):
            chunk = batch.take(np.arange(start, min(start + ENCODE_CHUNK, len(batch))))
            mu_x, _ = model.image.encode(chunk.images)
            mu_k, _ = model.keypoint.encode(chunk.keypoints)
            diff = mu_x.values.astype(np.float64) - mu_k.values.astype(np.float64)
            distances.append(np.sqrt((diff**2).sum(axis=1)))
    return float(np.concatenate(distances).mean())


def sweep_lambda_z(
    values: Sequence[float],
    dataset: SyntheticDataset,
    config: TrainConfig,
    telemetry: TelemetryService,
    threads: int = 1,
) -> list[LambdaZResult]:
    if not values:
        raise ContractViolationError("sweep_lambda_z needs at least one value")
    results = []
    for value in values:
        model_config = replace(config.model, variant="a", lambda_z=float(value))
        run_config = replace(config, model=model_config)
        trainer = Trainer(run_config, telemetry, LatentConsistencyVariant(model_config, telemetry))
        trainer.train(dataset)
        model = trainer.model
        result = LambdaZResult(
            lambda_z=float(value),
            label="joint_without_consistency" if value == 0 else f"lambda_z={value:g}",
            mean_latent_distance=mean_latent_distance(model, dataset.train),
            correspondence_l2=correspondence_l2_error(model, dataset, threads),
            final_quarter_loss=trainer.history.quarter_means()[1],
        )
        telemetry.info(
            "Ablation lambda_z=%s mean_latent_distance=%.4f correspondence_l2=%.5f",
            value,
            result.mean_latent_distance,
            result.correspondence_l2,
        )
        results.append(result)
    return results
