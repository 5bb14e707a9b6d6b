"""
Mini-batch training loop shared by every variant.
"""

from __future__ import annotations

import time
from pathlib import Path

from ..common import (
    Batch,
    BranchRngs,
    ContractViolationError,
    NonFiniteLossError,
    TelemetryService,
    TrainingVariant,
)
from ..common.variant_base import SHUFFLE_STREAM, branch_rng
from ..models import MultiViewModel
from ..nn import Adam
from ..synthgen import SyntheticDataset
from ..tensor import default_dtype
from ..variants import create_variant
from .checkpoint import ModelCheckpoint, save_checkpoint
from .config import TrainConfig
from .history import LossHistory

HISTORY_FILE = "loss_history.csv"
CHECKPOINT_DIR = "checkpoint"


class Trainer:
    """
    Trains the model of one variant with a single Adam optimizer over every active
    branch. Batches are drawn from a seeded permutation per epoch; a non-finite loss
    aborts the run.
    """

    def __init__(
        self,
        config: TrainConfig,
        telemetry: TelemetryService,
        variant: TrainingVariant,
    ) -> None:
        """Initialize the trainer.

        Args:
            config: Schedule, seed and model configuration
            telemetry: Telemetry service for logging and metrics
            variant: Builds the model and computes the variant's objective
        """
        if variant.model_config != config.model:
            raise ContractViolationError(
                f"variant {variant.name!r} was built for a different model config"
            )
        self._config = config
        self._logger = telemetry
        self._variant = variant
        self.history = LossHistory()
        self.model: MultiViewModel | None = None

    @property
    def config(self) -> TrainConfig:
        return self._config

    def check_dataset(self, dataset: SyntheticDataset | Batch) -> Batch:
        model = self._config.model
        batch = dataset.train if isinstance(dataset, SyntheticDataset) else dataset
        if len(batch) == 0:
            raise ContractViolationError("training set is empty")
        size = batch.images.shape[-1]
        problems = []
        if batch.images.shape[1:] != (1, model.image_size, model.image_size):
            problems.append(f"image_size data={size} model={model.image_size}")
        if batch.keypoints.shape[1] != model.keypoint_dim:
            problems.append(f"keypoint_dim data={batch.keypoints.shape[1]} model={model.keypoint_dim}")
        labels = int(batch.identities.max()) + 1
        data_ids = dataset.num_identities if isinstance(dataset, SyntheticDataset) else labels
        if model.conditioned and (data_ids != model.num_identities or labels > model.num_identities):
            problems.append(f"num_identities data={data_ids} model={model.num_identities}")
        if problems:
            raise ContractViolationError("config does not match dataset: " + ", ".join(problems))
        return batch

    def train(
        self,
        dataset: SyntheticDataset | Batch,
        out_dir: str | Path | None = None,
    ) -> ModelCheckpoint:
        """Runs every epoch and returns the final checkpoint.

        Args:
            dataset: Generated dataset (its train split is used) or a plain batch
            out_dir: When given, receives loss_history.csv, the final checkpoint and
                any intermediate step checkpoints

        Returns:
            Checkpoint of the trained model
        """
        cfg = self._config
        train = self.check_dataset(dataset)
        out = Path(out_dir) if out_dir is not None else None
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)

        model = self._variant.build_model(cfg.seed)
        self.model = model
        self.history = LossHistory()
        optimizer = Adam(model.parameters(), lr=cfg.lr)
        rngs = BranchRngs(cfg.seed)
        shuffle = branch_rng(cfg.seed, SHUFFLE_STREAM)
        n = len(train)
        step = 0
        started = time.perf_counter()

        self._logger.info(
            "Starting training variant=%s records=%d epochs=%d batch_size=%d lr=%s seed=%d",
            self._variant.name,
            n,
            cfg.epochs,
            cfg.batch_size,
            cfg.lr,
            cfg.seed,
        )
        with self._logger.start_span(
            "train",
            {"variant": self._variant.name, "epochs": cfg.epochs, "seed": cfg.seed, "records": n},
        ), default_dtype(cfg.model.dtype):
            for epoch in range(1, cfg.epochs + 1):
                order = shuffle.permutation(n)
                for start in range(0, n, cfg.batch_size):
                    batch = train.take(order[start:start + cfg.batch_size])
                    breakdown = self._variant.compute_loss(model, batch, rngs)
                    bad = breakdown.first_non_finite()
                    if bad is not None:
                        self._logger.error(
                            "Non-finite loss variant=%s component=%s value=%s step=%d",
                            self._variant.name,
                            bad[0],
                            bad[1],
                            step + 1,
                        )
                        raise NonFiniteLossError(bad[0], step + 1, bad[1])

                    optimizer.zero_grad()
                    breakdown.total.backward()
                    optimizer.step()
                    step += 1
                    model.training_step = step

                    row = self.history.append(step, epoch, breakdown)
                    self._logger.record_training_step(self._variant.name, row["total"])
                    if cfg.log_every and step % cfg.log_every == 0:
                        self._logger.info(
                            "variant=%s epoch=%d step=%d total=%.5f image_recon=%.5f kl_image=%.5f",
                            self._variant.name,
                            epoch,
                            step,
                            row["total"],
                            row["image_recon"],
                            row["kl_image"],
                        )
                    if out is not None and cfg.checkpoint_every and step % cfg.checkpoint_every == 0:
                        save_checkpoint(model, out / f"step_{step:06d}")
                        self._logger.debug("Saved intermediate checkpoint step=%d", step)

                self._logger.debug(
                    "Finished epoch=%d mean_total=%.5f",
                    epoch,
                    self.history.epoch_means()[epoch],
                )

        first, last = self.history.quarter_means()
        self._logger.info(
            "Finished training variant=%s steps=%d first_quarter=%.5f last_quarter=%.5f seconds=%.1f",
            self._variant.name,
            step,
            first,
            last,
            time.perf_counter() - started,
        )
        checkpoint = ModelCheckpoint.from_model(model)
        if out is not None:
            self.history.write_csv(out / HISTORY_FILE)
            save_checkpoint(model, out / CHECKPOINT_DIR)
        return checkpoint


def train(
    config: TrainConfig,
    dataset: SyntheticDataset | Batch,
    telemetry: TelemetryService,
    out_dir: str | Path | None = None,
) -> ModelCheckpoint:
    """Builds the configured variant and trains it."""
    trainer = Trainer(config, telemetry, create_variant(config.model, telemetry))
    return trainer.train(dataset, out_dir)
