"""
Reference models the metrics are measured with: one unconditioned VAE per identity and
an identity classifier, both trained on ground-truth images only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..common import Batch, ContractViolationError, EvaluationRefusedError, TelemetryService
from ..common.variant_base import INIT_STREAM, SHUFFLE_STREAM, branch_rng
from ..models import IdentityClassifier, ModelConfig, MultiViewModel
from ..nn import Adam, cross_entropy
from ..synthgen import SyntheticDataset
from ..tensor import no_grad
from ..training import (
    TrainConfig,
    Trainer,
    load_checkpoint,
    load_classifier,
    save_checkpoint,
    save_classifier,
)
from ..variants import BaselineVariant
from .config import EvaluationConfig

CLASSIFIER_BRANCH = 7


def identity_vae_config(model_config: ModelConfig) -> ModelConfig:
    """Same geometry as the image CVAE, no conditioning."""
    return replace(
        model_config,
        conditioned=False,
        num_identities=1,
        variant="baseline",
        decoder_consumes_keypoint_code=False,
    )


@dataclass
class IdentityVAEs:
    models: dict[int, MultiViewModel]

    def __contains__(self, identity: int) -> bool:
        return identity in self.models

    def reconstruction_errors(self, images: np.ndarray, identity: int) -> np.ndarray:
        """Per-image mean absolute error of VAE_identity's reconstruction (posterior mean)."""
        if identity not in self.models:
            raise ContractViolationError(f"no per-identity VAE for identity {identity}")
        images = np.asarray(images)
        if images.shape[0] == 0:
            return np.zeros(0)
        vae = self.models[identity]
        with no_grad():
            mu, _ = vae.image.encode(images)
            recon = vae.image.decode(mu).values.astype(np.float64)
        diff = np.abs(recon - images.astype(np.float64))
        return diff.reshape(diff.shape[0], -1).mean(axis=1)


def train_identity_vaes(
    dataset: SyntheticDataset,
    model_config: ModelConfig,
    config: EvaluationConfig,
    telemetry: TelemetryService,
) -> IdentityVAEs:
    vae_config = identity_vae_config(model_config)
    models = {}
    with telemetry.start_span("train_identity_vaes", {"identities": dataset.num_identities}):
        for identity in range(dataset.num_identities):
            train_config = TrainConfig(
                batch_size=config.vae_batch_size,
                epochs=config.vae_epochs,
                lr=config.vae_lr,
                seed=config.seed * 1000 + identity,
                model=vae_config,
                log_every=0,
            )
            trainer = Trainer(train_config, telemetry, BaselineVariant(vae_config, telemetry))
            trainer.train(dataset.train.where_identity(identity))
            models[identity] = trainer.model
            first, last = trainer.history.quarter_means()
            telemetry.debug(
                "Trained identity VAE identity=%d first_quarter=%.4f last_quarter=%.4f",
                identity,
                first,
                last,
            )
    return IdentityVAEs(models)


def classifier_accuracy(classifier: IdentityClassifier, batch: Batch) -> float:
    probs = classifier.predict_proba(batch.images)
    return float(np.mean(probs.argmax(axis=1) == batch.identities))


def train_identity_classifier(
    dataset: SyntheticDataset,
    config: EvaluationConfig,
    telemetry: TelemetryService,
) -> tuple[IdentityClassifier, float]:
    """Trains on the train split; accuracy is measured on the correspondence renders."""
    classifier = IdentityClassifier(
        image_size=dataset.image_size,
        num_identities=dataset.num_identities,
        rng=branch_rng(config.seed, INIT_STREAM, CLASSIFIER_BRANCH),
        base_channels=config.classifier_channels,
    )
    optimizer = Adam(classifier.parameters(), lr=config.classifier_lr)
    shuffle = branch_rng(config.seed, SHUFFLE_STREAM, CLASSIFIER_BRANCH)
    train = dataset.train
    with telemetry.start_span("train_identity_classifier", {"epochs": config.classifier_epochs}):
        for epoch in range(1, config.classifier_epochs + 1):
            order = shuffle.permutation(len(train))
            losses = []
            for start in range(0, len(train), config.classifier_batch_size):
                batch = train.take(order[start:start + config.classifier_batch_size])
                loss = cross_entropy(classifier(batch.images), batch.identities)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                losses.append(loss.item())
            telemetry.debug("Classifier epoch=%d mean_loss=%.4f", epoch, float(np.mean(losses)))
    accuracy = classifier_accuracy(classifier, dataset.correspondence)
    telemetry.info("Trained identity classifier accuracy=%.4f", accuracy)
    return classifier, accuracy


def require_classifier_accuracy(accuracy: float, threshold: float) -> None:
    if accuracy < threshold:
        raise EvaluationRefusedError(
            f"identity classifier accuracy {accuracy:.4f} is below {threshold:.2f}; "
            "classification error would be meaningless"
        )


@dataclass
class ReferenceModels:
    vaes: IdentityVAEs
    classifier: IdentityClassifier
    classifier_accuracy: float


def save_reference_models(references: ReferenceModels, path: str | Path) -> Path:
    root = Path(path)
    for identity, vae in sorted(references.vaes.models.items()):
        save_checkpoint(vae, root / f"vae_{identity:03d}")
    save_classifier(references.classifier, root / "classifier")
    (root / "classifier_accuracy.json").write_text(
        json.dumps({"accuracy": references.classifier_accuracy}, indent=2) + "\n"
    )
    return root


def load_reference_models(path: str | Path, num_identities: int) -> ReferenceModels:
    root = Path(path)
    vaes = {i: load_checkpoint(root / f"vae_{i:03d}") for i in range(num_identities)}
    accuracy_path = root / "classifier_accuracy.json"
    if not accuracy_path.is_file():
        raise FileNotFoundError(f"missing {accuracy_path}")
    accuracy = float(json.loads(accuracy_path.read_text())["accuracy"])
    return ReferenceModels(IdentityVAEs(vaes), load_classifier(root / "classifier"), accuracy)
