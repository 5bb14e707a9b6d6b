"""
Checkpoint directories: manifest.json (config, seed, step, tensor index) plus one raw
tensor file per parameter. Saving is timestamp-free, so identical models produce
identical directories.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ..common.errors import CheckpointError, ContractViolationError
from ..models import IdentityClassifier, ModelConfig, MultiViewModel, build_model
from ..nn import Module
from ..tensor import load_array, save_array

CHECKPOINT_FORMAT = "multiview-cvae-checkpoint"
CHECKPOINT_VERSION = 1
MANIFEST_NAME = "manifest.json"

KIND_MODEL = "multiview"
KIND_CLASSIFIER = "classifier"


@dataclass
class ModelCheckpoint:
    """All parameter tensors of a model plus the configuration that created them."""

    config: ModelConfig
    seed: int
    step: int
    tensors: dict[str, np.ndarray]

    @classmethod
    def from_model(cls, model: MultiViewModel) -> ModelCheckpoint:
        return cls(model.config, model.seed, model.training_step, model.state_dict())

    def to_model(self) -> MultiViewModel:
        model = build_model(self.config, self.seed)
        model.load_state_dict(self.tensors)
        model.training_step = self.step
        return model


def _write(module: Module, path: Path, kind: str, config: dict[str, Any], seed: int, step: int) -> Path:
    path.mkdir(parents=True, exist_ok=True)
    records = []
    for name, tensor in module.named_parameters():
        try:
            records.append(save_array(path, name, tensor.data, file=f"{name}.bin"))
        except OSError as ex:
            raise CheckpointError(f"cannot write tensor {name}: {ex}", tensor_name=name) from ex
    manifest = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "kind": kind,
        "config": config,
        "seed": seed,
        "step": step,
        "tensors": records,
    }
    (path / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _read_manifest(path: Path, kind: str) -> dict[str, Any]:
    manifest_path = path / MANIFEST_NAME
    if not manifest_path.is_file():
        raise FileNotFoundError(f"checkpoint manifest not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as ex:
        raise CheckpointError(f"corrupt checkpoint manifest {manifest_path}: {ex}") from ex
    if manifest.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{manifest_path} is not a {CHECKPOINT_FORMAT} manifest")
    if manifest.get("kind") != kind:
        raise ContractViolationError(
            f"{path} holds a {manifest.get('kind')!r} checkpoint, expected {kind!r}"
        )
    return manifest


def _read_tensors(path: Path, manifest: dict[str, Any]) -> dict[str, np.ndarray]:
    return {record["name"]: load_array(path, record) for record in manifest["tensors"]}


def save_checkpoint(model: MultiViewModel | ModelCheckpoint, path: str | Path) -> Path:
    if isinstance(model, ModelCheckpoint):
        model = model.to_model()
    return _write(model, Path(path), KIND_MODEL, model.config.to_dict(), model.seed, model.training_step)


def read_checkpoint(path: str | Path) -> ModelCheckpoint:
    path = Path(path)
    manifest = _read_manifest(path, KIND_MODEL)
    return ModelCheckpoint(
        config=ModelConfig.from_dict(manifest["config"]),
        seed=int(manifest["seed"]),
        step=int(manifest["step"]),
        tensors=_read_tensors(path, manifest),
    )


def load_checkpoint(path: str | Path, expected: ModelConfig | None = None) -> MultiViewModel:
    """
    Rebuilds the model stored under path.

    Args:
        path: Checkpoint directory
        expected: When given, the stored config must match it field by field

    Returns:
        The model with bitwise-restored parameters and training step
    """
    checkpoint = read_checkpoint(path)
    if expected is not None and expected != checkpoint.config:
        stored, wanted = checkpoint.config.to_dict(), expected.to_dict()
        diffs = {k: (stored[k], wanted[k]) for k in stored if stored[k] != wanted[k]}
        raise ContractViolationError(f"checkpoint config mismatch (stored, expected): {diffs}")
    return checkpoint.to_model()


def save_classifier(classifier: IdentityClassifier, path: str | Path, seed: int = 0) -> Path:
    return _write(classifier, Path(path), KIND_CLASSIFIER, classifier.config_dict(), seed, 0)


def load_classifier(path: str | Path) -> IdentityClassifier:
    path = Path(path)
    manifest = _read_manifest(path, KIND_CLASSIFIER)
    config = manifest["config"]
    classifier = IdentityClassifier(
        image_size=int(config["image_size"]),
        num_identities=int(config["num_identities"]),
        rng=np.random.default_rng(int(manifest["seed"])),
        base_channels=int(config["base_channels"]),
        dtype=str(config["dtype"]),
    )
    classifier.load_state_dict(_read_tensors(path, manifest))
    return classifier
