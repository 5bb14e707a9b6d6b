"""
Quantitative metrics over retargeted images.

Translations are produced for every ordered identity pair (i, j), i != j, and every point
of the correspondence grid: the ground-truth render of the grid point for identity i is
retargeted to j and compared with the ground-truth render for j.
"""

from __future__ import annotations

from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..common import ContractViolationError
from ..models import IdentityClassifier, MultiViewModel, retarget
from ..synthgen import SyntheticDataset
from ..tensor import no_grad
from .reference_models import IdentityVAEs, require_classifier_accuracy


@dataclass
class Translations:
    """Retargeted images grouped by ordered pair, aligned with the correspondence grid."""

    pairs: list[tuple[int, int]]
    images: dict[tuple[int, int], np.ndarray]
    targets: dict[tuple[int, int], np.ndarray]

    def by_target(self) -> dict[int, np.ndarray]:
        grouped: dict[int, list[np.ndarray]] = {}
        for pair in self.pairs:
            grouped.setdefault(pair[1], []).append(self.images[pair])
        return {j: np.concatenate(chunks) for j, chunks in sorted(grouped.items())}


def correspondence_images(dataset: SyntheticDataset, identity: int) -> np.ndarray:
    per_id = len(dataset.grid)
    return dataset.correspondence.images[identity * per_id:(identity + 1) * per_id]


def translate_pairs(model: MultiViewModel, dataset: SyntheticDataset, threads: int = 1) -> Translations:
    n = dataset.num_identities
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]

    def run(pair: tuple[int, int]) -> np.ndarray:
        i, j = pair
        return retarget(correspondence_images(dataset, i), i, j, model)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        outputs = list(pool.map(run, pairs))
    return Translations(
        pairs=pairs,
        images=dict(zip(pairs, outputs, strict=True)),
        targets={pair: correspondence_images(dataset, pair[1]) for pair in pairs},
    )


def ae_error(translated_by_target: Mapping[int, np.ndarray], vaes: IdentityVAEs) -> float:
    """Mean reconstruction L1 of each translated image through the VAE of its target identity."""
    errors = []
    for identity in sorted(translated_by_target):
        if identity not in vaes:
            raise ContractViolationError(f"no per-identity VAE for target identity {identity}")
        errors.append(vaes.reconstruction_errors(translated_by_target[identity], identity))
    values = np.concatenate(errors) if errors else np.zeros(0)
    if values.size == 0:
        raise ContractViolationError("ae_error needs at least one translated image")
    return float(values.mean())


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def cross_entropies(images: np.ndarray, target_ids: np.ndarray, classifier: IdentityClassifier) -> np.ndarray:
    target_ids = np.asarray(target_ids, dtype=np.int64)
    with no_grad():
        logits = classifier(np.asarray(images)).values.astype(np.float64)
    return -_log_softmax(logits)[np.arange(len(target_ids)), target_ids]


def classification_error(
    translated_images: np.ndarray,
    target_ids: np.ndarray,
    classifier: IdentityClassifier,
    classifier_accuracy: float | None = None,
    min_accuracy: float = 0.95,
) -> float:
    """Mean cross-entropy of the classifier on translated images against their target ids."""
    if classifier_accuracy is not None:
        require_classifier_accuracy(classifier_accuracy, min_accuracy)
    images = np.asarray(translated_images)
    if images.shape[0] == 0 or images.shape[0] != len(target_ids):
        raise ContractViolationError(
            f"{images.shape[0]} images for {len(target_ids)} target ids"
        )
    return float(cross_entropies(images, target_ids, classifier).mean())


def pair_errors(translations: Translations) -> list[dict[str, float]]:
    """Mean-squared pixel error per ordered pair, in pair order."""
    rows = []
    for i, j in translations.pairs:
        diff = translations.images[(i, j)].astype(np.float64) - translations.targets[(i, j)].astype(np.float64)
        per_image = (diff**2).reshape(diff.shape[0], -1).mean(axis=1)
        rows.append({"source": i, "target": j, "l2": float(per_image.mean()), "count": int(per_image.size)})
    return rows


def correspondence_l2_error(model: MultiViewModel, dataset: SyntheticDataset, threads: int = 1) -> float:
    """Mean over (i, j, grid point) of the mean-squared pixel error of retargeted vs ground truth."""
    rows = pair_errors(translate_pairs(model, dataset, threads))
    total = sum(row["l2"] * row["count"] for row in rows)
    return float(total / sum(row["count"] for row in rows))
