from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..common import SEMANTIC_NAMES, ContractViolationError
from ..models import MultiViewModel
from ..synthgen import SyntheticDataset
from .probes import posterior_means

EMBEDDINGS_FILE = "embeddings.csv"
PCA_FILE = "pca.csv"


@dataclass
class PCAResult:
    mean: np.ndarray
    components: np.ndarray  # [k, d], rows ordered by descending eigenvalue
    eigenvalues: np.ndarray
    coordinates: np.ndarray  # [n, k]

    def reconstruct(self) -> np.ndarray:
        return self.coordinates @ self.components + self.mean


def pca(embeddings: np.ndarray, k: int = 2) -> PCAResult:
    """
    PCA through the eigendecomposition of the sample covariance.

    Components are sorted by descending eigenvalue and each is signed so its
    largest-magnitude loading is positive. With fewer samples than dimensions the
    trailing components carry zero variance.
    """
    data = np.asarray(embeddings, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ContractViolationError(f"pca needs a non-empty [n, d] matrix, got {data.shape}")
    if k < 1:
        raise ContractViolationError(f"k={k} must be positive")
    k = min(k, data.shape[1])
    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / max(1, data.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals, kind="stable")[::-1][:k]
    components = eigvecs[:, order].T
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PCAResult(
        mean=mean,
        components=components,
        eigenvalues=np.clip(eigvals[order], 0.0, None),
        coordinates=centered @ components.T,
    )


def pca_project(embeddings: np.ndarray, k: int = 2) -> np.ndarray:
    return pca(embeddings, k).coordinates


def export_embeddings(
    model: MultiViewModel, dataset: SyntheticDataset, out_path: str | Path
) -> tuple[Path, Path]:
    """Writes embeddings.csv (sample_id, identity, semantics, z) and pca.csv (2-D PCA)."""
    out = Path(out_path)
    out.mkdir(parents=True, exist_ok=True)
    batch = dataset.train
    z = posterior_means(model, batch.images)
    coords = pca_project(z, 2)

    embeddings_path = out / EMBEDDINGS_FILE
    with embeddings_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["sample_id", "identity", *SEMANTIC_NAMES, *(f"z{i}" for i in range(z.shape[1]))]
        )
        for index in range(len(batch)):
            writer.writerow(
                [
                    index,
                    int(batch.identities[index]),
                    *(f"{v:.6f}" for v in batch.semantics[index]),
                    *(f"{v:.6f}" for v in z[index]),
                ]
            )

    pca_path = out / PCA_FILE
    with pca_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["sample_id", "identity", *(f"pc{i + 1}" for i in range(coords.shape[1]))])
        for index in range(len(batch)):
            writer.writerow(
                [index, int(batch.identities[index]), *(f"{v:.6f}" for v in coords[index])]
            )
    return embeddings_path, pca_path
