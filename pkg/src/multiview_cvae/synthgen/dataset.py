"""
Dataset generation and loading.

A dataset directory holds images.bin, keypoints.bin, labels.bin and semantics.bin
(raw little-endian buffers) plus manifest.json. The training records come first in
every file, followed by the correspondence grid rendered for every identity; the
manifest records each split's record offset and count and a sha256 per file.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ..common.errors import ContractViolationError
from ..common.models import SEMANTIC_NAMES, Batch
from ..common.telemetry import TelemetryService
from ..tensor import load_array, save_array
from .config import SynthConfig
from .keypoints import KEYPOINT_DIM, LANDMARKS, keypoints_from
from .render import render
from .style import IdentityStyle, identity_styles

DATASET_FORMAT = "multiview-cvae-dataset"
DATASET_VERSION = 1
MANIFEST_NAME = "manifest.json"

# stored keypoint dtype; images are rendered from the rounded values
KEYPOINT_DTYPE = np.float32
SEMANTICS_STREAM = 21
GRID_LEVELS = (0.2, 0.8)
SPLITS = ("train", "correspondence")


def correspondence_grid() -> np.ndarray:
    """The 16 canonical semantic points {0.2, 0.8}^4, in lexicographic order."""
    return np.array(list(itertools.product(GRID_LEVELS, repeat=len(SEMANTIC_NAMES))))


@dataclass
class SyntheticDataset:
    config: SynthConfig
    styles: list[IdentityStyle]
    train: Batch
    correspondence: Batch
    grid: np.ndarray
    path: Path | None = None

    @property
    def num_identities(self) -> int:
        return self.config.num_identities

    @property
    def image_size(self) -> int:
        return self.config.image_size

    @property
    def keypoint_dim(self) -> int:
        return int(self.train.keypoints.shape[1])

    def ground_truth(self, grid_index: int, identity: int) -> np.ndarray:
        """render(keypoints of grid[g] under identity j, j) from the correspondence split."""
        per_id = len(self.grid)
        return self.correspondence.images[identity * per_id + grid_index]


def generate_identity_images(
    style: IdentityStyle, semantics: np.ndarray, image_size: int, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Renders one identity at every row of ``semantics``: images [M, 1, H, W], keypoints [M, 2P]."""
    semantics = np.atleast_2d(np.asarray(semantics, dtype=np.float64))
    if len(semantics):
        keypoints = np.stack([keypoints_from(s, style) for s in semantics]).astype(KEYPOINT_DTYPE)
    else:
        keypoints = np.zeros((0, KEYPOINT_DIM), KEYPOINT_DTYPE)

    def draw(k: np.ndarray) -> np.ndarray:
        return render(k, style, image_size)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        images = list(pool.map(draw, keypoints))
    stacked = np.stack(images) if images else np.zeros((0, 1, image_size, image_size), np.float32)
    return stacked, keypoints


def _build_split(
    styles: Sequence[IdentityStyle],
    identities: np.ndarray,
    semantics: np.ndarray,
    image_size: int,
    threads: int,
) -> Batch:
    keypoints = np.stack(
        [keypoints_from(s, styles[int(i)]) for s, i in zip(semantics, identities, strict=True)]
    ).astype(KEYPOINT_DTYPE)

    def draw(index: int) -> np.ndarray:
        return render(keypoints[index], styles[int(identities[index])], image_size)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        images = np.stack(list(pool.map(draw, range(len(identities)))))
    return Batch(
        images=images.astype(np.float32),
        keypoints=keypoints,
        identities=identities.astype(np.int32),
        semantics=semantics.astype(np.float32),
    )


def build_dataset(config: SynthConfig) -> SyntheticDataset:
    """Generates every record in memory."""
    styles = identity_styles(config.seed, config.num_identities)
    n, per_id = config.num_identities, config.samples_per_id

    rng = np.random.default_rng((config.seed, SEMANTICS_STREAM))
    train_semantics = rng.random((n * per_id, len(SEMANTIC_NAMES)))
    train_ids = np.repeat(np.arange(n), per_id)
    train = _build_split(styles, train_ids, train_semantics, config.image_size, config.threads)

    grid = correspondence_grid()
    corr_ids = np.repeat(np.arange(n), len(grid))
    corr_semantics = np.tile(grid, (n, 1))
    correspondence = _build_split(styles, corr_ids, corr_semantics, config.image_size, config.threads)
    return SyntheticDataset(config, list(styles), train, correspondence, grid)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_dataset(dataset: SyntheticDataset, out_path: str | Path) -> dict[str, Any]:
    out = Path(out_path)
    out.mkdir(parents=True, exist_ok=True)
    columns = {
        "images": np.concatenate([dataset.train.images, dataset.correspondence.images]),
        "keypoints": np.concatenate([dataset.train.keypoints, dataset.correspondence.keypoints]),
        "labels": np.concatenate([dataset.train.identities, dataset.correspondence.identities]),
        "semantics": np.concatenate([dataset.train.semantics, dataset.correspondence.semantics]),
    }
    files = {}
    for name, array in columns.items():
        record = save_array(out, name, array, file=f"{name}.bin")
        record["sha256"] = _sha256(out / record["file"])
        files[name] = record

    train_count = len(dataset.train)
    manifest = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "config": dataset.config.to_dict(),
        "seed": dataset.config.seed,
        "image_size": dataset.config.image_size,
        "num_identities": dataset.config.num_identities,
        "keypoint_dim": dataset.keypoint_dim,
        "landmarks": list(LANDMARKS),
        "semantic_names": list(SEMANTIC_NAMES),
        "splits": {
            "train": {"offset": 0, "count": train_count},
            "correspondence": {"offset": train_count, "count": len(dataset.correspondence)},
        },
        "correspondence_grid": dataset.grid.tolist(),
        "files": files,
        "styles": [style.to_dict() for style in dataset.styles],
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    dataset.path = out
    return manifest


def generate_dataset(
    num_identities: int,
    samples_per_id: int,
    image_size: int,
    seed: int,
    out_path: str | Path,
    threads: int = 1,
    telemetry: TelemetryService | None = None,
) -> dict[str, Any]:
    """Generates the dataset for (config, seed) and writes it under out_path; returns the manifest."""
    config = SynthConfig(num_identities, samples_per_id, image_size, seed, threads)
    attributes = {"num_identities": num_identities, "samples_per_id": samples_per_id, "seed": seed}
    if telemetry is None:
        return write_dataset(build_dataset(config), out_path)
    with telemetry.start_span("generate_dataset", attributes):
        dataset = build_dataset(config)
        manifest = write_dataset(dataset, out_path)
    telemetry.info(
        "Generated dataset path=%s train_records=%d correspondence_records=%d",
        out_path,
        len(dataset.train),
        len(dataset.correspondence),
    )
    return manifest


def read_manifest(path: str | Path) -> dict[str, Any]:
    manifest_path = Path(path) / MANIFEST_NAME
    if not manifest_path.is_file():
        raise FileNotFoundError(f"dataset manifest not found: {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("format") != DATASET_FORMAT:
        raise ContractViolationError(f"{manifest_path} is not a {DATASET_FORMAT} manifest")
    return manifest


def load_dataset(path: str | Path, verify_checksums: bool = False) -> SyntheticDataset:
    root = Path(path)
    manifest = read_manifest(root)
    columns = {}
    for name in ("images", "keypoints", "labels", "semantics"):
        record = manifest["files"][name]
        if verify_checksums and _sha256(root / record["file"]) != record["sha256"]:
            raise ContractViolationError(f"checksum mismatch for {record['file']}")
        columns[name] = load_array(root, record)

    def split(name: str) -> Batch:
        info = manifest["splits"][name]
        sl = slice(info["offset"], info["offset"] + info["count"])
        return Batch(
            images=columns["images"][sl],
            keypoints=columns["keypoints"][sl],
            identities=columns["labels"][sl],
            semantics=columns["semantics"][sl],
        )

    config = SynthConfig(**manifest["config"])
    return SyntheticDataset(
        config=config,
        styles=[IdentityStyle.from_dict(s) for s in manifest["styles"]],
        train=split("train"),
        correspondence=split("correspondence"),
        grid=np.asarray(manifest["correspondence_grid"], dtype=np.float64),
        path=root,
    )
