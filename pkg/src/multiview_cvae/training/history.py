from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..common.models import LossBreakdown

CSV_COLUMNS = ("step", "epoch", *LossBreakdown.COMPONENTS)


@dataclass
class LossHistory:
    """Per-step loss components in the order they were produced."""

    rows: list[dict[str, float]] = field(default_factory=list)

    def append(self, step: int, epoch: int, breakdown: LossBreakdown) -> dict[str, float]:
        row = {"step": step, "epoch": epoch, **breakdown.as_floats()}
        self.rows.append(row)
        return row

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows], dtype=np.float64)

    def quarter_means(self, name: str = "total") -> tuple[float, float]:
        """Mean of the first and of the last quarter of steps."""
        values = self.column(name)
        if values.size == 0:
            return float("nan"), float("nan")
        quarter = max(1, values.size // 4)
        return float(values[:quarter].mean()), float(values[-quarter:].mean())

    def epoch_means(self, name: str = "total") -> dict[int, float]:
        epochs = self.column("epoch").astype(int)
        values = self.column(name)
        return {int(e): float(values[epochs == e].mean()) for e in np.unique(epochs)}

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return path


def read_history_csv(path: str | Path) -> LossHistory:
    history = LossHistory()
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            history.rows.append(
                {k: (int(v) if k in ("step", "epoch") else float(v)) for k, v in row.items()}
            )
    return history
