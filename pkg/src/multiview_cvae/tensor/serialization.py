"""
Tensor files: a raw little-endian element buffer plus a JSON-able record
{name, shape, dtype, file}. Checkpoints and datasets index these records in their manifests.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np

from ..common.errors import CheckpointError

_SUPPORTED = {"float32", "float64", "int32", "int64", "uint8"}


def save_array(directory: str | Path, name: str, array: np.ndarray, file: str | None = None) -> dict[str, Any]:
    array = np.asarray(array)
    dtype = array.dtype.name
    if dtype not in _SUPPORTED:
        raise CheckpointError(f"unsupported dtype {dtype} for tensor {name}", tensor_name=name)
    file = file or f"{name}.bin"
    path = Path(directory) / file
    np.ascontiguousarray(array, dtype=array.dtype.newbyteorder("<")).tofile(path)
    return {"name": name, "shape": list(array.shape), "dtype": dtype, "file": file}


def load_array(directory: str | Path, record: dict[str, Any]) -> np.ndarray:
    name = record.get("name", "?")
    try:
        path = Path(directory) / record["file"]
        dtype = np.dtype(record["dtype"]).newbyteorder("<")
        shape = tuple(int(d) for d in record["shape"])
    except (KeyError, TypeError, ValueError) as ex:
        raise CheckpointError(f"malformed record for tensor {name}: {ex}", tensor_name=name) from ex
    if not path.is_file():
        raise CheckpointError(f"missing file {path} for tensor {name}", tensor_name=name)
    expected = int(np.prod(shape)) * dtype.itemsize
    actual = path.stat().st_size
    if actual != expected:
        raise CheckpointError(
            f"tensor {name}: file {path} has {actual} bytes, expected {expected}",
            tensor_name=name,
        )
    data = np.fromfile(path, dtype=dtype).reshape(shape)
    return data.astype(dtype.newbyteorder("="), copy=False)
