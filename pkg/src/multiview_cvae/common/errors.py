"""
Error types shared across the package.

Every broken precondition raises ContractViolationError; I/O failures on tensor files
raise CheckpointError naming the tensor; undecodable input images raise ImageFileError.
"""

from __future__ import annotations


class ContractViolationError(ValueError):
    """An operation was called with arguments outside its contract."""


class CheckpointError(OSError):
    """A checkpoint or tensor file is missing, truncated or unreadable."""

    def __init__(self, message: str, tensor_name: str | None = None) -> None:
        super().__init__(message)
        self.tensor_name = tensor_name


class ImageFileError(OSError):
    """An input image is truncated, empty or in a format that cannot be decoded."""

    def __init__(self, message: str, path: object = None) -> None:
        super().__init__(message)
        self.path = path


class NonFiniteLossError(RuntimeError):
    """Training produced a NaN or infinite loss component."""

    def __init__(self, component: str, step: int, value: float) -> None:
        super().__init__(
            f"non-finite loss component={component} value={value} at step={step}"
        )
        self.component = component
        self.step = step
        self.value = value


class EvaluationRefusedError(RuntimeError):
    """A metric was requested from a reference model too weak to make it meaningful."""
