from dataclasses import asdict, dataclass
from typing import Any

from ..common.errors import ContractViolationError


@dataclass(frozen=True)
class SynthConfig:
    """Size and seed of a generated dataset. Desk default: 8 identities x 200 samples, 32x32."""

    num_identities: int = 8
    samples_per_id: int = 200
    image_size: int = 32
    seed: int = 7
    threads: int = 1

    def __post_init__(self) -> None:
        if self.num_identities < 2:
            raise ContractViolationError(
                f"num_identities={self.num_identities}; need at least 2"
            )
        if self.samples_per_id < 1:
            raise ContractViolationError(f"samples_per_id={self.samples_per_id} must be positive")
        if self.image_size < 8:
            raise ContractViolationError(f"image_size={self.image_size} must be at least 8")
        if self.threads < 1:
            raise ContractViolationError(f"threads={self.threads} must be positive")

    def to_dict(self) -> dict[str, Any]:
        payload = asdict(self)
        # thread count never changes the output bytes
        payload.pop("threads")
        return payload
