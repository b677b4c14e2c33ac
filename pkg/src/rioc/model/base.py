"""
Shared building blocks for the domain models.
"""

from enum import Enum

import numpy as np
from pydantic import ConfigDict


class StrEnum(str, Enum):
    """Base class for string enums."""
    def __str__(self):
        return self.value


# Config for models that carry numpy arrays.
ARRAY_MODEL_CONFIG = ConfigDict(arbitrary_types_allowed=True, frozen=True)


def as_vector(value, name: str = "value") -> np.ndarray:
    """Coerce a scalar or sequence into a 1-D float array."""
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a scalar or a 1-D sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr
