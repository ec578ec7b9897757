import json
from datetime import datetime
from typing import Any, Callable, Dict, Generic, List, Optional, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import InvalidInputError

V = TypeVar("V")


class Json(BaseModel):
    """Base class for JSON-serializable types"""

    def to_json(self) -> str:
        return json.dumps(self.model_dump())

    @classmethod
    def from_json(cls, data: str) -> "Json":
        return cls.model_validate(json.loads(data))


class ArrayModel(BaseModel):
    """Immutable model whose fields may hold numpy arrays"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def as_matrix(value: Any, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite, read-only 2-D float array."""
    array = np.array(value, dtype=float)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise InvalidInputError(f"{name} must be two-dimensional, got {array.ndim}")
    if not np.isfinite(array).all():
        raise InvalidInputError(f"{name} contains non-finite entries")
    array.setflags(write=False)
    return array


def as_vector(value: Any, name: str = "vector") -> np.ndarray:
    """Coerce to a finite, read-only 1-D float array."""
    array = np.array(value, dtype=float).reshape(-1)
    if not np.isfinite(array).all():
        raise InvalidInputError(f"{name} contains non-finite entries")
    array.setflags(write=False)
    return array


class EigenSystem(ArrayModel):
    """Eigenvalues sorted non-increasing; column i of vectors pairs with value i"""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def size(self) -> int:
        return len(self.values)


class StageChange(BaseModel, Generic[V]):
    """Represents a recomputation of a stage value"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    stage: str
    old_value: Optional[V]
    new_value: Optional[V]
    timestamp: datetime = Field(default_factory=datetime.now)


class StageNode(BaseModel):
    """Represents a node in the analysis dependency graph"""

    id: str
    dependencies: List[str] = []
    dependents: List[str] = []
    invalidated: bool = True
    last_computed: Optional[datetime] = None
    # set of subscriber id to change callback
    change_callbacks: Dict[str, Callable[[StageChange], None]] = {}
