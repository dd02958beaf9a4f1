"""Shared value types: validated arrays, support sets, sparse solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np


def as_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a finite float64 2-D array, rejecting anything else."""
    A = np.asarray(X, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got ndim={A.ndim}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return A


def as_vector(y, name: str = "y") -> np.ndarray:
    """Coerce to a finite float64 1-D array."""
    v = np.asarray(y, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-D array, got ndim={v.ndim}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return v


@dataclass(frozen=True)
class SupportSet:
    """Strictly increasing feature indices inside a universe of size p."""

    indices: tuple[int, ...]
    universe: int

    def __post_init__(self) -> None:
        if self.universe < 1:
            raise ValueError("universe must be at least 1")
        prev = -1
        for i in self.indices:
            if not isinstance(i, (int, np.integer)):
                raise ValueError(f"support index {i!r} is not an integer")
            if i <= prev:
                raise ValueError("support indices must be strictly increasing")
            if not 0 <= i < self.universe:
                raise ValueError(f"support index {i} outside universe [0, {self.universe})")
            prev = i
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @classmethod
    def from_iterable(cls, indices: Iterable[int], universe: int) -> "SupportSet":
        return cls(tuple(sorted({int(i) for i in indices})), universe)

    @classmethod
    def from_beta(cls, beta: np.ndarray) -> "SupportSet":
        """Support = exact nonzero entries (no thresholding)."""
        b = np.asarray(beta)
        return cls(tuple(int(i) for i in np.flatnonzero(b != 0.0)), int(b.shape[0]))

    def to_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def to_mask(self) -> np.ndarray:
        mask = np.zeros(self.universe, dtype=bool)
        mask[list(self.indices)] = True
        return mask

    def toggled(self, index: int) -> "SupportSet":
        """Support with `index` removed if present, added otherwise."""
        if not 0 <= index < self.universe:
            raise ValueError(f"index {index} outside universe [0, {self.universe})")
        s = set(self.indices)
        s.symmetric_difference_update({int(index)})
        return SupportSet.from_iterable(s, self.universe)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, index: object) -> bool:
        return index in set(self.indices)


@dataclass
class SparseSolution:
    """A coefficient vector with explicit support and its zero-norm objective.

    `objective` is always the penalized least-squares value
    0.5 * ||y - X beta - intercept||^2 + lam * |support|, regardless of which
    solver produced the coefficients.
    """

    beta: np.ndarray
    support: SupportSet
    lam: float
    objective: float
    converged: bool
    intercept: float = 0.0
    sweep_objectives: np.ndarray | None = field(default=None, repr=False)

    @property
    def support_size(self) -> int:
        return len(self.support)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.beta + self.intercept
