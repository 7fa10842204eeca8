from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SparseVector:
    """Coordinate-list vector. Duplicate indices are allowed and mean a sum."""

    dim: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        idx = np.ascontiguousarray(self.indices, dtype=np.int64).reshape(-1)
        val = np.ascontiguousarray(self.values, dtype=np.float64).reshape(-1)
        if idx.shape != val.shape:
            raise ValueError("indices and values differ in length")
        if idx.size and (idx.min() < 0 or idx.max() >= self.dim):
            bad = idx[(idx < 0) | (idx >= self.dim)][0]
            raise IndexError(f"index {bad} out of range for dimension {self.dim}")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_pairs(cls, dim: int, pairs) -> "SparseVector":
        pairs = list(pairs)
        if not pairs:
            return cls(dim, np.empty(0, np.int64), np.empty(0))
        idx, val = zip(*pairs)
        return cls(dim, np.array(idx, dtype=np.int64), np.array(val, dtype=np.float64))

    @classmethod
    def from_dense(cls, x) -> "SparseVector":
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        nz = np.flatnonzero(x)
        return cls(x.shape[0], nz, x[nz])

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        np.add.at(out, self.indices, self.values)
        return out

    def coalesce(self) -> "SparseVector":
        """Sum duplicates and drop explicit zeros; indices come back sorted."""
        if not self.indices.size:
            return self
        if np.all(np.diff(self.indices) > 0) and np.all(self.values != 0.0):
            return self
        u, inv = np.unique(self.indices, return_inverse=True)
        v = np.zeros(u.shape[0])
        np.add.at(v, inv, self.values)
        keep = v != 0.0
        return SparseVector(self.dim, u[keep], v[keep])

    @property
    def nnz(self) -> int:
        return int(np.unique(self.indices).size)


def as_sparse(x, dim: int | None = None) -> SparseVector:
    """Accept a :class:`SparseVector`, a dense 1-D array, or ``(index, value)`` pairs."""
    if isinstance(x, SparseVector):
        out = x
    elif isinstance(x, np.ndarray) or (isinstance(x, (list, tuple)) and x and not isinstance(x[0], tuple)):
        out = SparseVector.from_dense(x)
    else:
        if dim is None:
            raise ValueError("a dimension is required for (index, value) pairs")
        out = SparseVector.from_pairs(dim, x)
    if dim is not None and out.dim != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {out.dim}")
    return out
