"""The hash matrix ``H`` (one +-1 per column) and the linear sketch built on it."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sparsejl import _kernels
from sparsejl.randomness import SeededSource, Tag
from sparsejl.vectors import SparseVector, as_sparse


class ProjectionMismatch(ValueError):
    """Two sketches built from different projections cannot be combined."""


def _compiled(src) -> bool:
    return type(src) is SeededSource


@dataclass(frozen=True)
class HashProjection:
    """``H[i, j] = [h(j) == i] * r_j`` evaluated lazily.

    ``sign_src`` and ``bucket_src`` may be any objects exposing the
    :class:`~sparsejl.randomness.SeededSource` methods, so alternative hash
    families can be plugged in. With ``gaussian=True`` the column weights are
    standard normals drawn from ``sign_src`` instead of signs.
    """

    k: int
    dim: int
    sign_src: SeededSource
    bucket_src: SeededSource
    gaussian: bool = False

    def __post_init__(self) -> None:
        if self.k < 1 or self.dim < 1:
            raise ValueError(f"k and dim must be positive, got k={self.k}, dim={self.dim}")

    @classmethod
    def from_seed(cls, k: int, dim: int, seed: int,
                  sign_tag: int = Tag.PHI_SIGNS, bucket_tag: int = Tag.PHI_BUCKETS,
                  gaussian: bool = False) -> "HashProjection":
        return cls(k, dim, SeededSource(seed, sign_tag), SeededSource(seed, bucket_tag), gaussian)

    @property
    def identity(self) -> tuple:
        return ("H", self.k, self.dim, self.sign_src, self.bucket_src, self.gaussian)

    def _check(self, j: int) -> None:
        if not 0 <= j < self.dim:
            raise IndexError(f"column {j} out of range [0, {self.dim})")

    def column_of(self, j: int) -> tuple[int, float]:
        """Row and weight of the single nonzero in column ``j``."""
        self._check(j)
        w = self.sign_src.gaussian_at(j) if self.gaussian else self.sign_src.sign_at(j)
        return self.bucket_src.bucket_at(j, self.k), w

    def rows_weights(self, idx) -> tuple[np.ndarray, np.ndarray]:
        idx = np.asarray(idx, dtype=np.int64)
        if _compiled(self.sign_src) and _compiled(self.bucket_src):
            rows = self.bucket_src.fast_buckets(idx, self.k)
            w = self.sign_src.fast_gaussians(idx) if self.gaussian else self.sign_src.fast_signs(idx)
        else:
            rows = self.bucket_src.buckets(idx, self.k)
            w = self.sign_src.gaussians(idx) if self.gaussian else self.sign_src.signs(idx)
        return rows, w

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        self._check(j)
        return self.rows_weights(np.array([j]))

    def apply_sparse(self, entries) -> np.ndarray:
        """``H x`` for a sparse ``x``; duplicates are summed. Cost is O(#entries)."""
        x = as_sparse(entries, self.dim)
        out = np.zeros(self.k)
        if _compiled(self.sign_src) and _compiled(self.bucket_src) and not self.gaussian:
            _kernels.hash_scatter(np.uint64(self.sign_src.key), np.uint64(self.bucket_src.key),
                                  self.k, x.indices, x.values, out)
            return out
        rows, w = self.rows_weights(x.indices)
        return np.bincount(rows, weights=w * x.values, minlength=self.k).astype(np.float64)

    apply = apply_sparse


@dataclass
class Sketch:
    """Turnstile accumulator ``y = T x`` for any linear transform ``T``.

    ``T`` must expose ``k``, ``dim``, ``identity`` and ``column(j)`` returning
    the rows and weights of column ``j``. For :class:`HashProjection` each update
    touches one cell; for the replicated transform it touches ``c`` cells.
    """

    projection: object
    accumulator: np.ndarray | None = None
    update_count: int = 0

    def __post_init__(self) -> None:
        if self.accumulator is None:
            self.accumulator = np.zeros(self.projection.k)
        else:
            self.accumulator = np.asarray(self.accumulator, dtype=np.float64)
            if self.accumulator.shape != (self.projection.k,):
                raise ValueError("accumulator length must equal k")

    def update(self, j: int, delta: float) -> "Sketch":
        rows, w = self.projection.column(int(j))
        np.add.at(self.accumulator, rows, w * float(delta))
        self.update_count += 1
        return self

    def update_many(self, indices, deltas) -> "Sketch":
        """Apply a batch of updates at once through the transform's fast path."""
        batch = SparseVector(self.projection.dim, indices, deltas)
        self.accumulator += self.projection.apply(batch)
        self.update_count += batch.indices.size
        return self

    def merge(self, other: "Sketch") -> "Sketch":
        if self.projection.identity != other.projection.identity:
            raise ProjectionMismatch("sketches were built from different projections")
        return Sketch(self.projection, self.accumulator + other.accumulator,
                      self.update_count + other.update_count)

    def sq_norm(self) -> float:
        return float(np.dot(self.accumulator, self.accumulator))

    def copy(self) -> "Sketch":
        return Sketch(self.projection, self.accumulator.copy(), self.update_count)
