"""Norm-preserving maps applied before hashing.

``ReplicationPlan`` copies each coordinate ``c`` times at scale ``1/sqrt(c)``;
``BlockHadamard`` applies an independent randomized Hadamard matrix ``F D`` to
each length-``b`` block. Both shrink the infinity norm of the input so that no
hash bucket receives too much mass (see :func:`bucket_stats`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sparsejl import _kernels
from sparsejl.hashing import HashProjection
from sparsejl.randomness import SeededSource, Tag
from sparsejl.vectors import SparseVector, as_sparse


def is_pow2(m: int) -> bool:
    return m >= 1 and m & (m - 1) == 0


def parity(v: np.ndarray) -> np.ndarray:
    """Parity of the population count of each non-negative integer in ``v``."""
    v = np.asarray(v, dtype=np.uint64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(np.int64)


def hadamard_matrix(m: int) -> np.ndarray:
    """Explicit orthonormal ``F[i, j] = m**-0.5 * (-1)**popcount(i & j)``."""
    if not is_pow2(m):
        raise ValueError(f"Hadamard size must be a power of two, got {m}")
    i = np.arange(m, dtype=np.uint64)
    return (1.0 - 2.0 * parity(i[:, None] & i[None, :])) / math.sqrt(m)


def fwht_in_place(z: np.ndarray) -> np.ndarray:
    """Orthonormal fast Walsh-Hadamard transform of a float64 vector, in place."""
    if z.ndim != 1 or z.dtype != np.float64:
        raise TypeError("fwht_in_place needs a 1-D float64 array")
    m = z.shape[0]
    if not is_pow2(m):
        raise ValueError(f"length must be a power of two, got {m}")
    _kernels.fwht_rows(z.reshape(1, m))
    z *= 1.0 / math.sqrt(m)
    return z


@dataclass(frozen=True)
class ReplicationPlan:
    c: int
    d: int

    @property
    def out_dim(self) -> int:
        return self.c * self.d

    def replicate(self, x):
        """``P x``: entry ``j`` becomes ``x_j / sqrt(c)`` at slots ``j*c .. j*c + c - 1``.

        Sparse input stays sparse; dense input returns a dense array.
        """
        s = 1.0 / math.sqrt(self.c)
        if isinstance(x, SparseVector) or not isinstance(x, np.ndarray):
            x = as_sparse(x, self.d)
            idx = (x.indices[:, None] * self.c + np.arange(self.c)).reshape(-1)
            return SparseVector(self.out_dim, idx, np.repeat(x.values * s, self.c))
        if x.shape != (self.d,):
            raise ValueError(f"dimension mismatch: expected {self.d}, got {x.shape[0]}")
        return np.repeat(x.astype(np.float64) * s, self.c)


def replicate(plan: ReplicationPlan, x):
    return plan.replicate(x)


@dataclass(frozen=True)
class BlockHadamard:
    """Block-diagonal ``G`` with ``ceil(d/b)`` independent ``b x b`` blocks ``F D_t``.

    Inputs are zero-padded to ``padded_dim`` and outputs live on the padded
    space, where ``G`` is orthogonal.
    """

    b: int
    d: int
    diag_src: SeededSource

    def __post_init__(self) -> None:
        if not is_pow2(self.b):
            raise ValueError(f"block size must be a power of two, got {self.b}")
        if self.d < 1:
            raise ValueError("d must be positive")

    @classmethod
    def from_seed(cls, b: int, d: int, seed: int) -> "BlockHadamard":
        return cls(b, d, SeededSource(seed, Tag.HG_DIAGONAL))

    @property
    def num_blocks(self) -> int:
        return -(-self.d // self.b)

    @property
    def padded_dim(self) -> int:
        return self.num_blocks * self.b

    def diagonal(self, blocks) -> np.ndarray:
        """``D`` entries for each listed block, shape ``(len(blocks), b)``."""
        blocks = np.asarray(blocks, dtype=np.int64)
        idx = (blocks[:, None] * self.b + np.arange(self.b)).reshape(-1)
        return self.diag_src.fast_signs(idx).reshape(blocks.shape[0], self.b)

    def _transform(self, blocks: np.ndarray, mat: np.ndarray) -> np.ndarray:
        mat *= self.diagonal(blocks)
        _kernels.fwht_rows(mat)
        mat *= 1.0 / math.sqrt(self.b)
        return mat

    def apply_blocks(self, x, dense: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Transform only the blocks that hold a nonzero (all blocks if ``dense``).

        Returns the block ids and a ``(len(ids), b)`` array of transformed blocks.
        """
        x = as_sparse(x, self.d)
        if dense:
            blocks = np.arange(self.num_blocks)
        else:
            present = np.zeros(self.num_blocks, dtype=bool)
            present[x.indices // self.b] = True
            blocks = np.flatnonzero(present)
        slot = np.full(self.num_blocks, -1, dtype=np.int64)
        slot[blocks] = np.arange(blocks.shape[0])
        mat = np.zeros((blocks.shape[0], self.b))
        _kernels.block_scatter(x.indices, x.values, self.b, slot, mat)
        return blocks, self._transform(blocks, mat)

    def apply(self, x, dense: bool = False) -> np.ndarray:
        """``G x`` as a dense vector of length ``padded_dim``."""
        blocks, mat = self.apply_blocks(x, dense)
        out = np.zeros((self.num_blocks, self.b))
        out[blocks] = mat
        return out.reshape(-1)

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Support and values of ``G e_j``: one Hadamard column times ``D_jj``."""
        if not 0 <= j < self.d:
            raise IndexError(f"column {j} out of range [0, {self.d})")
        t, local = divmod(j, self.b)
        rows = t * self.b + np.arange(self.b)
        col = (1.0 - 2.0 * parity(np.arange(self.b, dtype=np.uint64) & np.uint64(local))) / math.sqrt(self.b)
        return rows, col * self.diag_src.sign_at(j)


def block_apply(G: BlockHadamard, x, dense: bool = False) -> np.ndarray:
    return G.apply(x, dense)


@dataclass(frozen=True)
class BucketStats:
    sigmas: np.ndarray
    sigma_star_sq: float
    good_flags: np.ndarray

    @property
    def good(self) -> bool:
        """The hash is good when every bucket is."""
        return bool(self.good_flags.all())


def bucket_stats(H: HashProjection, x, sigma_star_sq: float) -> BucketStats:
    """Per-bucket mass ``sum_{h(j)=i} x_j**2`` and the goodness flags."""
    x = as_sparse(x, H.dim).coalesce()
    rows = H.bucket_src.fast_buckets(x.indices, H.k) if type(H.bucket_src) is SeededSource \
        else H.bucket_src.buckets(x.indices, H.k)
    sig = np.bincount(rows, weights=x.values**2, minlength=H.k).astype(np.float64)
    return BucketStats(sig, float(sigma_star_sq), sig <= sigma_star_sq)
