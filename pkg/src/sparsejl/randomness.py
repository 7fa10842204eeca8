"""Deterministic, index-addressable random streams.

A :class:`SeededSource` turns ``(master_seed, domain_tag, index)`` into a 64-bit
word with the SplitMix64 finalizer, so the hash function ``h`` and the signs
``r`` of a projection are evaluated on demand and never stored. The outputs
are a pseudorandom stand-in for fully independent random functions; they carry
no cryptographic or k-wise independence guarantee.

Three evaluation paths exist and agree exactly on integers: scalar (Python
ints, used as the reference), vectorized NumPy, and the compiled kernels in
:mod:`sparsejl._kernels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from sparsejl import _kernels

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


class Tag(IntEnum):
    """Domain tags separating the independent streams derived from one seed."""

    PHI_SIGNS = 1
    PHI_BUCKETS = 2
    HG_SIGNS = 3
    HG_BUCKETS = 4
    HG_DIAGONAL = 5
    L1_GAUSSIANS = 6
    L1_BUCKETS = 7
    TRIAL_SCHEDULE = 8


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int, reduced mod 2**64."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(master_seed: int, domain_tag: int) -> int:
    return mix64((master_seed & MASK64) ^ mix64((domain_tag + 1) * GOLDEN))


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _as_index_array(idx) -> np.ndarray:
    arr = np.asarray(idx)
    if arr.size and arr.min() < 0:
        raise IndexError("stream indices must be non-negative")
    return arr.astype(np.uint64)


@dataclass(frozen=True)
class SeededSource:
    """One independent stream of 64-bit words keyed by ``(master_seed, domain_tag)``."""

    master_seed: int
    domain_tag: int
    key: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        object.__setattr__(self, "key", stream_key(self.master_seed, int(self.domain_tag)))

    # scalar reference path

    def raw_at(self, j: int) -> int:
        return mix64(self.key + (j + 1) * GOLDEN)

    def sign_at(self, j: int) -> int:
        return -1 if self.raw_at(j) >> 63 else 1

    def bucket_at(self, j: int, k: int) -> int:
        if k < 1:
            raise ValueError("k must be positive")
        return (self.raw_at(j) * k) >> 64

    def uniform_pair_at(self, j: int) -> tuple[float, float]:
        a = self.raw_at(2 * j)
        b = self.raw_at(2 * j + 1)
        return ((a >> 11) + 1) * 2.0**-53, (b >> 11) * 2.0**-53

    def gaussian_at(self, j: int) -> float:
        """Box-Muller on the two words at ``2j`` and ``2j+1``; no rejection step."""
        u1, u2 = self.uniform_pair_at(j)
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    # vectorized paths

    def raw(self, idx) -> np.ndarray:
        j = _as_index_array(idx)
        with np.errstate(over="ignore"):
            return _mix64_np(np.uint64(self.key) + (j + np.uint64(1)) * np.uint64(GOLDEN))

    def signs(self, idx) -> np.ndarray:
        """Float64 array of +-1, NumPy path."""
        return np.where(self.raw(idx) >> np.uint64(63), -1.0, 1.0)

    def buckets(self, idx, k: int) -> np.ndarray:
        """Int64 bucket ids in ``[0, k)``, NumPy path."""
        if not 1 <= k < 2**32:
            raise ValueError("k must lie in [1, 2**32)")
        v = self.raw(idx)
        kk = np.uint64(k)
        hi = v >> np.uint64(32)
        lo = v & np.uint64(0xFFFFFFFF)
        with np.errstate(over="ignore"):
            return ((hi * kk + ((lo * kk) >> np.uint64(32))) >> np.uint64(32)).astype(np.int64)

    def gaussians(self, idx) -> np.ndarray:
        j = _as_index_array(idx)
        a = self.raw(np.uint64(2) * j)
        b = self.raw(np.uint64(2) * j + np.uint64(1))
        u1 = ((a >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u2 = (b >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    # compiled paths, used on hot loops

    def fast_signs(self, idx) -> np.ndarray:
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        out = np.empty(idx.shape[0], dtype=np.float64)
        _kernels.signs_into(np.uint64(self.key), idx, out)
        return out

    def fast_buckets(self, idx, k: int) -> np.ndarray:
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        out = np.empty(idx.shape[0], dtype=np.int64)
        _kernels.buckets_into(np.uint64(self.key), idx, k, out)
        return out

    def fast_gaussians(self, idx) -> np.ndarray:
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        out = np.empty(idx.shape[0], dtype=np.float64)
        _kernels.gaussians_into(np.uint64(self.key), idx, out)
        return out


def trial_seed(schedule_seed: int, t: int) -> int:
    """Master seed of Monte Carlo trial ``t``; independent of execution order."""
    return SeededSource(schedule_seed, Tag.TRIAL_SCHEDULE).raw_at(t)
