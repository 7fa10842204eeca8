"""Wall-clock measurements of the fast paths."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from sparsejl.transforms import HadamardJL, SparseJL
from sparsejl.vectors import SparseVector


@dataclass(frozen=True)
class Timing:
    path: str
    d: int
    nnz: int
    seconds: float

    @property
    def per_nonzero(self) -> float:
        return self.seconds / max(self.nnz, 1)


def random_sparse(d: int, nnz: int, seed: int = 0) -> SparseVector:
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(d, size=nnz, replace=False))
    return SparseVector(d, idx, rng.standard_normal(nnz))


def _best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def time_phi(k: int, c: int, d: int, nnz: int, seed: int = 0, repeats: int = 3) -> Timing:
    """Best-of-``repeats`` time of one ``Phi x`` with ``nnz`` random nonzeros."""
    t = SparseJL(k, c, d, seed)
    x = random_sparse(d, nnz, seed)
    t.apply(random_sparse(d, 1, seed))  # compile outside the timed region
    return Timing("phi", d, nnz, _best_of(lambda: t.apply(x), repeats))


def time_hg(k: int, b: int, d: int, seed: int = 0, repeats: int = 3) -> Timing:
    """Best-of-``repeats`` time of one ``H G x`` on a fully dense ``x``."""
    t = HadamardJL(k, b, d, seed)
    x = SparseVector.from_dense(np.random.default_rng(seed).standard_normal(d))
    t.apply(random_sparse(d, 1, seed))
    return Timing("hg", d, x.nnz, _best_of(lambda: t.apply(x), repeats))
