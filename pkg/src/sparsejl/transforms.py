"""User-facing transforms.

* :class:`SparseJL` -- ``Phi = H' P``: replicate, then hash. ``c`` nonzeros per column.
* :class:`HadamardJL` -- ``H G``: block randomized Hadamard, then hash.
* :class:`L1Embed` -- replicate, then hash with Gaussian weights; estimates the
  l2 norm from the l1 norm of the sketch.

All three are immutable, linear, and a pure function of their sizes and the
master seed. They share the interface used by :class:`~sparsejl.hashing.Sketch`
(``k``, ``dim``, ``identity``, ``column``, ``apply``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from sparsejl import _kernels
from sparsejl.hashing import HashProjection, Sketch
from sparsejl.params import JLParams, ParameterError, hadamard_threshold
from sparsejl.preconditioners import BlockHadamard, ReplicationPlan
from sparsejl.randomness import SeededSource, Tag
from sparsejl.vectors import SparseVector, as_sparse

BETA0 = math.sqrt(2.0 / math.pi)


class HadamardPreconditionError(ParameterError):
    """``d`` is too small for the block-Hadamard guarantee."""


@dataclass(frozen=True)
class SparseJL:
    k: int
    c: int
    d: int
    seed: int
    H_prime: HashProjection = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "H_prime", HashProjection.from_seed(
            self.k, self.c * self.d, self.seed, Tag.PHI_SIGNS, Tag.PHI_BUCKETS))

    @classmethod
    def from_params(cls, p: JLParams) -> "SparseJL":
        return cls(p.k, p.c, p.d, p.seed)

    @property
    def plan(self) -> ReplicationPlan:
        return ReplicationPlan(self.c, self.d)

    @property
    def dim(self) -> int:
        return self.d

    @property
    def identity(self) -> tuple:
        return ("phi", self.k, self.c, self.d, self.seed)

    def replica_columns(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Rows and +-1 signs of the ``c`` replicas of column ``j``, before summation."""
        return self.H_prime.rows_weights(j * self.c + np.arange(self.c))

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        if not 0 <= j < self.d:
            raise IndexError(f"column {j} out of range [0, {self.d})")
        rows, signs = self.replica_columns(j)
        return rows, signs / math.sqrt(self.c)

    def apply(self, x) -> np.ndarray:
        x = as_sparse(x, self.d)
        out = np.zeros(self.k)
        H = self.H_prime
        if type(H.sign_src) is SeededSource and type(H.bucket_src) is SeededSource:
            _kernels.replicated_scatter(np.uint64(H.sign_src.key), np.uint64(H.bucket_src.key),
                                        self.k, self.c, x.indices, x.values, out)
            return out
        return H.apply_sparse(self.plan.replicate(x))

    def cost(self, x) -> int:
        return self.c * as_sparse(x, self.d).nnz


@dataclass(frozen=True)
class HadamardJL:
    """``H G`` with ``H`` acting on the zero-padded space of ``G``.

    The plain constructor accepts any power-of-two ``b`` and performs no
    dimension check; :meth:`from_params` is the guaranteed path and refuses
    ``d <= 6 c ln(3c/delta)``.
    """

    k: int
    b: int
    d: int
    seed: int
    G: BlockHadamard = field(init=False, repr=False)
    H: HashProjection = field(init=False, repr=False)

    def __post_init__(self) -> None:
        G = BlockHadamard.from_seed(self.b, self.d, self.seed)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "H", HashProjection.from_seed(
            self.k, G.padded_dim, self.seed, Tag.HG_SIGNS, Tag.HG_BUCKETS))

    @classmethod
    def from_params(cls, p: JLParams) -> "HadamardJL":
        thr = hadamard_threshold(p.c, p.delta)
        if not p.d > thr:
            raise HadamardPreconditionError(
                f"block-Hadamard transform needs d > 6c ln(3c/delta) = {thr:.1f}, got d={p.d}")
        return cls(p.k, p.b, p.d, p.seed)

    @property
    def dim(self) -> int:
        return self.d

    @property
    def identity(self) -> tuple:
        return ("hg", self.k, self.b, self.d, self.seed)

    def intermediate(self, x, dense: bool = False) -> np.ndarray:
        """``G x`` on the padded space."""
        return self.G.apply(x, dense)

    def apply(self, x, dense: bool = False) -> np.ndarray:
        blocks, mat = self.G.apply_blocks(x, dense)
        idx = (blocks[:, None] * self.b + np.arange(self.b)).reshape(-1)
        return self.H.apply_sparse(SparseVector(self.G.padded_dim, idx, mat.reshape(-1)))

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        support, g = self.G.column(j)
        rows, signs = self.H.rows_weights(support)
        return rows, signs * g

    def cost(self, x) -> float:
        return hg_cost(self.b, as_sparse(x, self.d))


@dataclass(frozen=True)
class L1Embed:
    """Replicate by ``c``, then hash with N(0, 1) weights.

    ``c`` here is its own replication factor (``k / epsilon`` in
    :meth:`from_params`), not the one used by :class:`SparseJL`.
    """

    k: int
    c: int
    d: int
    seed: int
    beta0: float = BETA0
    H_gauss: HashProjection = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "H_gauss", HashProjection.from_seed(
            self.k, self.c * self.d, self.seed, Tag.L1_GAUSSIANS, Tag.L1_BUCKETS, gaussian=True))

    @classmethod
    def from_params(cls, p: JLParams) -> "L1Embed":
        return cls(p.k, math.ceil(p.k / p.epsilon), p.d, p.seed)

    @property
    def plan(self) -> ReplicationPlan:
        return ReplicationPlan(self.c, self.d)

    @property
    def dim(self) -> int:
        return self.d

    @property
    def identity(self) -> tuple:
        return ("l1", self.k, self.c, self.d, self.seed)

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        if not 0 <= j < self.d:
            raise IndexError(f"column {j} out of range [0, {self.d})")
        rows, g = self.H_gauss.rows_weights(j * self.c + np.arange(self.c))
        return rows, g / math.sqrt(self.c)

    def apply(self, x) -> np.ndarray:
        """The sketch ``Y`` whose entries are ``N(0, sigma_i)`` given the hash."""
        x = as_sparse(x, self.d)
        out = np.zeros(self.k)
        H = self.H_gauss
        _kernels.replicated_gauss_scatter(np.uint64(H.sign_src.key), np.uint64(H.bucket_src.key),
                                          self.k, self.c, x.indices, x.values, out)
        return out

    def estimate_from(self, y: np.ndarray) -> float:
        return float(np.abs(y).sum() / (self.beta0 * math.sqrt(self.k)))

    def estimate(self, x) -> float:
        return self.estimate_from(self.apply(x))


def phi_apply(t: SparseJL, x) -> np.ndarray:
    return t.apply(x)


def hg_apply(t: HadamardJL, x, dense: bool = False) -> np.ndarray:
    return t.apply(x, dense)


def l1_estimate(t: L1Embed, x) -> float:
    return t.estimate(x)


def hg_cost(b: int, x: SparseVector) -> float:
    """Operation count of HG: ``b log b`` per touched block plus ``b`` hash evaluations."""
    nb = np.unique(x.indices // b).size
    return nb * b * (math.log2(b) + 1.0)


def hg_available(p: JLParams) -> bool:
    return p.d > hadamard_threshold(p.c, p.delta)


def auto_apply(p: JLParams, x) -> tuple[np.ndarray, str]:
    """Apply whichever of ``Phi`` and ``HG`` has the lower operation count.

    Returns the output and the path taken: ``"phi"``, ``"hg"``, or
    ``"phi-fallback"`` when HG would be cheaper but ``d`` is too small for it.
    """
    x = as_sparse(x, p.d)
    phi = SparseJL.from_params(p)
    if phi.cost(x) <= hg_cost(p.b, x):
        return phi.apply(x), "phi"
    if not hg_available(p):
        return phi.apply(x), "phi-fallback"
    return HadamardJL.from_params(p).apply(x), "hg"


def make_transform(path: str, p: JLParams):
    if path == "phi":
        return SparseJL.from_params(p)
    if path == "hg":
        return HadamardJL.from_params(p)
    if path == "l1":
        return L1Embed.from_params(p)
    raise ValueError(f"unknown path {path!r}; expected phi, hg or l1")


def new_sketch(path: str, p: JLParams) -> Sketch:
    return Sketch(make_transform(path, p))
