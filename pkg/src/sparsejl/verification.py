"""Oracles and Monte Carlo checks of the probabilistic guarantees.

Dense oracles are built from the definitions of each matrix using the scalar
or NumPy evaluation paths of :mod:`sparsejl.randomness`, never the compiled
kernels, so that fast-path equivalence tests compare two independent routes.

Every Monte Carlo estimator redraws the transform each trial (fixed input,
fresh seed). Trial seeds come from :func:`~sparsejl.randomness.trial_seed`, so
a report is a pure function of its arguments.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from sparsejl.hashing import HashProjection
from sparsejl.params import JLParams, hadamard_threshold
from sparsejl.preconditioners import BlockHadamard, ReplicationPlan, bucket_stats, hadamard_matrix
from sparsejl.randomness import trial_seed
from sparsejl.transforms import HadamardJL, HadamardPreconditionError, L1Embed, SparseJL
from sparsejl.vectors import SparseVector, as_sparse

DENSE_CAP = 256
DEFAULT_SCHEDULE_SEED = 0x5EED
FAMILIES = ("sphere", "e1", "heavy", "flat", "zero")
PATHS = ("phi", "hg", "h")


class OracleCapExceeded(ValueError):
    pass


# dense oracles

def _check_cap(d: int, cap: int) -> None:
    if d > cap:
        raise OracleCapExceeded(f"dense oracle limited to d <= {cap}, got {d}")


def _dense_hash(H: HashProjection, scalar: bool = False) -> np.ndarray:
    M = np.zeros((H.k, H.dim))
    if scalar:
        for j in range(H.dim):
            row, w = H.column_of(j)
            M[row, j] = w
        return M
    j = np.arange(H.dim)
    w = H.sign_src.gaussians(j) if H.gaussian else H.sign_src.signs(j)
    M[H.bucket_src.buckets(j, H.k), j] = w
    return M


def _dense_replicated(H: HashProjection, c: int, d: int) -> np.ndarray:
    # column j of H P sums the c replica columns j*c .. j*c + c - 1 of H, each scaled by 1/sqrt(c)
    slots = np.arange(c * d)
    w = H.sign_src.gaussians(slots) if H.gaussian else H.sign_src.signs(slots)
    M = np.zeros((H.k, d))
    np.add.at(M, (H.bucket_src.buckets(slots, H.k), slots // c), w / math.sqrt(c))
    return M


def dense_block_hadamard(G: BlockHadamard) -> np.ndarray:
    """``G`` as a ``padded_dim x d`` matrix, from the bit-parity formula."""
    F = hadamard_matrix(G.b)
    M = np.zeros((G.padded_dim, G.padded_dim))
    for t in range(G.num_blocks):
        s = slice(t * G.b, (t + 1) * G.b)
        D = G.diag_src.signs(np.arange(t * G.b, (t + 1) * G.b))
        M[s, s] = F * D[None, :]
    return M[:, :G.d]


def dense_matrix_of(transform, cap: int = DENSE_CAP) -> np.ndarray:
    """Explicit matrix of a transform, built entry by entry from its definition."""
    if isinstance(transform, HashProjection):
        _check_cap(transform.dim, cap)
        return _dense_hash(transform, scalar=True)
    if isinstance(transform, SparseJL):
        _check_cap(transform.d, cap)
        return _dense_replicated(transform.H_prime, transform.c, transform.d)
    if isinstance(transform, L1Embed):
        _check_cap(transform.d, cap)
        return _dense_replicated(transform.H_gauss, transform.c, transform.d)
    if isinstance(transform, HadamardJL):
        _check_cap(transform.d, cap)
        _check_cap(transform.G.padded_dim, 16 * cap)
        return _dense_hash(transform.H) @ dense_block_hadamard(transform.G)
    if isinstance(transform, BlockHadamard):
        _check_cap(transform.d, cap)
        return dense_block_hadamard(transform)
    raise TypeError(f"no dense oracle for {type(transform).__name__}")


# reports

@dataclass(frozen=True)
class DistortionReport:
    label: str
    trials: int
    failures: int
    skipped: int
    bound: float
    params_echo: JLParams | None = None
    max_deviation: float = 0.0

    @property
    def successes(self) -> int:
        return self.trials - self.failures - self.skipped

    @property
    def empirical_rate(self) -> float:
        return self.failures / self.trials

    @property
    def passed(self) -> bool:
        return self.empirical_rate <= self.bound

    def to_record(self) -> str:
        lines = [
            f"report={self.label}",
            f"trials={self.trials}",
            f"failures={self.failures}",
            f"skipped={self.skipped}",
            f"successes={self.successes}",
            f"empirical_rate={self.empirical_rate!r}",
            f"bound={self.bound!r}",
            f"max_deviation={self.max_deviation!r}",
            f"passed={'true' if self.passed else 'false'}",
        ]
        if self.params_echo is not None:
            lines += [f"params.{ln}" for ln in self.params_echo.to_record().splitlines()]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ColumnIntersectionReport:
    pairs_sampled: int
    max_intersection: int
    threshold_z: float
    c: int

    def to_record(self) -> str:
        return (f"report=column-intersection\npairs_sampled={self.pairs_sampled}\n"
                f"max_intersection={self.max_intersection}\nthreshold_z={self.threshold_z!r}\nc={self.c}\n")


# vector families

def family_vector(family: str, d: int, rng: np.random.Generator) -> np.ndarray:
    """Unit test vectors. ``heavy`` puts half the mass on one coordinate."""
    if family == "sphere":
        x = rng.standard_normal(d)
        return x / np.linalg.norm(x)
    if family == "e1":
        x = np.zeros(d)
        x[0] = 1.0
        return x
    if family == "heavy":
        noise = rng.standard_normal(d)
        noise[0] = 0.0
        if d > 1:
            noise *= math.sqrt(0.5) / np.linalg.norm(noise)
        x = noise
        x[0] = math.sqrt(0.5) if d > 1 else 1.0
        return x / np.linalg.norm(x)
    if family == "zero":
        return np.zeros(d)
    raise ValueError(f"unknown vector family {family!r}; expected one of {FAMILIES}")


def estimate_failure_rate(params: JLParams, path: str, trials: int, family: str,
                          schedule_seed: int = DEFAULT_SCHEDULE_SEED) -> DistortionReport:
    """Fraction of fresh-seed trials whose squared norm misses ``(1 +- eps) |x|^2``.

    ``path`` is ``"phi"``, ``"hg"`` or ``"h"``. The ``h`` path hashes a
    preconditioned input: family ``"flat"`` is ``x = P u`` with ``u`` uniform on
    the sphere of dimension ``d``, so ``H`` acts on dimension ``c d``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if path not in PATHS:
        raise ValueError(f"unknown path {path!r}; expected one of {PATHS}")
    if path == "h" and family not in ("flat", "zero"):
        raise ValueError("the h path needs a preconditioned family: 'flat' or 'zero'")
    if path != "h" and family == "flat":
        raise ValueError("family 'flat' is only defined for the h path")
    if path == "hg" and not params.d > hadamard_threshold(params.c, params.delta):
        raise HadamardPreconditionError(
            f"hg path needs d > {hadamard_threshold(params.c, params.delta):.1f}, got d={params.d}")

    rng = np.random.default_rng(schedule_seed)
    if family == "flat":
        u = family_vector("sphere", params.d, rng)
        x = as_sparse(ReplicationPlan(params.c, params.d).replicate(SparseVector.from_dense(u)))
    else:
        x = SparseVector.from_dense(family_vector(family, params.d, rng))
    norm_sq = float(np.dot(x.values, x.values))

    failures = skipped = 0
    worst = 0.0
    for t in range(trials):
        if norm_sq == 0.0:
            skipped += 1
            continue
        seed = trial_seed(schedule_seed, t)
        if path == "phi":
            y = SparseJL(params.k, params.c, params.d, seed).apply(x)
        elif path == "hg":
            y = HadamardJL(params.k, params.b, params.d, seed).apply(x)
        else:
            y = HashProjection.from_seed(params.k, x.dim, seed).apply_sparse(x)
        dev = abs(float(np.dot(y, y)) - norm_sq) / norm_sq
        worst = max(worst, dev)
        failures += dev > params.epsilon
    return DistortionReport(f"distortion/{path}/{family}", trials, failures, skipped,
                            4.0 * params.delta, params, worst)


def goodness_rate(params: JLParams, trials: int,
                  schedule_seed: int = DEFAULT_SCHEDULE_SEED) -> DistortionReport:
    """Fraction of hash functions with a bucket above ``sigma_star_sq`` for ``x = P u``.

    ``u`` is a fresh uniform unit vector of dimension ``params.d`` every trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(schedule_seed)
    plan = ReplicationPlan(params.c, params.d)
    bad = 0
    worst = 0.0
    for t in range(trials):
        u = family_vector("sphere", params.d, rng)
        x = plan.replicate(SparseVector.from_dense(u))
        H = HashProjection.from_seed(params.k, plan.out_dim, trial_seed(schedule_seed, t))
        st = bucket_stats(H, x, params.sigma_star_sq)
        worst = max(worst, float(st.sigmas.max() / params.sigma_star_sq))
        bad += not st.good
    return DistortionReport("goodness", trials, bad, 0, params.delta, params, worst)


def _infnorm_trials(b: int, d: int, c: int, x: SparseVector, trials: int,
                    schedule_seed: int) -> tuple[int, float]:
    thr = 1.0 / math.sqrt(c)
    hits = 0
    worst = 0.0
    for t in range(trials):
        G = BlockHadamard.from_seed(b, d, trial_seed(schedule_seed, t))
        _, mat = G.apply_blocks(x)
        m = float(np.abs(mat).max()) if mat.size else 0.0
        worst = max(worst, m)
        hits += m >= thr
    return hits, worst


def infnorm_tail_rate(params: JLParams, trials: int, x,
                      schedule_seed: int = DEFAULT_SCHEDULE_SEED) -> DistortionReport:
    """Fraction of seeds with ``|G x|_inf >= 1/sqrt(c)`` for a fixed unit ``x``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    thr = hadamard_threshold(params.c, params.delta)
    if not params.d > thr:
        raise HadamardPreconditionError(f"needs d > 6c ln(3c/delta) = {thr:.1f}, got d={params.d}")
    x = as_sparse(x, params.d)
    if not math.isclose(float(np.dot(x.values, x.values)), 1.0, rel_tol=1e-9):
        raise ValueError("x must be a unit vector")
    hits, worst = _infnorm_trials(params.b, params.d, params.c, x, trials, schedule_seed)
    return DistortionReport("infnorm-tail", trials, hits, 0, params.delta, params, worst)


def bucket_z_values(H: HashProjection, x) -> np.ndarray:
    """Per-bucket cross-term error ``Z_i = Y_i**2 - sigma_i**2``."""
    x = as_sparse(x, H.dim)
    y = H.apply_sparse(x)
    return y**2 - bucket_stats(H, x, math.inf).sigmas


def column_supports(t: SparseJL, cap: int = DENSE_CAP) -> list[frozenset]:
    """Row support of each column of ``Phi``, taken over the replicas before summation."""
    _check_cap(t.d, cap)
    rows = t.H_prime.bucket_src.buckets(np.arange(t.c * t.d), t.k).reshape(t.d, t.c)
    return [frozenset(r.tolist()) for r in rows]


def max_intersection(supports, pairs) -> int:
    return max((len(supports[i] & supports[j]) for i, j in pairs), default=0)


def max_column_intersection(t: SparseJL, pairs: int, epsilon: float, seed: int = 0,
                            cap: int = DENSE_CAP) -> ColumnIntersectionReport:
    """Largest ``|C_i & C_j|`` over sampled column pairs, next to ``16 eps^2 c^2``.

    All pairs are used when ``pairs`` covers them; otherwise pairs are sampled
    with a generator seeded by ``seed``.
    """
    supports = column_supports(t, cap)
    everything = list(itertools.combinations(range(t.d), 2))
    if pairs >= len(everything):
        chosen = everything
    else:
        rng = np.random.default_rng(seed)
        chosen = [everything[i] for i in rng.choice(len(everything), size=pairs, replace=False)]
    return ColumnIntersectionReport(len(chosen), max_intersection(supports, chosen),
                                    16.0 * epsilon**2 * t.c**2, t.c)


@dataclass(frozen=True)
class L1Report:
    """Estimator mean against its conditional expectation, and ``E|Y_i| / sigma_i``."""

    trials: int
    mean_estimate: float
    mean_theory: float
    abs_ratio: float
    bucket0_abs_ratio: float
    mean_tol: float = 0.05
    ratio_tol: float = 0.02

    @property
    def mean_gap(self) -> float:
        return abs(self.mean_estimate / self.mean_theory - 1.0)

    @property
    def ratio_gap(self) -> float:
        return abs(self.abs_ratio / math.sqrt(2.0 / math.pi) - 1.0)

    @property
    def passed(self) -> bool:
        return self.mean_gap <= self.mean_tol and self.ratio_gap <= self.ratio_tol

    def to_record(self) -> str:
        return (f"report=l1\ntrials={self.trials}\nmean_estimate={self.mean_estimate!r}\n"
                f"mean_theory={self.mean_theory!r}\nmean_gap={self.mean_gap!r}\n"
                f"abs_ratio={self.abs_ratio!r}\nbucket0_abs_ratio={self.bucket0_abs_ratio!r}\n"
                f"ratio_gap={self.ratio_gap!r}\npassed={'true' if self.passed else 'false'}\n")


def l1_property_check(params: JLParams, trials: int,
                      schedule_seed: int = DEFAULT_SCHEDULE_SEED) -> L1Report:
    """Fixed random unit ``x``, fresh seed per trial, replication ``c = ceil(k / eps)``.

    ``mean_theory`` averages ``sum_i sigma_i / sqrt(k)`` over the realized
    hashes; ``abs_ratio`` pools ``|Y_i| / sigma_i`` over all nonempty buckets.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(schedule_seed)
    x = SparseVector.from_dense(family_vector("sphere", params.d, rng))
    c = math.ceil(params.k / params.epsilon)
    plan = ReplicationPlan(c, params.d)
    px = plan.replicate(x)
    est = theory = ratio_sum = b0_sum = 0.0
    ratio_n = b0_n = 0
    for t in range(trials):
        emb = L1Embed(params.k, c, params.d, trial_seed(schedule_seed, t))
        y = emb.apply(x)
        sig = np.sqrt(bucket_stats(emb.H_gauss, px, math.inf).sigmas)
        est += emb.estimate_from(y)
        theory += float(sig.sum()) / math.sqrt(params.k)
        nz = sig > 0
        ratio_sum += float((np.abs(y[nz]) / sig[nz]).sum())
        ratio_n += int(nz.sum())
        if sig[0] > 0:
            b0_sum += abs(y[0]) / sig[0]
            b0_n += 1
    return L1Report(trials, est / trials, theory / trials, ratio_sum / ratio_n,
                    b0_sum / b0_n if b0_n else math.nan)
