"""Constants of the sparse JL construction, derived from ``(epsilon, delta)``.

All logarithms are natural. Integer sizes are rounded up: ``k`` and ``c`` to
the next integer, the Hadamard block ``b`` to the next power of two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

DEFAULT_SEED = 20100605


class ParameterError(ValueError):
    """An input lies outside the domain the construction is defined on."""


def _next_pow2(x: float) -> int:
    b = 1
    while b < x:
        b <<= 1
    return b


def target_dim(epsilon: float, delta: float) -> int:
    return math.ceil(12.0 / epsilon**2 * math.log(1.0 / delta))


def replication_factor(epsilon: float, delta: float, k: int) -> int:
    return math.ceil(16.0 / epsilon * math.log(1.0 / delta) * math.log(k / delta) ** 2)


def hadamard_threshold(c: int, delta: float) -> float:
    """``6 c ln(3c/delta)``: minimum block size, and the bound ``d`` must exceed for HG."""
    return 6.0 * c * math.log(3.0 * c / delta)


@dataclass(frozen=True)
class JLParams:
    epsilon: float
    delta: float
    d: int
    seed: int
    k: int
    c: int
    alpha: float
    sigma_star_sq: float
    b: int

    def to_record(self) -> str:
        return "".join(f"{f.name}={_fmt(getattr(self, f.name))}\n" for f in fields(self))

    @classmethod
    def from_record(cls, text: str) -> "JLParams":
        raw = dict(line.split("=", 1) for line in text.splitlines() if "=" in line)
        p = derive_params(float(raw["epsilon"]), float(raw["delta"]), int(raw["d"]), int(raw["seed"]))
        for name in ("k", "c", "b"):
            if name in raw and int(raw[name]) != getattr(p, name):
                raise ParameterError(f"record field {name}={raw[name]} disagrees with derived value {getattr(p, name)}")
        return p


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def check_domain(epsilon: float, delta: float, d: int = 1) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must satisfy 0 < epsilon < 1, got {epsilon}")
    if not 0.0 < delta < 0.1:
        raise ParameterError(f"delta must satisfy 0 < delta < 1/10, got {delta}")
    if d < 1:
        raise ParameterError(f"dimension d must be >= 1, got {d}")


def derive_params(epsilon: float, delta: float, d: int, seed: int = DEFAULT_SEED) -> JLParams:
    """Derive every constant of the construction.

    Raises :class:`ParameterError` when ``epsilon`` is outside ``(0, 1)``,
    ``delta`` outside ``(0, 1/10)``, ``d < 1`` or ``seed`` is not a 64-bit
    unsigned integer.
    """
    check_domain(epsilon, delta, d)
    if not 0 <= seed < 2**64:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    k = target_dim(epsilon, delta)
    c = replication_factor(epsilon, delta, k)
    alpha = 1.0 / (epsilon * math.log(k / delta))
    return JLParams(
        epsilon=float(epsilon),
        delta=float(delta),
        d=int(d),
        seed=int(seed),
        k=k,
        c=c,
        alpha=alpha,
        sigma_star_sq=(1.0 + alpha) / k,
        b=_next_pow2(hadamard_threshold(c, delta)),
    )


@dataclass(frozen=True)
class AssumptionWarning:
    code: str
    message: str

    def __str__(self) -> str:
        return f"warning[{self.code}]: {self.message}"


def validate_assumptions(p: JLParams) -> list[AssumptionWarning]:
    """Non-fatal checks of the assumptions the guarantees are proved under."""
    out = []
    if p.alpha < 3.0:
        out.append(AssumptionWarning(
            "alpha",
            f"alpha={p.alpha!r} < 3; the goodness bound is proved only for alpha >= 3 "
            "(the construction still runs)",
        ))
    thr = hadamard_threshold(p.c, p.delta)
    if p.d <= thr:
        out.append(AssumptionWarning(
            "hg-dimension",
            f"d={p.d} <= 6c ln(3c/delta)={thr!r}; the block-Hadamard path is unavailable",
        ))
    if p.delta >= 1.0 / p.k**2:
        out.append(AssumptionWarning(
            "delta-vs-k",
            f"delta={p.delta!r} >= 1/k^2={1.0 / p.k**2!r}; the tail argument that needs delta < 1/k^2 does not apply",
        ))
    return out
