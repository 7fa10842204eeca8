"""Text formats read and written by the command line.

Vector files::

    sparse <d>              dense <d>
    <index> <value>         <v0> <v1> ...   (d reals, any line breaks)
    ...

Indices are 0-based. Sparse files may repeat an index; repeats are summed.
Reals are written with ``repr`` so every value round-trips exactly.

A sketch record is a block of ``name=value`` lines that carries enough to
rebuild the projection (path, epsilon, delta, d, seed) plus the accumulator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sparsejl.hashing import Sketch
from sparsejl.params import derive_params
from sparsejl.transforms import L1Embed, make_transform
from sparsejl.vectors import SparseVector


class FormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_real(tok: str, line: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise FormatError(line, f"not a real number: {tok!r}") from None
    if not math.isfinite(v):
        raise FormatError(line, f"non-finite value: {tok!r}")
    return v


def _parse_index(tok: str, line: int, dim: int) -> int:
    try:
        j = int(tok)
    except ValueError:
        raise FormatError(line, f"not an integer index: {tok!r}") from None
    if not 0 <= j < dim:
        raise FormatError(line, f"index {j} out of range [0, {dim})")
    return j


def parse_header(line: str, lineno: int = 1) -> tuple[str, int]:
    parts = line.split()
    if len(parts) != 2 or parts[0] not in ("sparse", "dense"):
        raise FormatError(lineno, "header must be 'sparse <d>' or 'dense <d>'")
    try:
        d = int(parts[1])
    except ValueError:
        raise FormatError(lineno, f"bad dimension {parts[1]!r}") from None
    if d < 1:
        raise FormatError(lineno, "dimension must be positive")
    return parts[0], d


def parse_vector(text: str) -> SparseVector:
    lines = text.splitlines()
    if not lines:
        raise FormatError(1, "empty file")
    kind, d = parse_header(lines[0])
    if kind == "sparse":
        idx, val = [], []
        for n, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise FormatError(n, "expected '<index> <value>'")
            idx.append(_parse_index(parts[0], n, d))
            val.append(_parse_real(parts[1], n))
        return SparseVector(d, np.array(idx, dtype=np.int64), np.array(val, dtype=np.float64))
    vals = [_parse_real(tok, n) for n, ln in enumerate(lines[1:], start=2) for tok in ln.split()]
    if len(vals) != d:
        raise FormatError(len(lines), f"dense header declares {d} values, found {len(vals)}")
    return SparseVector.from_dense(np.array(vals))


def read_vector(path: str) -> SparseVector:
    with open(path) as fh:
        return parse_vector(fh.read())


def format_dense(y: np.ndarray) -> str:
    return f"dense {y.shape[0]}\n" + "".join(f"{float(v)!r}\n" for v in y)


def format_sparse(x: SparseVector) -> str:
    return f"sparse {x.dim}\n" + "".join(f"{int(j)} {float(v)!r}\n" for j, v in zip(x.indices, x.values))


def parse_update(line: str, lineno: int, dim: int) -> tuple[int, float] | None:
    """One turnstile update ``<index> <delta>``; ``None`` for a blank line."""
    parts = line.split()
    if not parts:
        return None
    if len(parts) != 2:
        raise FormatError(lineno, "expected '<index> <delta>'")
    return _parse_index(parts[0], lineno, dim), _parse_real(parts[1], lineno)


@dataclass(frozen=True)
class SketchRecord:
    path: str
    epsilon: float
    delta: float
    d: int
    seed: int
    sketch: Sketch

    @classmethod
    def new(cls, path: str, epsilon: float, delta: float, d: int, seed: int) -> "SketchRecord":
        p = derive_params(epsilon, delta, d, seed)
        return cls(path, p.epsilon, p.delta, d, seed, Sketch(make_transform(path, p)))

    def key(self) -> tuple:
        return (self.path, self.epsilon, self.delta, self.d, self.seed)

    def merge(self, other: "SketchRecord") -> "SketchRecord":
        if self.key() != other.key():
            raise ValueError(f"cannot merge sketches with different projections: {self.key()} vs {other.key()}")
        return SketchRecord(*self.key(), self.sketch.merge(other.sketch))

    def to_text(self) -> str:
        s = self.sketch
        lines = [
            "sketch=1",
            f"path={self.path}",
            f"epsilon={self.epsilon!r}",
            f"delta={self.delta!r}",
            f"d={self.d}",
            f"seed={self.seed}",
            f"k={s.projection.k}",
            f"update_count={s.update_count}",
            f"sq_norm_estimate={s.sq_norm()!r}",
        ]
        if isinstance(s.projection, L1Embed):
            lines.append(f"l1_estimate={s.projection.estimate_from(s.accumulator)!r}")
        lines.append("values=" + " ".join(repr(float(v)) for v in s.accumulator))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SketchRecord":
        raw = {}
        for n, ln in enumerate(text.splitlines(), start=1):
            if not ln.strip():
                continue
            if "=" not in ln:
                raise FormatError(n, "expected name=value")
            name, value = ln.split("=", 1)
            raw[name.strip()] = value.strip()
        try:
            rec = cls.new(raw["path"], float(raw["epsilon"]), float(raw["delta"]), int(raw["d"]), int(raw["seed"]))
            values = np.array([float(v) for v in raw["values"].split()])
            count = int(raw.get("update_count", 0))
        except KeyError as e:
            raise FormatError(0, f"sketch record lacks field {e.args[0]}") from None
        if values.shape != (rec.sketch.projection.k,):
            raise FormatError(0, f"sketch record has {values.shape[0]} values, expected k={rec.sketch.projection.k}")
        return cls(*rec.key(), Sketch(rec.sketch.projection, values, count))
