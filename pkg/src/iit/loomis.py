"""Projection counts, slice maxima and Loomis-Whitney-type bounds for
finite point sets with exact coordinates."""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .setfun import JointDistribution, entropy_oracle, full_mask, to_mask


def _coord(x) -> Fraction:
    if isinstance(x, float):
        if not x.is_integer():
            raise ValueError(f"float coordinate {x!r} is not exact; pass an int or 'p/q' string")
        return Fraction(int(x))
    return Fraction(x)


@dataclass(frozen=True)
class PointSet:
    d: int
    points: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("point sets need dimension d >= 2")
        pts = tuple(tuple(_coord(x) for x in p) for p in self.points)
        if not pts:
            raise ValueError("point set is empty")
        for p in pts:
            if len(p) != self.d:
                raise ValueError(f"point {p} does not have {self.d} coordinates")
        if len(set(pts)) != len(pts):
            raise ValueError("points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    @classmethod
    def from_json(cls, data: dict) -> "PointSet":
        return cls(int(data["d"]), tuple(tuple(p) for p in data["points"]))

    @classmethod
    def load(cls, path) -> "PointSet":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        def enc(x: Fraction):
            return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return {"d": self.d, "points": [[enc(x) for x in p] for p in self.points]}


def _drop(p, j):
    return p[:j] + p[j + 1:]


@dataclass(frozen=True)
class ProjectionStats:
    n_minus: dict[int, int]
    slice_max: dict[int, int]
    slice_argmax: dict[int, Fraction]


def projection_counts(S: PointSet) -> ProjectionStats:
    """Distinct projections after deleting each coordinate, and the largest
    slice (points sharing one coordinate value) per coordinate; 1-based keys."""
    n_minus, slice_max, arg = {}, {}, {}
    for j in range(S.d):
        n_minus[j + 1] = len({_drop(p, j) for p in S.points})
        counts = Counter(p[j] for p in S.points)
        best = max(counts.values())
        slice_max[j + 1] = best
        arg[j + 1] = min(v for v, c in counts.items() if c == best)
    return ProjectionStats(n_minus, slice_max, arg)


@dataclass(frozen=True)
class LWBounds:
    n: int
    d: int
    slice_coord: int
    target: int
    classic: int
    strong: int
    stats: ProjectionStats

    @property
    def classic_holds(self) -> bool:
        return self.target <= self.classic

    @property
    def strong_holds(self) -> bool:
        return self.target <= self.strong

    @property
    def strong_le_classic(self) -> bool:
        return self.strong <= self.classic

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "slice_coord": self.slice_coord,
            "n_pow_d_minus_1": self.target,
            "classic": self.classic,
            "strong": self.strong,
            "n_minus": {str(k): v for k, v in self.stats.n_minus.items()},
            "slice_max": {str(k): v for k, v in self.stats.slice_max.items()},
            "classic_holds": self.classic_holds,
            "strong_holds": self.strong_holds,
            "strong_le_classic": self.strong_le_classic,
        }


def lw_bounds(S: PointSet, slice_coord: int = 1, stats: ProjectionStats | None = None) -> LWBounds:
    """Classic product of all d projections and the slice-refined product,
    both compared with n^(d-1) in integer arithmetic."""
    if not 1 <= slice_coord <= S.d:
        raise ValueError(f"slice coordinate {slice_coord} outside [1:{S.d}]")
    st = stats or projection_counts(S)
    classic = math.prod(st.n_minus.values())
    strong = math.prod(v for k, v in st.n_minus.items() if k != slice_coord) * st.slice_max[slice_coord]
    return LWBounds(S.n, S.d, slice_coord, S.n ** (S.d - 1), classic, strong, st)


def best_slice_coord(S: PointSet) -> tuple[int, int]:
    """Slice coordinate with the smallest strong bound (lowest index on ties)."""
    st = projection_counts(S)
    bounds = [(lw_bounds(S, j, st).strong, j) for j in range(1, S.d + 1)]
    b, j = min(bounds)
    return j, b


def uniform_distribution(S: PointSet) -> JointDistribution:
    """Uniform law on S as a pmf over per-coordinate value alphabets."""
    alphabets = [sorted({p[j] for p in S.points}) for j in range(S.d)]
    index = [{v: k for k, v in enumerate(a)} for a in alphabets]
    sizes = tuple(len(a) for a in alphabets)
    cells = [0.0] * math.prod(sizes)
    for p in S.points:
        flat = 0
        for j in range(S.d):
            flat = flat * sizes[j] + index[j][p[j]]
        cells[flat] = 1.0 / S.n
    return JointDistribution(sizes, cells)


@dataclass(frozen=True)
class EntropyChain:
    scaled_joint: float
    strong_sum: float
    log_strong: float

    def holds(self, tol: float = 1e-9) -> bool:
        return self.scaled_joint <= self.strong_sum + tol and self.strong_sum <= self.log_strong + tol


def entropy_chain(S: PointSet, slice_coord: int = 1) -> EntropyChain:
    """(d-1) H(X) <= sum_{i != j} H(X_{-i}) + H(X_{-j} | X_j) <= log(strong bound)
    for X uniform on S, j the slice coordinate; natural logs."""
    f = entropy_oracle(uniform_distribution(S))
    full = full_mask(S.d)
    j = to_mask([slice_coord])
    total = sum(f.value(full & ~to_mask([i])) for i in range(1, S.d + 1) if i != slice_coord)
    total += f.value(full) - f.value(j)
    return EntropyChain((S.d - 1) * f.value(full), total, math.log(lw_bounds(S, slice_coord).strong))
