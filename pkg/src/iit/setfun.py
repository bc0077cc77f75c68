"""Subsets of [1:n], set-function oracles and exhaustive structural checks.

Subsets are plain ``int`` bitmasks: element ``i`` (1-based) is bit ``i - 1``.
Helpers accept either a mask or an iterable of 1-based indices.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

TOL = 1e-9
PMF_TOL = 1e-12
MAX_EXHAUSTIVE_N = 20

CLAIM_FLAGS = ("submodular", "supermodular", "modular", "monotone_prefix", "grounded")


class StructureError(ValueError):
    """Raised when an oracle does not satisfy a required structural property."""


def to_mask(S, n: int | None = None) -> int:
    if isinstance(S, (int, np.integer)) and not isinstance(S, bool):
        mask = int(S)
        if mask < 0:
            raise ValueError(f"negative subset mask {mask}")
    else:
        mask = 0
        for i in S:
            i = int(i)
            if i < 1:
                raise ValueError(f"index {i} outside [1:n]")
            mask |= 1 << (i - 1)
    if n is not None and mask >> n:
        raise ValueError(f"subset {members(mask)} not contained in [1:{n}]")
    return mask


def members(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def size(mask: int) -> int:
    return bin(mask).count("1")


def full_mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True)
class GroundSet:
    """The ground set [1:n] with an evaluation order (a permutation of [1:n]).

    ``order[k]`` is the element in position ``k``; ``below``/``above`` give
    the indices strictly before the first / after the last member of a subset
    in that order.
    """

    n: int
    order: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set needs n >= 1")
        order = tuple(int(i) for i in self.order) or tuple(range(1, self.n + 1))
        if sorted(order) != list(range(1, self.n + 1)):
            raise ValueError(f"order {order} is not a permutation of [1:{self.n}]")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_pos", {e: k for k, e in enumerate(order)})

    @property
    def full(self) -> int:
        return full_mask(self.n)

    def position(self, i: int) -> int:
        return self._pos[i]

    def below(self, S) -> int:
        mask = to_mask(S, self.n)
        if not mask:
            return self.full
        lo = min(self._pos[i] for i in members(mask))
        return to_mask(self.order[:lo])

    def above(self, S) -> int:
        mask = to_mask(S, self.n)
        if not mask:
            return self.full
        hi = max(self._pos[i] for i in members(mask))
        return to_mask(self.order[hi + 1:])

    def prefix(self, j: int) -> int:
        return to_mask(self.order[:j])


class SetFunction:
    """A set function on 2^[1:n] evaluated through a callable on bitmasks.

    ``claims`` are assertions about the function; :func:`check_structure`
    verifies them. Values are memoised, so ``func`` must be pure.
    """

    def __init__(self, n: int, func: Callable[[int], float], claims: Iterable[str] = (), name: str = "f"):
        if n < 1:
            raise ValueError("set function needs n >= 1")
        claims = frozenset(claims)
        unknown = claims - set(CLAIM_FLAGS)
        if unknown:
            raise ValueError(f"unknown claims {sorted(unknown)}")
        self.n = n
        self.claims = claims
        self.name = name
        self._func = func
        self._cache: dict[int, float] = {}

    def __repr__(self):
        return f"SetFunction({self.name!r}, n={self.n}, claims={sorted(self.claims)})"

    def value(self, mask: int) -> float:
        v = self._cache.get(mask)
        if v is None:
            v = float(self._func(mask))
            self._cache[mask] = v
        return v

    def __call__(self, S) -> float:
        return self.value(to_mask(S, self.n))

    def cond(self, S, T) -> float:
        """f(S | T) = f(S u T) - f(T), no groundedness check."""
        s, t = to_mask(S, self.n), to_mask(T, self.n)
        return self.value(s | t) - self.value(t)

    @property
    def full_value(self) -> float:
        return self.value(full_mask(self.n))

    def table(self) -> np.ndarray:
        """Values on every mask 0 .. 2^n - 1."""
        if self.n > MAX_EXHAUSTIVE_N:
            raise StructureError(f"n={self.n} exceeds the exhaustive limit {MAX_EXHAUSTIVE_N}")
        return np.array([self.value(m) for m in range(1 << self.n)], dtype=float)

    def is_grounded(self) -> bool:
        return abs(self.value(0)) <= PMF_TOL

    def negated(self) -> "SetFunction":
        flip = {"submodular": "supermodular", "supermodular": "submodular"}
        claims = {flip.get(c, c) for c in self.claims if c != "monotone_prefix"}
        return SetFunction(self.n, lambda m: -self.value(m), claims, name=f"-{self.name}")


def eval_conditional(f: SetFunction, S, T) -> float:
    """Conditional value f(S | T); requires a grounded oracle."""
    if not f.is_grounded():
        raise StructureError(f"{f.name} is not grounded: f(empty) = {f.value(0)!r}")
    return f.cond(S, T)


@dataclass
class FlagVerdict:
    flag: str
    holds: bool
    witness: tuple | None = None
    detail: str = ""


@dataclass
class StructureReport:
    n: int
    verdicts: dict[str, FlagVerdict] = field(default_factory=dict)

    def __getitem__(self, flag: str) -> bool:
        return self.verdicts[flag].holds

    def all_hold(self) -> bool:
        return all(v.holds for v in self.verdicts.values())


def _local_violation(table: np.ndarray, n: int, sign: float, tol: float):
    """First (S, T) with sign * (f(S)+f(T)-f(S|T)-f(S&T)) < -tol, via the
    diminishing-returns characterisation over pairs of added elements."""
    idx = np.arange(1 << n)
    for i in range(n):
        bi = 1 << i
        for j in range(i + 1, n):
            bj = 1 << j
            base = idx[(idx & (bi | bj)) == 0]
            lhs = table[base | bi] + table[base | bj]
            rhs = table[base | bi | bj] + table[base]
            bad = np.nonzero(sign * (lhs - rhs) < -tol)[0]
            if bad.size:
                b = int(base[bad[0]])
                S, T = b | bi, b | bj
                return (members(S), members(T)), float(lhs[bad[0]] - rhs[bad[0]])
    return None, 0.0


def check_structure(f: SetFunction, which: Iterable[str] | None = None, order=None, tol: float = TOL) -> StructureReport:
    """Exhaustively test structural flags of ``f``.

    Sub/supermodularity is tested on every S and pair i, j outside S, which is
    equivalent to the all-pairs definition. ``monotone_prefix`` is checked
    along ``order`` (identity by default) starting from the empty prefix.
    Refuses n > 20 rather than sampling.
    """
    which = tuple(which) if which is not None else CLAIM_FLAGS
    n = f.n
    if n > MAX_EXHAUSTIVE_N:
        raise StructureError(f"exhaustive check refused for n={n} > {MAX_EXHAUSTIVE_N}")
    ground = order if isinstance(order, GroundSet) else GroundSet(n, tuple(order or ()))
    report = StructureReport(n)
    need_table = {"submodular", "supermodular", "modular"} & set(which)
    table = f.table() if need_table else None

    cache = {}

    def local(sign):
        if sign not in cache:
            cache[sign] = _local_violation(table, n, sign, tol)
        return cache[sign]

    for flag in which:
        if flag == "submodular":
            w, gap = local(1.0)
            report.verdicts[flag] = FlagVerdict(flag, w is None, w, f"gap {gap:.3g}" if w else "")
        elif flag == "supermodular":
            w, gap = local(-1.0)
            report.verdicts[flag] = FlagVerdict(flag, w is None, w, f"gap {gap:.3g}" if w else "")
        elif flag == "modular":
            w1, _ = local(1.0)
            w2, _ = local(-1.0)
            report.verdicts[flag] = FlagVerdict(flag, w1 is None and w2 is None, w1 or w2)
        elif flag == "grounded":
            v = f.value(0)
            ok = abs(v) <= PMF_TOL
            report.verdicts[flag] = FlagVerdict(flag, ok, None if ok else ((),), f"f(empty)={v!r}")
        elif flag == "monotone_prefix":
            prev = f.value(0)
            verdict = FlagVerdict(flag, True)
            for j in range(1, n + 1):
                cur = f.value(ground.prefix(j))
                if cur < prev - tol:
                    verdict = FlagVerdict(
                        flag, False, (members(ground.prefix(j - 1)), members(ground.prefix(j))),
                        f"prefix value drops {prev!r} -> {cur!r} at j={j}",
                    )
                    break
                prev = cur
            report.verdicts[flag] = verdict
        else:
            raise ValueError(f"unknown structural flag {flag!r}")
    return report


# --- concrete builders -------------------------------------------------------


@dataclass(frozen=True)
class JointDistribution:
    """Discrete pmf over a product alphabet, flattened in row-major order."""

    alphabet_sizes: tuple[int, ...]
    pmf: np.ndarray

    def __post_init__(self):
        sizes = tuple(int(a) for a in self.alphabet_sizes)
        if not sizes or any(a < 1 for a in sizes):
            raise ValueError(f"alphabet sizes must be positive integers, got {self.alphabet_sizes}")
        p = np.asarray(self.pmf, dtype=float).ravel()
        if p.size != math.prod(sizes):
            raise ValueError(f"pmf has {p.size} cells, expected {math.prod(sizes)}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("pmf entries must be finite and nonnegative")
        if abs(p.sum() - 1.0) > PMF_TOL:
            raise ValueError(f"pmf sums to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "alphabet_sizes", sizes)
        object.__setattr__(self, "pmf", p)

    @property
    def n(self) -> int:
        return len(self.alphabet_sizes)

    def marginal(self, S) -> np.ndarray:
        mask = to_mask(S, self.n)
        keep = {i - 1 for i in members(mask)}
        drop = tuple(ax for ax in range(self.n) if ax not in keep)
        return self.pmf.reshape(self.alphabet_sizes).sum(axis=drop)

    def to_json(self) -> dict:
        return {"alphabet_sizes": list(self.alphabet_sizes), "pmf": [float(x) for x in self.pmf]}

    @classmethod
    def from_json(cls, data: dict) -> "JointDistribution":
        return cls(tuple(data["alphabet_sizes"]), np.array(data["pmf"], dtype=float))

    @classmethod
    def load(cls, path) -> "JointDistribution":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def shannon_entropy(p) -> float:
    """Entropy in nats with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def entropy_oracle(p: JointDistribution) -> SetFunction:
    def h(mask):
        if mask == 0:
            return 0.0
        return shannon_entropy(p.marginal(mask))

    return SetFunction(p.n, h, {"submodular", "monotone_prefix", "grounded"}, name="entropy")


def cut_oracle(edges, n: int) -> SetFunction:
    pairs = []
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self-loop at {u}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValueError(f"edge ({u}, {v}) has an endpoint outside [1:{n}]")
        pairs.append((1 << (u - 1), 1 << (v - 1)))

    def cut(mask):
        return sum(1 for a, b in pairs if bool(mask & a) != bool(mask & b))

    return SetFunction(n, cut, {"submodular", "grounded"}, name="cut")


def coverage_oracle(covers, n: int | None = None) -> SetFunction:
    covers = [frozenset(c) for c in covers]
    if n is None:
        n = len(covers)
    if len(covers) != n:
        raise ValueError(f"need {n} cover sets, got {len(covers)}")

    def cov(mask):
        out = set()
        for i in members(mask):
            out |= covers[i - 1]
        return len(out)

    return SetFunction(n, cov, {"submodular", "monotone_prefix", "grounded"}, name="coverage")


def modular_oracle(weights) -> SetFunction:
    """f(S) = sum of per-element weights; modular and grounded."""
    w = [float(x) for x in weights]
    claims = {"submodular", "supermodular", "modular", "grounded"}
    if all(x >= 0 for x in w):
        claims.add("monotone_prefix")
    return SetFunction(len(w), lambda m: sum(w[i - 1] for i in members(m)), claims, name="modular")


def cardinality_oracle(n: int) -> SetFunction:
    return modular_oracle([1.0] * n)
