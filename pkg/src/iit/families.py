"""Set families with repetitions and fractional weights on them."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from numbers import Rational

from .lp import InfeasibleError, solve_covering_lp
from .setfun import TOL, full_mask, members, size, to_mask


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class SetFamily:
    """Multiset of nonempty subsets of [1:n]; each occurrence is its own slot."""

    n: int
    sets: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise FamilyError("family needs n >= 1")
        masks = tuple(to_mask(s, self.n) for s in self.sets)
        if any(m == 0 for m in masks):
            raise FamilyError("empty set members are not allowed")
        object.__setattr__(self, "sets", masks)

    def __len__(self):
        return len(self.sets)

    def degree(self, i: int) -> int:
        bit = 1 << (i - 1)
        return sum(1 for s in self.sets if s & bit)

    def degrees(self) -> list[int]:
        return [self.degree(i) for i in range(1, self.n + 1)]

    def multiplicities(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for s in self.sets:
            out[s] = out.get(s, 0) + 1
        return out

    def as_lists(self) -> list[list[int]]:
        return [list(members(s)) for s in self.sets]


def cover_number(sets, n: int) -> int:
    """Largest k such that every element of [1:n] lies in at least k of ``sets``.

    Empty members are allowed here (they cover nothing)."""
    masks = [to_mask(s, n) for s in sets]
    return min(sum(1 for s in masks if s >> i & 1) for i in range(n))


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


@dataclass(frozen=True)
class WeightedFamily:
    family: SetFamily
    weights: tuple

    def __post_init__(self):
        w = tuple(self.weights)
        if len(w) != len(self.family):
            raise FamilyError(f"{len(w)} weights for {len(self.family)} members")
        if any(x < 0 for x in w):
            raise FamilyError("weights must be nonnegative")
        object.__setattr__(self, "weights", w)

    @classmethod
    def build(cls, n: int, sets, weights) -> "WeightedFamily":
        return cls(SetFamily(n, tuple(sets)), tuple(weights))

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def sets(self) -> tuple[int, ...]:
        return self.family.sets

    @property
    def exact(self) -> bool:
        return all(_is_exact(x) for x in self.weights)

    def items(self):
        return zip(self.family.sets, self.weights)

    def total_weight(self):
        return sum(self.weights, Fraction(0) if self.exact else 0.0)

    def to_json(self) -> dict:
        return {"n": self.n, "sets": self.family.as_lists(), "weights": [float(x) for x in self.weights]}


@dataclass
class Classification:
    sigma: list
    partition: bool
    covering: bool
    packing: bool
    w: object
    v: object
    uncovered: list[int]


def classify_weights(wf: WeightedFamily, tol: float = TOL) -> Classification:
    """Per-element weight sums and partition/covering/packing status.

    Exact comparisons are used when every weight is rational."""
    exact = wf.exact
    zero = Fraction(0) if exact else 0.0
    n = wf.n
    sigma = [zero] * n
    for s, w in wf.items():
        for i in members(s):
            sigma[i - 1] += w
    if exact:
        partition = all(x == 1 for x in sigma)
        covering = all(x >= 1 for x in sigma)
        packing = all(x <= 1 for x in sigma)
    else:
        partition = all(abs(x - 1) <= tol for x in sigma)
        covering = all(x >= 1 - tol for x in sigma)
        packing = all(x <= 1 + tol for x in sigma)
    w = sum(wf.weights, zero)
    v = sum((x * size(s) for s, x in wf.items()), zero) / n
    uncovered = [i + 1 for i, x in enumerate(sigma) if x == 0]
    return Classification(sigma, partition, covering, packing, w, v, uncovered)


def singletons(n: int, weight=Fraction(1)) -> WeightedFamily:
    return WeightedFamily.build(n, [1 << i for i in range(n)], [weight] * n)


def han_family(n: int, k: int) -> WeightedFamily:
    """All k-subsets of [1:n], each with weight 1/C(n-1, k-1)."""
    if not 1 <= k <= n:
        raise FamilyError(f"need 1 <= k <= n, got n={n}, k={k}")
    sets = [to_mask(c) for c in combinations(range(1, n + 1), k)]
    w = Fraction(1, comb(n - 1, k - 1))
    return WeightedFamily.build(n, sets, [w] * len(sets))


def shearer_weights(F: SetFamily) -> WeightedFamily:
    """Uniform weight 1/k(F) on every occurrence, k(F) the cover number."""
    k = cover_number(F.sets, F.n)
    if k < 1:
        missing = [i for i, d in enumerate(F.degrees(), 1) if d == 0]
        raise FamilyError(f"elements {missing} lie in no member; k(F) = 0")
    return WeightedFamily(F, tuple([Fraction(1, k)] * len(F)))


def complement_dual(wf: WeightedFamily) -> WeightedFamily:
    """Complement family with weights gamma(S) / (w(gamma) - 1)."""
    full = full_mask(wf.n)
    w = wf.total_weight()
    exact = wf.exact
    if (w <= 1) if exact else (w <= 1 + TOL):
        raise FamilyError(f"complement dual needs w(gamma) > 1, got {w}")
    if any(s == full for s in wf.sets):
        raise FamilyError("a member equals the full ground set; its complement is empty")
    sets = [full & ~s for s in wf.sets]
    weights = [x / (w - 1) for x in wf.weights]
    return WeightedFamily.build(wf.n, sets, weights)


@dataclass
class CoveringSolution:
    weighted: WeightedFamily
    objective: Fraction


def min_weight_covering_lp(F: SetFamily, costs=None) -> CoveringSolution:
    """Fractional covering minimising sum alpha(S) cost(S)."""
    costs = [1] * len(F) if costs is None else list(costs)
    if len(costs) != len(F):
        raise FamilyError(f"{len(costs)} costs for {len(F)} members")
    if cover_number(F.sets, F.n) < 1:
        raise FamilyError("some element lies in no member; covering LP infeasible")
    A = [[int(bool(s >> i & 1)) for s in F.sets] for i in range(F.n)]
    try:
        x, obj = solve_covering_lp(A, [Fraction(c) for c in costs])
    except InfeasibleError as exc:
        raise FamilyError(str(exc)) from exc
    return CoveringSolution(WeightedFamily(F, tuple(x)), obj)


def load_family(path_or_data) -> tuple[SetFamily, tuple | None]:
    """Read ``{"n":..., "sets":[[...]], "weights":[...]}`` (weights optional)."""
    if isinstance(path_or_data, dict):
        data = path_or_data
    else:
        with open(path_or_data) as fh:
            data = json.load(fh)
    F = SetFamily(int(data["n"]), tuple(to_mask(s) for s in data["sets"]))
    weights = data.get("weights")
    if weights is not None:
        weights = tuple(Fraction(x) if isinstance(x, str) else x for x in weights)
    return F, weights
