"""Strong and weak fractional bounds for submodular functions, with gaps."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .families import Classification, FamilyError, WeightedFamily, classify_weights, complement_dual
from .setfun import (
    TOL,
    GroundSet,
    SetFunction,
    StructureError,
    check_structure,
    full_mask,
    members,
)

UNVERIFIED = "unverified-premise"


@dataclass
class Verdict:
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    premise: str = "verified"


def compare(name: str, lhs: float, rhs: float, premise: str = "verified", tol: float = TOL) -> Verdict:
    """Verdict for ``lhs <= rhs``; slack is rhs - lhs."""
    slack = float(rhs) - float(lhs)
    return Verdict(name, float(lhs), float(rhs), slack, slack >= -tol, premise)


@dataclass
class BoundReport:
    f_full: float
    strong_upper: float | None
    strong_lower: float | None
    weak_upper: float | None
    weak_lower: float | None
    order: tuple[int, ...]
    kind: str = "partition"
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def gap_lower(self):
        return None if self.weak_lower is None else self.f_full - self.weak_lower

    @property
    def gap_upper(self):
        return None if self.weak_upper is None else self.weak_upper - self.f_full

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def min_slack(self) -> float:
        return min((v.slack for v in self.verdicts), default=float("inf"))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "order": list(self.order),
            "f_full": self.f_full,
            "weak_lower": self.weak_lower,
            "strong_lower": self.strong_lower,
            "strong_upper": self.strong_upper,
            "weak_upper": self.weak_upper,
            "gap_lower": self.gap_lower,
            "gap_upper": self.gap_upper,
            "verdicts": [asdict(v) for v in self.verdicts],
        }


def _ground(f: SetFunction, order) -> GroundSet:
    if isinstance(order, GroundSet):
        if order.n != f.n:
            raise ValueError("order and oracle disagree on n")
        return order
    return GroundSet(f.n, tuple(order or ()))


def premise_label(f: SetFunction, verify: bool) -> str:
    if not verify:
        return UNVERIFIED
    rep = check_structure(f, ("submodular", "grounded"))
    return "verified" if rep.all_hold() else "refuted"


def conditional_terms(f: SetFunction, wf: WeightedFamily, ground: GroundSet):
    """Per member: (f(S), f(S|<S), f(S|S^c minus >S), f(S|S^c))."""
    full = full_mask(f.n)
    out = []
    for s in wf.sets:
        comp = full & ~s
        out.append((
            f.value(s),
            f.cond(s, ground.below(s)),
            f.cond(s, comp & ~ground.above(s)),
            f.cond(s, comp),
        ))
    return out


def _weighted(wf: WeightedFamily, terms, idx: int) -> float:
    return sum(float(w) * t[idx] for w, t in zip(wf.weights, terms))


def _require_grounded(f: SetFunction):
    if not f.is_grounded():
        raise StructureError(f"{f.name} is not grounded: f(empty) = {f.value(0)!r}")


def mt_bounds(f: SetFunction, wf: WeightedFamily, order=None, verify: bool = True) -> BoundReport:
    """Weak and strong two-sided bounds on f([1:n]) for a fractional partition.

    With ``verify`` the submodularity premise is checked exhaustively and the
    verdicts are labelled ``verified``/``refuted``; otherwise they carry the
    ``unverified-premise`` label.
    """
    _require_grounded(f)
    if wf.n != f.n:
        raise FamilyError("family and oracle disagree on n")
    cls = classify_weights(wf)
    if not cls.partition:
        raise FamilyError("weights are not a fractional partition; use covering_packing_bounds")
    ground = _ground(f, order)
    premise = premise_label(f, verify)
    terms = conditional_terms(f, wf, ground)
    rep = BoundReport(
        f_full=f.full_value,
        weak_upper=_weighted(wf, terms, 0),
        strong_upper=_weighted(wf, terms, 1),
        strong_lower=_weighted(wf, terms, 2),
        weak_lower=_weighted(wf, terms, 3),
        order=ground.order,
    )
    rep.verdicts = [
        compare("weak_lower <= strong_lower", rep.weak_lower, rep.strong_lower, premise),
        compare("strong_lower <= f_full", rep.strong_lower, rep.f_full, premise),
        compare("f_full <= strong_upper", rep.f_full, rep.strong_upper, premise),
        compare("strong_upper <= weak_upper", rep.strong_upper, rep.weak_upper, premise),
    ]
    return rep


@dataclass
class DualityRecord:
    gap_lower: float
    w: float
    gap_upper_dual: float
    w_dual: float
    dual: WeightedFamily

    @property
    def normalized_lower(self) -> float:
        return self.gap_lower / self.w

    @property
    def normalized_upper_dual(self) -> float:
        return self.gap_upper_dual / self.w_dual

    @property
    def difference(self) -> float:
        return abs(self.normalized_lower - self.normalized_upper_dual)


def weak_gaps(f: SetFunction, wf: WeightedFamily) -> tuple[float, float]:
    """(Gap_L, Gap_U) of the weak bounds; pure arithmetic, no premise checks."""
    full = full_mask(f.n)
    ff = f.full_value
    upper = sum(float(w) * f.value(s) for s, w in wf.items())
    lower = sum(float(w) * f.cond(s, full & ~s) for s, w in wf.items())
    return ff - lower, upper - ff


def mt_gaps_duality(f: SetFunction, wf: WeightedFamily) -> DualityRecord:
    """Normalised lower gap of (F, gamma) against normalised upper gap of the
    complement family with its dual weights."""
    _require_grounded(f)
    if not classify_weights(wf).partition:
        raise FamilyError("gap duality needs a fractional partition")
    dual = complement_dual(wf)
    gap_l, _ = weak_gaps(f, wf)
    _, gap_u = weak_gaps(f, dual)
    return DualityRecord(gap_l, float(wf.total_weight()), gap_u, float(dual.total_weight()), dual)


def covering_packing_bounds(f: SetFunction, wf: WeightedFamily, order=None, verify: bool = True) -> BoundReport:
    """Upper bounds for a fractional covering, lower bounds for a packing.

    Requires f([first j elements of order]) nondecreasing in j."""
    _require_grounded(f)
    ground = _ground(f, order)
    mono = check_structure(f, ["monotone_prefix"], order=ground).verdicts["monotone_prefix"]
    if not mono.holds:
        raise StructureError(f"monotone-prefix check failed: {mono.detail} at {mono.witness}")
    cls: Classification = classify_weights(wf)
    if not (cls.covering or cls.packing):
        raise FamilyError(f"weights are neither a covering nor a packing (sigma={cls.sigma})")
    premise = premise_label(f, verify)
    terms = conditional_terms(f, wf, ground)
    ff = f.full_value
    kind = "partition" if cls.partition else ("covering" if cls.covering else "packing")
    rep = BoundReport(ff, None, None, None, None, ground.order, kind=kind)
    if cls.covering:
        rep.weak_upper = _weighted(wf, terms, 0)
        rep.strong_upper = _weighted(wf, terms, 1)
        rep.verdicts += [
            compare("f_full <= strong_upper", ff, rep.strong_upper, premise),
            compare("strong_upper <= weak_upper", rep.strong_upper, rep.weak_upper, premise),
        ]
    if cls.packing:
        rep.strong_lower = _weighted(wf, terms, 2)
        rep.weak_lower = _weighted(wf, terms, 3)
        rep.verdicts += [
            compare("weak_lower <= strong_lower", rep.weak_lower, rep.strong_lower, premise),
            compare("strong_lower <= f_full", rep.strong_lower, ff, premise),
        ]
    return rep


def describe(wf: WeightedFamily) -> str:
    return ", ".join(f"{set(members(s))}:{w}" for s, w in wf.items())
