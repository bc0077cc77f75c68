"""Convex/concave transforms applied to normalised submodular values."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .families import FamilyError, WeightedFamily, classify_weights
from .mt import Verdict, _ground, _require_grounded, compare, conditional_terms, premise_label
from .setfun import TOL, JointDistribution, SetFunction, StructureError, check_structure, entropy_oracle, size

SHAPES = ("nondecreasing", "nonincreasing", "convex", "concave", "strictly_increasing")
N_SHAPE_SAMPLES = 64
AFFINE_RTOL = 1e-8


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class ScalarTransform:
    """A real function g with claimed shape flags.

    ``domain_lo`` clips the verification interval from below (for
    transforms like powers and square roots that live on x >= 0).
    """

    name: str
    g: Callable[[float], float]
    claims: frozenset = frozenset()
    domain_lo: float = -math.inf

    def __call__(self, x: float) -> float:
        return float(self.g(x))

    def reflected(self) -> "ScalarTransform":
        """x -> g(-x); swaps monotonicity claims, keeps curvature."""
        swap = {"nondecreasing": "nonincreasing", "nonincreasing": "nondecreasing"}
        claims = frozenset(swap.get(c, c) for c in self.claims if c != "strictly_increasing")
        return ScalarTransform(f"{self.name}(-x)", lambda x: self.g(-x), claims)


def identity() -> ScalarTransform:
    return ScalarTransform("identity", lambda x: x,
                           frozenset({"nondecreasing", "strictly_increasing", "convex", "concave"}))


def exp2x() -> ScalarTransform:
    return ScalarTransform("exp2x", lambda x: math.exp(2.0 * x),
                           frozenset({"nondecreasing", "strictly_increasing", "convex"}))


def affine(a: float, b: float) -> ScalarTransform:
    claims = {"convex", "concave"}
    if a >= 0:
        claims.add("nondecreasing")
    if a > 0:
        claims.add("strictly_increasing")
    if a <= 0:
        claims.add("nonincreasing")
    return ScalarTransform(f"affine:{a:g},{b:g}", lambda x: a * x + b, frozenset(claims))


def power(p: float) -> ScalarTransform:
    if p < 1:
        raise ValueError(f"power transform needs p >= 1, got {p}")
    # max(x, 0)^p keeps the function convex and nondecreasing on the whole line
    return ScalarTransform(f"power:{p:g}", lambda x: max(x, 0.0) ** p,
                           frozenset({"nondecreasing", "convex"}), domain_lo=0.0)


def sqrt() -> ScalarTransform:
    return ScalarTransform("sqrt", lambda x: math.sqrt(max(x, 0.0)),
                           frozenset({"nondecreasing", "concave"}), domain_lo=0.0)


def parse_transform(spec: str) -> ScalarTransform:
    """Builtin by name: identity | exp2x | sqrt | affine:a,b | power:p."""
    name, _, arg = spec.partition(":")
    if name == "identity":
        return identity()
    if name == "exp2x":
        return exp2x()
    if name == "sqrt":
        return sqrt()
    if name == "affine":
        a, b = (float(x) for x in arg.split(","))
        return affine(a, b)
    if name == "power":
        return power(float(arg))
    raise ValueError(f"unknown transform {spec!r}")


def _samples(g: ScalarTransform, lo: float, hi: float, pad: float = 0.1):
    width = hi - lo
    lo, hi = lo - pad * width, hi + pad * width
    lo = max(lo, g.domain_lo)
    if hi < lo:
        hi = lo
    xs = np.linspace(lo, hi, N_SHAPE_SAMPLES)
    ys = np.array([g(x) for x in xs])
    return xs, ys


def verify_shape(g: ScalarTransform, lo: float, hi: float, flags, tol: float = TOL) -> dict[str, bool]:
    """Sampled first/second difference tests of ``flags`` on [lo, hi] padded 10%."""
    xs, ys = _samples(g, lo, hi)
    scale = max(1.0, float(np.max(np.abs(ys))))
    d1 = np.diff(ys)
    d2 = np.diff(ys, 2)
    out = {}
    for flag in flags:
        if flag == "nondecreasing":
            out[flag] = bool(np.all(d1 >= -tol * scale))
        elif flag == "strictly_increasing":
            out[flag] = bool(np.all(d1 > 0)) if hi > lo else True
        elif flag == "nonincreasing":
            out[flag] = bool(np.all(d1 <= tol * scale))
        elif flag == "convex":
            out[flag] = bool(np.all(d2 >= -tol * scale))
        elif flag == "concave":
            out[flag] = bool(np.all(d2 <= tol * scale))
        else:
            raise ValueError(f"unknown shape flag {flag!r}")
    return out


def is_affine_on(g: ScalarTransform, values) -> bool:
    """Second differences at 64 points spanning ``values`` vanish relative to scale."""
    values = [float(v) for v in values]
    lo, hi = min(values), max(values)
    if hi - lo <= 0:
        return True
    xs = np.linspace(lo, hi, N_SHAPE_SAMPLES)
    ys = np.array([g(x) for x in xs])
    scale = max(1.0, float(np.max(np.abs(ys))))
    return bool(np.max(np.abs(np.diff(ys, 2))) <= AFFINE_RTOL * scale)


def _require_shape(g: ScalarTransform, values, flags):
    for flag in flags:
        if flag not in g.claims:
            raise ShapeError(f"transform {g.name} does not claim {flag}")
    verdict = verify_shape(g, min(values), max(values), flags)
    bad = [k for k, ok in verdict.items() if not ok]
    if bad:
        raise ShapeError(f"transform {g.name} fails {bad} on [{min(values):.6g}, {max(values):.6g}]")


@dataclass
class ConvexReport:
    g: str
    lhs: float
    rhs_upper: float | None = None
    rhs_lower: float | None = None
    normalizer: float = 1.0
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def min_slack(self) -> float:
        return min((v.slack for v in self.verdicts), default=float("inf"))

    @property
    def gap_upper(self):
        return None if self.rhs_upper is None else self.rhs_upper - self.lhs

    @property
    def gap_lower(self):
        return None if self.rhs_lower is None else self.lhs - self.rhs_lower

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "lhs": self.lhs,
            "rhs_upper": self.rhs_upper,
            "rhs_lower": self.rhs_lower,
            "normalizer": self.normalizer,
            "verdicts": [asdict(v) for v in self.verdicts],
        }


def _jensen_side(wf: WeightedFamily, g: ScalarTransform, values, v: float) -> float:
    n = wf.n
    return sum(float(w) * size(s) / (n * v) * g(x / size(s)) for (s, w), x in zip(wf.items(), values))


def _two_sided(f, wf, g, up_values, low_values, v, premise, upper_name, lower_name, sides=("upper", "lower")):
    n = f.n
    lhs_arg = f.full_value / (n * v)
    rep = ConvexReport(g.name, g(lhs_arg), normalizer=v)
    convex_ok = "convex" in g.claims and "nondecreasing" in g.claims
    concave_ok = "concave" in g.claims and "nondecreasing" in g.claims
    if not (convex_ok or concave_ok):
        raise ShapeError(f"transform {g.name} must be nondecreasing and convex or concave")
    if "upper" in sides and convex_ok:
        norm = [x / size(s) for s, x in zip(wf.sets, up_values)] + [lhs_arg]
        _require_shape(g, norm, ("nondecreasing", "convex"))
        rep.rhs_upper = _jensen_side(wf, g, up_values, v)
        rep.verdicts.append(compare(upper_name, rep.lhs, rep.rhs_upper, premise))
    if "lower" in sides and concave_ok:
        norm = [x / size(s) for s, x in zip(wf.sets, low_values)] + [lhs_arg]
        _require_shape(g, norm, ("nondecreasing", "concave"))
        rep.rhs_lower = _jensen_side(wf, g, low_values, v)
        rep.verdicts.append(compare(lower_name, rep.rhs_lower, rep.lhs, premise))
    return rep


def _partition_checked(f: SetFunction, wf: WeightedFamily):
    _require_grounded(f)
    if wf.n != f.n:
        raise FamilyError("family and oracle disagree on n")
    if not classify_weights(wf).partition:
        raise FamilyError("weights are not a fractional partition")


def convex_bounds_strong(f: SetFunction, wf: WeightedFamily, g: ScalarTransform, order=None,
                         verify: bool = True) -> ConvexReport:
    """g(f([1:n])/n) against weighted g of f(S|<S)/|S| (convex g) and of
    f(S | S^c minus >S)/|S| (concave g)."""
    _partition_checked(f, wf)
    ground = _ground(f, order)
    terms = conditional_terms(f, wf, ground)
    return _two_sided(f, wf, g, [t[1] for t in terms], [t[2] for t in terms], 1.0,
                      premise_label(f, verify), "strong convex upper", "strong concave lower")


def convex_bounds_weak(f: SetFunction, wf: WeightedFamily, g: ScalarTransform, order=None,
                       verify: bool = True) -> ConvexReport:
    """Unconditioned upper side f(S)/|S| and fully conditioned lower side
    f(S|S^c)/|S|; also checks that these are dominated by the strong sides."""
    _partition_checked(f, wf)
    ground = _ground(f, order)
    terms = conditional_terms(f, wf, ground)
    premise = premise_label(f, verify)
    weak = _two_sided(f, wf, g, [t[0] for t in terms], [t[3] for t in terms], 1.0, premise,
                      "weak convex upper", "weak concave lower")
    strong = _two_sided(f, wf, g, [t[1] for t in terms], [t[2] for t in terms], 1.0, premise,
                        "strong convex upper", "strong concave lower")
    if weak.rhs_upper is not None:
        weak.verdicts.append(compare("strong upper rhs <= weak upper rhs", strong.rhs_upper, weak.rhs_upper, premise))
    if weak.rhs_lower is not None:
        weak.verdicts.append(compare("weak lower rhs <= strong lower rhs", weak.rhs_lower, strong.rhs_lower, premise))
    return weak


def covering_packing_convex(f: SetFunction, wf: WeightedFamily, g: ScalarTransform, order=None,
                            verify: bool = True) -> ConvexReport:
    """Strong-form Jensen bounds with the weights renormalised by
    v = sum w(S)|S|/n; a covering gives the convex upper side, a packing the
    concave lower side."""
    _require_grounded(f)
    ground = _ground(f, order)
    mono = check_structure(f, ["monotone_prefix"], order=ground).verdicts["monotone_prefix"]
    if not mono.holds:
        raise StructureError(f"monotone-prefix check failed: {mono.detail}")
    cls = classify_weights(wf)
    v = float(cls.v)
    if v <= 0:
        raise FamilyError("normaliser v is zero")
    sides = tuple(name for name, ok in (("upper", cls.covering), ("lower", cls.packing)) if ok)
    if not sides:
        raise FamilyError("weights are neither a covering nor a packing")
    terms = conditional_terms(f, wf, ground)
    return _two_sided(f, wf, g, [t[1] for t in terms], [t[2] for t in terms], v,
                      premise_label(f, verify), "covering convex upper", "packing concave lower", sides)


def convex_bounds_strong_supermodular(f: SetFunction, wf: WeightedFamily, g: ScalarTransform, order=None):
    """Supermodular f with nonincreasing g, via -f (submodular) and x -> g(-x)."""
    if "nonincreasing" not in g.claims:
        raise ShapeError(f"transform {g.name} must be nonincreasing")
    return convex_bounds_strong(f.negated(), wf, g.reflected(), order, verify=True)


@dataclass
class Certificate:
    side: str
    f_modular: bool
    g_affine_on_interval: bool
    equality_observed: bool
    slack: float

    @property
    def consistent(self) -> bool:
        return self.equality_observed == (self.f_modular and self.g_affine_on_interval)


def equality_certificate(f: SetFunction, wf: WeightedFamily, g: ScalarTransform, side: str = "upper") -> Certificate:
    """Equality test for the weak Jensen bound against modularity of f and
    affinity of g on the span of the normalised values with positive weight."""
    if "strictly_increasing" not in g.claims:
        raise ShapeError(f"certificate needs a strictly increasing transform, got {g.name}")
    _partition_checked(f, wf)
    terms = conditional_terms(f, wf, _ground(f, None))
    idx = {"upper": 0, "lower": 3}[side]
    values = [t[idx] for t in terms]
    # lower sides are only available for concave g, upper for convex g
    flags = ("nondecreasing", "convex") if side == "upper" else ("nondecreasing", "concave")
    norm = [x / size(s) for s, x in zip(wf.sets, values)] + [f.full_value / f.n]
    _require_shape(g, norm, flags)
    lhs = g(f.full_value / f.n)
    rhs = _jensen_side(wf, g, values, 1.0)
    slack = rhs - lhs if side == "upper" else lhs - rhs
    support = [x / size(s) for (s, w), x in zip(wf.items(), values) if w > 0]
    modular = check_structure(f, ["modular"])["modular"]
    return Certificate(side, modular, is_affine_on(g, support), abs(slack) <= TOL, slack)


@dataclass
class EPIReport:
    lhs: float
    rhs_conditioned: float
    rhs_unconditioned: float
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def epi_bound(p: JointDistribution, wf: WeightedFamily, order=None) -> EPIReport:
    """Entropy-power chain exp(2H/n) <= conditioned sum <= unconditioned sum."""
    f = entropy_oracle(p)
    _partition_checked(f, wf)
    terms = conditional_terms(f, wf, _ground(f, order))
    g = exp2x()
    lhs = g(f.full_value / f.n)
    cond = _jensen_side(wf, g, [t[1] for t in terms], 1.0)
    uncond = _jensen_side(wf, g, [t[0] for t in terms], 1.0)
    rep = EPIReport(lhs, cond, uncond)
    rep.verdicts = [
        compare("entropy power <= conditioned sum", lhs, cond),
        compare("conditioned sum <= unconditioned sum", cond, uncond),
    ]
    return rep
