"""Seeded random instances and fuzz campaigns checking every bound against
brute force.

Randomness comes from SplitMix64 (Steele, Lea and Flood 2014), a 64-bit
mixing generator that is easy to reproduce bit-for-bit in any language.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations

from . import convex, mt
from .families import (
    SetFamily,
    WeightedFamily,
    han_family,
    shearer_weights,
    singletons,
)
from .loomis import PointSet, entropy_chain, lw_bounds, projection_counts
from .pattern import VertexSet, build_graph, brute_force_edges, instance_to_json, verify_bound
from .setfun import (
    JointDistribution,
    SetFunction,
    coverage_oracle,
    cut_oracle,
    entropy_oracle,
    members,
    to_mask,
)

MASK64 = (1 << 64) - 1
TARGETS = ("mt", "convex", "covpack", "lw", "graph")


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def below(self, k: int) -> int:
        """Uniform integer in [0, k) by rejection, no modulo bias."""
        if k <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % k)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % k

    def randint(self, lo: int, hi: int) -> int:
        """Inclusive on both ends."""
        return lo + self.below(hi - lo + 1)

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample(self, items, k: int) -> list:
        return self.shuffle(list(items))[:k]

    def child(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())


class CapsError(ValueError):
    pass


# --- instance generators -----------------------------------------------------


def random_pmf(rng: SplitMix64, alphabet_sizes) -> JointDistribution:
    """Normalised exponentials of uniforms; a few cells are zeroed so that
    degenerate (deterministic) structure also appears."""
    sizes = tuple(alphabet_sizes)
    cells = math.prod(sizes)
    w = [math.exp(4.0 * rng.random()) for _ in range(cells)]
    if cells > 1:
        for _ in range(rng.below(cells)):
            w[rng.below(cells)] = 0.0
    if not any(w):
        w[rng.below(cells)] = 1.0
    total = math.fsum(w)
    return JointDistribution(sizes, [x / total for x in w])


def random_alphabets(rng: SplitMix64, n: int, max_alphabet: int) -> tuple[int, ...]:
    return tuple(rng.randint(2, max_alphabet) for _ in range(n))


def random_family(rng: SplitMix64, n: int, members_count: int, cover: bool = True) -> SetFamily:
    """Distinct nonempty subsets sampled without replacement; singletons are
    added for any element left uncovered when ``cover`` is set."""
    k = min(members_count, (1 << n) - 1)
    sets = rng.sample(range(1, 1 << n), k)
    if cover:
        covered = 0
        for s in sets:
            covered |= s
        sets += [1 << i for i in range(n) if not covered >> i & 1]
    return SetFamily(n, tuple(sets))


def _set_partitions(n: int):
    def rec(i, blocks):
        if i == n:
            yield [to_mask(b) for b in blocks]
            return
        for b in blocks:
            b.append(i + 1)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i + 1])
        yield from rec(i + 1, blocks)
        blocks.pop()
    yield from rec(0, [])


def random_partition(rng: SplitMix64, n: int, pieces: int = 3) -> WeightedFamily:
    """Rational convex combination of non-trivial set partitions of [1:n]
    (n >= 2): a fractional partition with no full-set member and w > 1."""
    if n < 2:
        raise CapsError("random fractional partitions need n >= 2")
    parts = [p for p in _set_partitions(n) if len(p) > 1]
    chosen = [parts[rng.below(len(parts))] for _ in range(pieces)]
    raw = [rng.randint(1, 9) for _ in chosen]
    total = sum(raw)
    sets, weights = [], []
    for p, r in zip(chosen, raw):
        for b in p:
            sets.append(b)
            weights.append(Fraction(r, total))
    return WeightedFamily.build(n, sets, weights)


def random_submodular(rng: SplitMix64, n: int, max_alphabet: int = 3) -> SetFunction:
    kind = rng.below(3)
    if kind == 0:
        return entropy_oracle(random_pmf(rng, random_alphabets(rng, n, max_alphabet)))
    if kind == 1:
        pairs = [p for p in combinations(range(1, n + 1), 2)]
        edges = [p for p in pairs if rng.below(2)] or pairs[:1]
        return cut_oracle(edges, n) if n >= 2 else coverage_oracle([{0}])
    universe = 2 * n
    covers = [{rng.below(universe) for _ in range(rng.randint(1, 3))} for _ in range(n)]
    return coverage_oracle(covers)


def random_points(rng: SplitMix64, d: int, n: int, hi: int = 5) -> PointSet:
    """n distinct points of {0..hi}^d, redrawing duplicates."""
    if n > (hi + 1) ** d:
        raise CapsError(f"cannot place {n} distinct points in a grid of {(hi + 1) ** d}")
    seen = []
    have = set()
    while len(seen) < n:
        p = tuple(rng.randint(0, hi) for _ in range(d))
        if p not in have:
            have.add(p)
            seen.append(p)
    return PointSet(d, tuple(seen))


def random_graph_instance(rng: SplitMix64, n: int):
    """Random vertex subset of {-1,1}^n and a random pattern family."""
    nv = rng.randint(1, 1 << n)
    V = VertexSet(n, frozenset(rng.sample(range(1 << n), nv)))
    fam = rng.sample(range(1, 1 << n), rng.randint(1, min(12, (1 << n) - 1)))
    return V, fam


def gen_instance(kind: str, seed: int, **caps):
    """Deterministic instance of ``kind`` from ``seed``.

    kinds: pmf (n, alphabets or max_alphabet), pointset (d, n), graph (n),
    family (n, members), partition (n)."""
    rng = SplitMix64(seed)
    if kind == "pmf":
        n = caps.get("n", 2)
        if n > 4:
            raise CapsError("entropy instances are capped at n <= 4")
        sizes = caps.get("alphabets") or random_alphabets(rng, n, caps.get("max_alphabet", 3))
        return random_pmf(rng, sizes)
    if kind == "pointset":
        return random_points(rng, caps.get("d", 3), caps.get("n", 10), caps.get("hi", 5))
    if kind == "graph":
        n = caps.get("n", 5)
        if n > 8:
            raise CapsError("graph instances are capped at n <= 8")
        return random_graph_instance(rng, n)
    if kind == "family":
        return random_family(rng, caps.get("n", 4), caps.get("members", 4))
    if kind == "partition":
        return random_partition(rng, caps.get("n", 3))
    raise ValueError(f"unknown instance kind {kind!r}")


# --- campaigns ---------------------------------------------------------------


@dataclass
class CampaignSpec:
    target: str
    trials: int
    seed: int
    max_n: int | None = None
    max_alphabet: int = 3
    max_points: int = 60

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}; choose from {TARGETS}")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        cap = 8 if self.target == "graph" else 4
        if self.max_n is None:
            self.max_n = cap
        if not 1 <= self.max_n <= cap:
            raise CapsError(f"max_n={self.max_n} outside [1:{cap}] for target {self.target}")


@dataclass
class TrialResult:
    trial: int
    passed: bool
    min_slack: float
    checks: int
    detail: str = ""
    instance: dict | None = None


@dataclass
class CampaignReport:
    spec: CampaignSpec
    trials: list[TrialResult] = field(default_factory=list)

    @property
    def failures(self) -> list[TrialResult]:
        return [t for t in self.trials if not t.passed]

    @property
    def min_slack(self) -> float | None:
        vals = [t.min_slack for t in self.trials if math.isfinite(t.min_slack)]
        return min(vals) if vals else None

    @property
    def exit_status(self) -> int:
        return 1 if self.failures else 0


def _pmf_instance(p: JointDistribution) -> dict:
    return {"pmf": p.to_json()}


def _trial_mt(rng, spec, i, f=None, instance=None, verify=True):
    n = rng.randint(1, spec.max_n)
    if f is None:
        p = random_pmf(rng, random_alphabets(rng, n, spec.max_alphabet))
        f, instance = entropy_oracle(p), _pmf_instance(p)
    n = f.n
    order = rng.shuffle(list(range(1, n + 1)))
    slack, checks, bad = math.inf, 0, []
    for k in range(1, n + 1):
        rep = mt.mt_bounds(f, han_family(n, k), order, verify=verify)
        checks += len(rep.verdicts)
        slack = min(slack, rep.min_slack)
        bad += [f"k={k}: {v.name} slack={v.slack:.3g} ({v.premise})" for v in rep.verdicts if not v.passed]
    return TrialResult(i, not bad, slack, checks, "; ".join(bad), instance if bad else None)


GS_CONVEX = ("identity", "exp2x", "power:2", "power:3")
GS_CONCAVE = ("identity", "sqrt")


def _trial_convex(rng, spec, i):
    n = rng.randint(1, spec.max_n)
    p = random_pmf(rng, random_alphabets(rng, n, spec.max_alphabet))
    f = entropy_oracle(p)
    order = rng.shuffle(list(range(1, n + 1)))
    slack, checks, bad = math.inf, 0, []
    for k in range(1, n + 1):
        wf = han_family(n, k)
        for name in dict.fromkeys(GS_CONVEX + GS_CONCAVE):
            g = convex.parse_transform(name)
            for rep in (convex.convex_bounds_strong(f, wf, g, order), convex.convex_bounds_weak(f, wf, g, order)):
                checks += len(rep.verdicts)
                slack = min(slack, rep.min_slack)
                bad += [f"k={k} g={name}: {v.name} slack={v.slack:.3g}" for v in rep.verdicts if not v.passed]
    return TrialResult(i, not bad, slack, checks, "; ".join(bad), _pmf_instance(p) if bad else None)


def _trial_covpack(rng, spec, i):
    n = rng.randint(1, spec.max_n)
    p = random_pmf(rng, random_alphabets(rng, n, spec.max_alphabet))
    f = entropy_oracle(p)
    order = rng.shuffle(list(range(1, n + 1)))
    F = random_family(rng, n, rng.randint(1, 2 * n))
    covering = shearer_weights(F)
    packing = WeightedFamily(F, tuple(Fraction(1, 2 * max(F.degrees())) for _ in F.sets))
    half = singletons(n, Fraction(1, 2))
    slack, checks, bad = math.inf, 0, []
    for wf in (covering, packing, half):
        reps = [mt.covering_packing_bounds(f, wf, order)]
        for name in ("identity", "exp2x", "power:2", "sqrt"):
            g = convex.parse_transform(name)
            try:
                reps.append(convex.covering_packing_convex(f, wf, g, order))
            except convex.ShapeError:
                continue
        for rep in reps:
            checks += len(rep.verdicts)
            slack = min(slack, rep.min_slack)
            bad += [f"{v.name} slack={v.slack:.3g}" for v in rep.verdicts if not v.passed]
    inst = {**_pmf_instance(p), "family": F.as_lists(), "order": order}
    return TrialResult(i, not bad, slack, checks, "; ".join(bad), inst if bad else None)


def _trial_lw(rng, spec, i):
    d = rng.randint(3, 5)
    hi = 5
    n = rng.randint(1, min(spec.max_points, (hi + 1) ** d))
    S = random_points(rng, d, n, hi)
    st = projection_counts(S)
    bad, slack = [], math.inf
    for j in range(1, d + 1):
        b = lw_bounds(S, j, st)
        if not (b.strong_holds and b.strong_le_classic and b.classic_holds):
            bad.append(f"slice {j}: n^(d-1)={b.target} strong={b.strong} classic={b.classic}")
        if st.slice_max[j] > st.n_minus[j]:
            bad.append(f"slice max {st.slice_max[j]} exceeds projection count {st.n_minus[j]}")
        slack = min(slack, b.strong - b.target)
    chain = entropy_chain(S, 1)
    if not chain.holds():
        bad.append(f"entropy chain {chain}")
    return TrialResult(i, not bad, float(slack), 3 * d + 1, "; ".join(bad), S.to_json() if bad else None)


def _trial_graph(rng, spec, i):
    n = rng.randint(1, spec.max_n)
    V, fam = random_graph_instance(rng, n)
    G = build_graph(V, fam)
    bad = []
    if G.edges != frozenset(brute_force_edges(V, fam)):
        bad.append("edge enumeration differs from pairwise scan")
    ver = verify_bound(G)
    if not ver.passed:
        bad.append(f"|E|={ver.edges} bound={ver.bound:.6g} per-size={ver.per_size}")
    detail = "; ".join(bad) or ("degenerate" if ver.report.degenerate else "")
    return TrialResult(i, not bad, ver.slack, 1 + len(ver.per_size), detail,
                       instance_to_json(V, fam) if bad else None)


_TRIALS = {"mt": _trial_mt, "convex": _trial_convex, "covpack": _trial_covpack, "lw": _trial_lw, "graph": _trial_graph}


def run_campaign(spec: CampaignSpec) -> CampaignReport:
    """Run ``spec.trials`` independent trials; trial i uses the i-th child
    stream of the seed, so results depend only on (spec, i)."""
    root = SplitMix64(spec.seed)
    out = CampaignReport(spec)
    for i in range(spec.trials):
        out.trials.append(_TRIALS[spec.target](root.child(), spec, i))
    return out


def run_injected(f: SetFunction, seed: int = 0) -> CampaignReport:
    """Single mt trial on a caller-supplied oracle with its claims taken on trust."""
    spec = CampaignSpec("mt", 1, seed, max_n=f.n)
    rng = SplitMix64(seed)
    inst = {"oracle": f.name, "values": {",".join(map(str, members(m))): f.value(m) for m in range(1 << f.n)}}
    return CampaignReport(spec, [_trial_mt(rng, spec, 0, f=f, instance=inst, verify=False)])


def _fmt(x):
    return None if x is None or not math.isfinite(x) else x


def report(results: CampaignReport) -> tuple[str, str]:
    """(json, text) summaries with a stable field order."""
    spec = results.spec
    rows = [
        {"trial": t.trial, "passed": t.passed, "min_slack": _fmt(t.min_slack), "checks": t.checks,
         "detail": t.detail, **({"counterexample": t.instance} if t.instance is not None else {})}
        for t in results.trials
    ]
    doc = {
        "spec": asdict(spec),
        "trials": len(results.trials),
        "failures": len(results.failures),
        "min_slack": _fmt(results.min_slack),
        "exit_status": results.exit_status,
        "results": rows,
    }
    lines = [
        f"target={spec.target} seed={spec.seed} trials={len(results.trials)} "
        f"failures={len(results.failures)} min_slack={doc['min_slack']}"
    ]
    for t in results.trials:
        status = "PASS" if t.passed else "FAIL"
        lines.append(f"  #{t.trial:05d} {status} slack={_fmt(t.min_slack)} {t.detail}".rstrip())
    return json.dumps(doc, indent=2), "\n".join(lines)
