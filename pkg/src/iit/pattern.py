"""Graphs on subsets of {-1,1}^n whose edges are given by difference patterns,
and the Shearer-based bound on their edge count.

A vertex is an ``int`` with bit i-1 set iff coordinate i equals +1, so the
difference pattern of x and y is ``x ^ y`` and flipping a pattern S is
``x ^ S``.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from math import comb

from .families import cover_number
from .setfun import TOL, full_mask, members, size, to_mask


@dataclass(frozen=True)
class VertexSet:
    n: int
    vertices: frozenset

    def __post_init__(self):
        vs = frozenset(int(v) for v in self.vertices)
        if not vs:
            raise ValueError("vertex set is empty")
        if any(v < 0 or v >> self.n for v in vs):
            raise ValueError(f"vertex outside {{-1,1}}^{self.n}")
        object.__setattr__(self, "vertices", vs)

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.vertices

    @classmethod
    def from_vectors(cls, vectors) -> "VertexSet":
        vectors = [tuple(int(x) for x in v) for v in vectors]
        n = len(vectors[0])
        out = []
        for v in vectors:
            if len(v) != n or any(x not in (-1, 1) for x in v):
                raise ValueError(f"{v} is not a length-{n} +-1 vector")
            out.append(sum(1 << i for i, x in enumerate(v) if x == 1))
        if len(set(out)) != len(out):
            raise ValueError("duplicate vertices")
        return cls(n, frozenset(out))

    @classmethod
    def from_bitstrings(cls, strings) -> "VertexSet":
        """'1' is +1 and '0' is -1; the first character is coordinate 1."""
        strings = list(strings)
        n = len(strings[0])
        out = []
        for s in strings:
            if len(s) != n or set(s) - {"0", "1"}:
                raise ValueError(f"bad vertex string {s!r}")
            out.append(sum(1 << i for i, c in enumerate(s) if c == "1"))
        if len(set(out)) != len(out):
            raise ValueError("duplicate vertices")
        return cls(n, frozenset(out))

    @classmethod
    def hypercube(cls, n: int) -> "VertexSet":
        return cls(n, frozenset(range(1 << n)))

    def bitstrings(self) -> list[str]:
        return sorted("".join("1" if v >> i & 1 else "0" for i in range(self.n)) for v in self.vertices)

    def vector(self, v: int) -> tuple[int, ...]:
        return tuple(1 if v >> i & 1 else -1 for i in range(self.n))


@dataclass
class PatternGraph:
    V: VertexSet
    family: tuple[int, ...]
    duplicates: dict[int, int]
    edges: frozenset
    by_size: dict[int, tuple[int, ...]]
    edges_by_size: dict[int, int]

    @property
    def n(self) -> int:
        return self.V.n

    @property
    def r(self) -> int:
        return max(self.by_size)


def build_graph(V: VertexSet, family) -> PatternGraph:
    """Enumerate edges by flipping every pattern at every vertex.

    Repeated patterns are collapsed (edge membership is set membership) and
    reported in ``duplicates``."""
    masks = [to_mask(s) for s in family]
    if not masks:
        raise ValueError("pattern family is empty")
    for m in masks:
        if m == 0:
            raise ValueError("empty pattern")
        if m >> V.n:
            raise ValueError(f"pattern {members(m)} has an index outside [1:{V.n}]")
    counts = Counter(masks)
    uniq = tuple(dict.fromkeys(masks))
    edges = set()
    for x in V.vertices:
        for s in uniq:
            y = x ^ s
            if y in V.vertices:
                edges.add((x, y) if x < y else (y, x))
    by_size: dict[int, list[int]] = {}
    for s in uniq:
        by_size.setdefault(size(s), []).append(s)
    per_d = Counter(size(a ^ b) for a, b in edges)
    r = max(by_size)
    return PatternGraph(
        V, uniq, {s: c for s, c in counts.items() if c > 1}, frozenset(edges),
        {d: tuple(by_size.get(d, ())) for d in range(1, r + 1)},
        {d: per_d.get(d, 0) for d in range(1, r + 1)},
    )


def brute_force_edges(V: VertexSet, family) -> set:
    """Pairwise scan: {x, y} is an edge iff its difference pattern is in the family."""
    pats = {to_mask(s) for s in family}
    vs = sorted(V.vertices)
    return {(a, b) for a, b in combinations(vs, 2) if a ^ b in pats}


@dataclass(frozen=True)
class SizeConstants:
    d: int
    size: int
    m: int
    ell: int
    t: int
    m_degenerate: bool = False
    ell_degenerate: bool = False


def fiber_size_counter(V: VertexSet, S: int) -> Counter:
    keep = full_mask(V.n) & ~S
    return Counter(x & keep for x in V.vertices)


def bound_constants(G: PatternGraph) -> dict[int, SizeConstants]:
    """m_d / l_d: smallest fiber {y : y agrees with x outside S} over pairs
    (x, S in F_d) whose flip x^S is / is not a vertex; t_d: cover number of
    the complements of F_d. Empty minimisation domains get m_d = 2, l_d = 1
    and a degenerate flag."""
    full = full_mask(G.n)
    out = {}
    for d, Fd in G.by_size.items():
        m = ell = None
        for s in Fd:
            keep = full & ~s
            fibers = fiber_size_counter(G.V, s)
            for x in G.V.vertices:
                k = fibers[x & keep]
                if x ^ s in G.V.vertices:
                    m = k if m is None else min(m, k)
                else:
                    ell = k if ell is None else min(ell, k)
        t = cover_number([full & ~s for s in Fd], G.n) if Fd else 0
        out[d] = SizeConstants(d, len(Fd), 2 if m is None else m, 1 if ell is None else ell, t,
                               m is None, ell is None)
    return out


def minimum_admissible_constants(G: PatternGraph) -> dict[int, SizeConstants]:
    """Same t_d and |F_d| as :func:`bound_constants` but m_d = 2, l_d = 1."""
    return {d: replace(c, m=2, ell=1) for d, c in bound_constants(G).items()}


@dataclass(frozen=True)
class SizeTerm:
    d: int
    size: int
    bound: float
    bound_base2: float
    vacuous: bool


@dataclass
class EdgeBound:
    n_vertices: int
    terms: list[SizeTerm]
    constants: dict[int, SizeConstants]

    @property
    def total(self) -> float:
        return sum(t.bound for t in self.terms)

    @property
    def total_base2(self) -> float:
        return sum(t.bound_base2 for t in self.terms)

    @property
    def degenerate(self) -> bool:
        return any(c.m_degenerate or c.ell_degenerate for c in self.constants.values()) or any(
            t.vacuous for t in self.terms)

    def log_coefficient(self) -> Fraction | None:
        """c with total = c |V| log2 |V| when every used m_d = 2 and l_d = 1."""
        if any(t.vacuous for t in self.terms):
            return None
        cs = [self.constants[t.d] for t in self.terms if t.size]
        if any(c.m != 2 or c.ell != 1 for c in cs):
            return None
        return sum((Fraction(c.size - c.t, 2) for c in cs), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "n_vertices": self.n_vertices,
            "total": self.total,
            "total_base2": self.total_base2,
            "per_size": [
                {
                    "d": t.d, "F_d": t.size, "m_d": self.constants[t.d].m, "l_d": self.constants[t.d].ell,
                    "t_d": self.constants[t.d].t, "m_degenerate": self.constants[t.d].m_degenerate,
                    "l_degenerate": self.constants[t.d].ell_degenerate, "vacuous": t.vacuous,
                    "bound": t.bound, "bound_base2": t.bound_base2,
                }
                for t in self.terms
            ],
        }


def size_term(nv: int, c: SizeConstants, log=math.log) -> float:
    """|V| ((|F_d| - t_d) log|V| - |F_d| log l_d) / (2 log(m_d / l_d))."""
    return nv * ((c.size - c.t) * log(nv) - c.size * log(c.ell)) / (2 * (log(c.m) - log(c.ell)))


def edge_bound(G: PatternGraph, constants: dict[int, SizeConstants] | None = None) -> EdgeBound:
    """Per-size and total upper bounds on the edge count.

    When m_d <= l_d the rearrangement divides by a nonpositive number, so the
    trivial bound |F_d| |V| / 2 is used and the term is marked vacuous."""
    constants = bound_constants(G) if constants is None else constants
    nv = len(G.V)
    terms = []
    for d in sorted(constants):
        c = constants[d]
        if nv == 1 or c.size == 0:
            terms.append(SizeTerm(d, c.size, 0.0, 0.0, False))
        elif c.m <= c.ell:
            triv = c.size * nv / 2
            terms.append(SizeTerm(d, c.size, triv, triv, True))
        else:
            terms.append(SizeTerm(d, c.size, size_term(nv, c), size_term(nv, c, math.log2), False))
    return EdgeBound(nv, terms, constants)


@dataclass
class GraphVerdict:
    edges: int
    bound: float
    slack: float
    passed: bool
    per_size: dict[int, tuple[int, float, bool]] = field(default_factory=dict)
    report: EdgeBound | None = None


def verify_bound(G: PatternGraph, tol: float = TOL) -> GraphVerdict:
    """Compare brute-force edge counts (total and per pattern size) with the bound."""
    rep = edge_bound(G)
    brute = brute_force_edges(G.V, G.family)
    per = Counter(size(a ^ b) for a, b in brute)
    e = len(brute)
    scale = max(1.0, abs(rep.total))
    ok = e <= rep.total + tol * scale
    per_size = {}
    for t in rep.terms:
        k = per.get(t.d, 0)
        good = k <= t.bound + tol * max(1.0, abs(t.bound))
        per_size[t.d] = (k, t.bound, good)
        ok = ok and good
    return GraphVerdict(e, rep.total, rep.total - e, ok, per_size, rep)


def all_sets_up_to(n: int, tau: int) -> list[int]:
    return [to_mask(c) for d in range(1, tau + 1) for c in combinations(range(1, n + 1), d)]


@dataclass
class SpecializationRecord:
    n: int
    tau: int
    generic: float
    closed_form: float
    constants: dict[int, SizeConstants]

    @property
    def difference(self) -> float:
        return abs(self.generic - self.closed_form)


def closed_form_bound(n: int, tau: int, nv: int, constants: dict[int, SizeConstants]) -> float:
    """sum_d C(n-1, d-1) |V| (log|V| - (n/d) log l_d) / (2 log(m_d/l_d))."""
    if nv == 1:
        return 0.0
    total = 0.0
    for d in range(1, tau + 1):
        m, ell = constants[d].m, constants[d].ell
        if m <= ell:
            total += comb(n, d) * nv / 2
        else:
            total += comb(n - 1, d - 1) * nv * (math.log(nv) - n / d * math.log(ell)) / (2 * math.log(m / ell))
    return total


def specializations(n: int, tau: int, V: VertexSet | None = None) -> SpecializationRecord:
    """Family of all nonempty sets of size <= tau: generic bound vs the
    binomial closed form, both from the same computed m_d, l_d."""
    if not 1 <= tau <= n:
        raise ValueError(f"need 1 <= tau <= n, got tau={tau}, n={n}")
    V = VertexSet.hypercube(n) if V is None else V
    if V.n != n:
        raise ValueError("vertex set dimension differs from n")
    G = build_graph(V, all_sets_up_to(n, tau))
    consts = bound_constants(G)
    generic = edge_bound(G, consts).total
    return SpecializationRecord(n, tau, generic, closed_form_bound(n, tau, len(V), consts), consts)


def load_instance(path_or_data) -> tuple[VertexSet, list[int]]:
    """Read ``{"n":..., "vertices":["0101",...], "family":{"sets":[[1],[2,3]]}}``."""
    if isinstance(path_or_data, dict):
        data = path_or_data
    else:
        with open(path_or_data) as fh:
            data = json.load(fh)
    V = VertexSet.from_bitstrings(data["vertices"])
    if V.n != int(data["n"]):
        raise ValueError(f"vertex strings have length {V.n}, expected n={data['n']}")
    fam = data["family"]
    sets = fam["sets"] if isinstance(fam, dict) else fam
    return V, [to_mask(s) for s in sets]


def instance_to_json(V: VertexSet, family) -> dict:
    return {"n": V.n, "vertices": V.bitstrings(), "family": {"sets": [list(members(to_mask(s))) for s in family]}}
