import math
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from iit.harness import SplitMix64, random_graph_instance
from iit.pattern import (
    SizeConstants,
    VertexSet,
    all_sets_up_to,
    bound_constants,
    brute_force_edges,
    build_graph,
    edge_bound,
    minimum_admissible_constants,
    specializations,
    verify_bound,
)

WORKED_FAMILY = [[1], [2], [3], [4], [5], [1, 3], [1, 4], [3, 4], [2, 5], [1, 3, 4]]


def singletons(n):
    return [[i] for i in range(1, n + 1)]


def test_vertex_encodings():
    V = VertexSet.from_bitstrings(["10", "01"])
    assert V.vertices == frozenset({0b01, 0b10})
    assert V.vector(0b01) == (1, -1)
    assert VertexSet.from_vectors([(1, -1), (-1, 1)]) == V
    assert V.bitstrings() == ["01", "10"]
    with pytest.raises(ValueError):
        VertexSet.from_bitstrings(["10", "10"])
    with pytest.raises(ValueError):
        VertexSet.from_vectors([(1, 0)])


def test_square_and_antipodes():
    G = build_graph(VertexSet.hypercube(2), singletons(2))
    assert len(G.edges) == 4
    G = build_graph(VertexSet.hypercube(3), [[1, 2, 3]])
    assert len(G.edges) == 4
    assert all(a ^ b == 0b111 for a, b in G.edges)


def test_random_against_pairwise_scan():
    rng = SplitMix64(5)
    V = VertexSet(6, frozenset(rng.sample(range(64), 20)))
    fam = [[1], [2, 3], [1, 4, 6], [5], [2, 6], [1, 2, 3, 4, 5, 6]]
    G = build_graph(V, fam)
    assert G.edges == frozenset(brute_force_edges(V, fam))


def test_duplicates_collapsed_and_range_checked():
    G = build_graph(VertexSet.hypercube(2), [[1], [1], [2]])
    assert G.family == (1, 2) and G.duplicates == {1: 2}
    with pytest.raises(ValueError):
        build_graph(VertexSet.hypercube(2), [[3]])


def test_constants_hypercube_singletons():
    for n in (2, 3, 5):
        c = bound_constants(build_graph(VertexSet.hypercube(n), singletons(n)))[1]
        assert (c.m, c.ell, c.t) == (2, 1, n - 1)
        assert c.ell_degenerate and not c.m_degenerate


def test_constants_worked_family():
    c = bound_constants(build_graph(VertexSet.hypercube(5), WORKED_FAMILY))
    assert [(c[d].size, c[d].t) for d in (1, 2, 3)] == [(5, 4), (4, 2), (1, 0)]


def test_constants_missing_partner():
    V = VertexSet.from_vectors([(1, 1), (1, -1)])
    c = bound_constants(build_graph(V, [[1]]))[1]
    assert c.ell == 1 and not c.ell_degenerate
    assert c.m == 2 and c.m_degenerate


def test_worked_example_bound_coefficient():
    for V in (VertexSet.hypercube(5), VertexSet.from_bitstrings(["01011", "11100", "00000"])):
        G = build_graph(V, WORKED_FAMILY)
        rep = edge_bound(G, minimum_admissible_constants(G))
        assert rep.log_coefficient() == 2
        nv = len(V)
        assert rep.total == pytest.approx(2 * nv * math.log2(nv), rel=1e-12)


@pytest.mark.parametrize("n", range(2, 9))
def test_hypercube_singletons_tight(n):
    G = build_graph(VertexSet.hypercube(n), singletons(n))
    rep = edge_bound(G)
    assert len(G.edges) == n * 2 ** (n - 1) == rep.total_base2
    assert abs(rep.total - len(G.edges)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**63), st.integers(1, 7))
def test_singletons_any_vertex_set(seed, n):
    rng = SplitMix64(seed)
    V = VertexSet(n, frozenset(rng.sample(range(1 << n), rng.randint(1, 1 << n))))
    rep = edge_bound(build_graph(V, singletons(n)))
    nv = len(V)
    assert rep.total == pytest.approx(0.5 * nv * math.log2(nv), abs=1e-9)


def test_single_vertex_bound_zero():
    rep = edge_bound(build_graph(VertexSet(3, frozenset({5})), [[1], [2, 3]]))
    assert rep.total == 0


def test_equal_m_and_l_fallback_is_sound():
    # fiber of (x, {1}) is {x, x^1} when both present, and a missing partner
    # leaves a fiber of size 1 only when the second pattern coordinate differs.
    V = VertexSet.from_bitstrings(["000", "100", "010", "001", "101"])
    G = build_graph(V, [[1, 2]])
    c = bound_constants(G)[2]
    rep = edge_bound(G)
    if c.m <= c.ell:
        assert rep.terms[-1].vacuous
    assert verify_bound(G).passed
    forced = {1: SizeConstants(1, 1, 2, 2, 0), 2: c}
    G1 = build_graph(V, [[1], [1, 2]])
    rep = edge_bound(G1, {1: forced[1], 2: bound_constants(G1)[2]})
    assert rep.terms[0].vacuous and rep.terms[0].bound == 0.5 * len(V)
    assert len([e for e in G1.edges if bin(e[0] ^ e[1]).count("1") == 1]) <= rep.terms[0].bound


def test_specialization_tau1():
    for n in (3, 4, 5):
        rec = specializations(n, 1)
        nv = 2 ** n
        assert rec.generic == pytest.approx(0.5 * nv * math.log2(nv), abs=1e-9)
        assert rec.difference <= 1e-9


def test_specialization_full_tau():
    for n in (2, 3, 4):
        rec = specializations(n, n)
        assert rec.difference <= 1e-9


def test_specialization_random_tau2():
    rng = SplitMix64(3)
    V = VertexSet(4, frozenset(rng.sample(range(16), 8)))
    rec = specializations(4, 2, V)
    assert rec.difference <= 1e-9


def test_t_d_for_complete_layers():
    for n in range(2, 7):
        for tau in range(1, n + 1):
            c = bound_constants(build_graph(VertexSet.hypercube(n), all_sets_up_to(n, tau)))
            for d in range(1, tau + 1):
                assert c[d].t == comb(n - 1, d)
                assert c[d].size - c[d].t == comb(n - 1, d - 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**63), st.integers(1, 8))
def test_random_instances(seed, n):
    V, fam = random_graph_instance(SplitMix64(seed), n)
    G = build_graph(V, fam)
    assert G.edges == frozenset(brute_force_edges(V, fam))
    for a, b in G.edges:
        assert bin(a ^ b).count("1") >= 1
    consts = bound_constants(G)
    nv = len(V)
    for d, c in consts.items():
        if not c.m_degenerate:
            assert 2 <= c.m <= min(2 ** d, nv)
        if not c.ell_degenerate:
            assert 1 <= c.ell <= min(2 ** d - 1, nv)
    rep = edge_bound(G, consts)
    assert abs(rep.total - rep.total_base2) <= 1e-12 * max(1.0, rep.total)
    assert verify_bound(G).passed
