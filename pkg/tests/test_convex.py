import math
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from conftest import pmfs
from iit.convex import (
    ScalarTransform,
    ShapeError,
    convex_bounds_strong,
    convex_bounds_strong_supermodular,
    convex_bounds_weak,
    covering_packing_convex,
    epi_bound,
    equality_certificate,
    parse_transform,
    verify_shape,
)
from iit.families import SetFamily, han_family, shearer_weights, singletons
from iit.mt import mt_bounds
from iit.setfun import JointDistribution, cut_oracle, entropy_oracle, members, modular_oracle, shannon_entropy

LN2 = math.log(2)


def test_parse_builtins():
    assert parse_transform("identity")(3.0) == 3.0
    assert parse_transform("exp2x")(LN2) == pytest.approx(4.0)
    assert parse_transform("affine:2,1")(3.0) == 7.0
    assert parse_transform("power:2")(3.0) == 9.0
    assert parse_transform("sqrt")(4.0) == 2.0
    with pytest.raises(ValueError):
        parse_transform("log")
    with pytest.raises(ValueError):
        parse_transform("power:0.5")


def test_shape_checks():
    assert verify_shape(parse_transform("exp2x"), -1, 1, ["convex", "nondecreasing"]) == {
        "convex": True, "nondecreasing": True}
    assert not verify_shape(parse_transform("sqrt"), 0, 4, ["convex"])["convex"]
    assert verify_shape(parse_transform("power:2"), -1, 1, ["convex", "nondecreasing"])["convex"]


def test_lying_transform_rejected(skewed):
    liar = ScalarTransform("neg-square", lambda x: -x * x, frozenset({"nondecreasing", "convex"}))
    with pytest.raises(ShapeError):
        convex_bounds_strong(entropy_oracle(skewed), han_family(2, 1), liar)


def test_identity_matches_fractional_bound(skewed):
    f = entropy_oracle(skewed)
    rep = convex_bounds_strong(f, han_family(2, 1), parse_transform("identity"))
    mt = mt_bounds(f, han_family(2, 1))
    assert rep.rhs_upper == pytest.approx(mt.strong_upper / 2, abs=1e-15)
    assert rep.rhs_lower == pytest.approx(mt.strong_lower / 2, abs=1e-15)
    assert rep.lhs == pytest.approx(mt.f_full / 2, abs=1e-15)


def test_exp2x_independent_equality(independent):
    rep = convex_bounds_strong(entropy_oracle(independent), han_family(2, 1), parse_transform("exp2x"))
    assert rep.lhs == pytest.approx(4.0) and rep.rhs_upper == pytest.approx(4.0)


def test_exp2x_skewed_direct():
    pmf = [0.5, 0.25, 0.125, 0.125]
    f = entropy_oracle(JointDistribution((2, 2), pmf))
    h = -sum(p * math.log(p) for p in pmf)
    h1 = shannon_entropy([0.75, 0.25])
    lhs = math.exp(h)
    rhs = 0.5 * (math.exp(2 * h1) + math.exp(2 * (h - h1)))
    rep = convex_bounds_strong(f, han_family(2, 1), parse_transform("exp2x"))
    assert rep.lhs == pytest.approx(lhs, abs=1e-12)
    assert rep.rhs_upper == pytest.approx(rhs, abs=1e-12)
    assert rep.gap_upper > 0


def test_weak_reduces_to_k_uniform_average():
    p = JointDistribution((2, 2, 2), [0.2, 0.05, 0.1, 0.15, 0.05, 0.2, 0.15, 0.1])
    f = entropy_oracle(p)
    g = parse_transform("exp2x")
    for k in (1, 2, 3):
        wf = han_family(3, k)
        avg = sum(g(f.value(s) / k) for s in wf.sets) / comb(3, k)
        assert convex_bounds_weak(f, wf, g).rhs_upper == pytest.approx(avg, abs=1e-12)


def test_modular_affine_equality():
    f = modular_oracle([0.5, 1.0, 2.0])
    rep = convex_bounds_weak(f, han_family(3, 2), parse_transform("affine:3,1"))
    assert abs(rep.gap_upper) <= 1e-12 and abs(rep.gap_lower) <= 1e-12


def test_power2_correlated_strict(correlated):
    f = entropy_oracle(correlated)
    rep = convex_bounds_weak(f, han_family(2, 1), parse_transform("power:2"))
    # lhs (ln2/2)^2, rhs (ln2)^2
    assert rep.lhs == pytest.approx(LN2 ** 2 / 4)
    assert rep.rhs_upper == pytest.approx(LN2 ** 2)
    assert rep.gap_upper > 1e-6


def test_covering_partition_bit_identical(skewed):
    f = entropy_oracle(skewed)
    for name in ("exp2x", "identity", "sqrt"):
        g = parse_transform(name)
        a = covering_packing_convex(f, han_family(2, 1), g)
        b = convex_bounds_strong(f, han_family(2, 1), g)
        assert (a.lhs, a.rhs_upper, a.rhs_lower) == (b.lhs, b.rhs_upper, b.rhs_lower)


def test_covering_shearer_exp2x():
    p = JointDistribution((2, 2, 2), [0.2, 0.05, 0.1, 0.15, 0.05, 0.2, 0.15, 0.1])
    f = entropy_oracle(p)
    rep = covering_packing_convex(f, shearer_weights(SetFamily(3, (0b011, 0b110, 0b101))), parse_transform("exp2x"))
    assert rep.normalizer == pytest.approx(1.0)
    assert rep.passed


def test_covering_normalizer_and_direct_value():
    p = JointDistribution((2, 2, 2), [0.2, 0.05, 0.1, 0.15, 0.05, 0.2, 0.15, 0.1])
    f = entropy_oracle(p)
    wf = shearer_weights(SetFamily(3, (0b011, 0b110, 0b101, 0b001)))
    g = parse_transform("exp2x")
    rep = covering_packing_convex(f, wf, g)
    # weights 1/2 on three pairs and one singleton: v = (3*2 + 1) / (2*3)
    v = 7 / 6
    assert rep.normalizer == pytest.approx(v)
    terms = [(0b011, f([1, 2])), (0b110, f.cond([2, 3], [1])), (0b101, f([1, 3])), (0b001, f([1]))]
    rhs = sum(0.5 * len(members(s)) / (3 * v) * g(x / len(members(s))) for s, x in terms)
    assert rep.lhs == pytest.approx(g(f.full_value / (3 * v)))
    assert rep.rhs_upper == pytest.approx(rhs)
    assert rep.passed


def test_packing_half_singletons(skewed):
    rep = covering_packing_convex(entropy_oracle(skewed), singletons(2, Fraction(1, 2)), parse_transform("identity"))
    assert rep.rhs_upper is None and rep.rhs_lower is not None
    assert rep.normalizer == pytest.approx(0.5)
    assert rep.passed


def test_covering_rejects_cut():
    from iit.setfun import StructureError
    with pytest.raises(StructureError):
        covering_packing_convex(cut_oracle([(1, 2), (2, 3), (1, 3)], 3), han_family(3, 1), parse_transform("exp2x"))


def test_certificate_examples(correlated):
    cert = equality_certificate(modular_oracle([1, 2, 3]), han_family(3, 2), parse_transform("affine:2,0"))
    assert cert.f_modular and cert.g_affine_on_interval and cert.equality_observed

    cert = equality_certificate(modular_oracle([1, 2, 3]), han_family(3, 2), parse_transform("exp2x"))
    assert cert.f_modular and not cert.g_affine_on_interval and not cert.equality_observed
    assert cert.slack > 1e-6

    cert = equality_certificate(entropy_oracle(correlated), han_family(2, 1), parse_transform("affine:1,0"))
    assert not cert.f_modular and cert.g_affine_on_interval and not cert.equality_observed
    assert cert.consistent

    cert = equality_certificate(modular_oracle([1, 2, 3]), han_family(3, 2), parse_transform("affine:2,0"), "lower")
    assert cert.equality_observed and cert.consistent


def test_certificate_needs_strict_increase():
    with pytest.raises(ShapeError):
        equality_certificate(modular_oracle([1, 2]), han_family(2, 1), parse_transform("power:2"))


def test_epi_examples(independent):
    rep = epi_bound(independent, han_family(2, 1))
    assert rep.lhs == pytest.approx(4) and rep.rhs_conditioned == pytest.approx(4)

    p = JointDistribution((2, 2), [0.4, 0.1, 0.1, 0.4])
    f = entropy_oracle(p)
    rep = epi_bound(p, han_family(2, 1))
    lhs = math.exp(f.full_value)
    cond = 0.5 * (math.exp(2 * f([1])) + math.exp(2 * f.cond([2], [1])))
    uncond = 0.5 * (math.exp(2 * f([1])) + math.exp(2 * f([2])))
    assert (rep.lhs, rep.rhs_conditioned, rep.rhs_unconditioned) == pytest.approx((lhs, cond, uncond))
    assert lhs <= cond <= uncond and rep.passed

    pair = [0.4, 0.1, 0.1, 0.4]
    p3 = JointDistribution((2, 2, 2), [0.5 * q for q in pair] * 2)
    rep = epi_bound(p3, han_family(3, 2))
    assert rep.passed and rep.lhs <= rep.rhs_conditioned <= rep.rhs_unconditioned


def test_supermodular_variant_matches_direct(skewed):
    f = entropy_oracle(skewed).negated()
    g = ScalarTransform("exp(-2x)", lambda x: math.exp(-2 * x), frozenset({"nonincreasing", "convex"}))
    rep = convex_bounds_strong_supermodular(f, han_family(2, 1), g)
    lhs = g(f.full_value / 2)
    rhs = 0.5 * (g(f([1])) + g(f.cond([2], [1])))
    assert rep.lhs == pytest.approx(lhs) and rep.rhs_upper == pytest.approx(rhs)
    assert lhs <= rhs + 1e-12 and rep.passed


G_UP = ("identity", "exp2x", "power:2", "power:3")
G_LOW = ("identity", "sqrt")


@settings(max_examples=60, deadline=None)
@given(pmfs(), st.data())
def test_jensen_bounds_random(p, data):
    f = entropy_oracle(p)
    n = f.n
    order = data.draw(st.permutations(range(1, n + 1)))
    for k in range(1, n + 1):
        wf = han_family(n, k)
        for name in G_UP:
            g = parse_transform(name)
            s = convex_bounds_strong(f, wf, g, order)
            w = convex_bounds_weak(f, wf, g, order)
            assert s.lhs <= s.rhs_upper + 1e-9
            assert w.rhs_upper >= s.rhs_upper - 1e-9
            assert s.passed and w.passed
        for name in G_LOW:
            g = parse_transform(name)
            s = convex_bounds_strong(f, wf, g, order)
            w = convex_bounds_weak(f, wf, g, order)
            assert s.lhs >= s.rhs_lower - 1e-9 and w.lhs >= w.rhs_lower - 1e-9
        ident = convex_bounds_strong(f, wf, parse_transform("identity"), order)
        mt = mt_bounds(f, wf, order)
        assert abs(ident.rhs_upper - mt.strong_upper / n) <= 1e-12
        assert abs(ident.rhs_lower - mt.strong_lower / n) <= 1e-12
