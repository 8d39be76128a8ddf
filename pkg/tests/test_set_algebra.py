import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ramsey.core_algebra import Signature, monus, plus
from ramsey.errors import InputError
from ramsey.set_algebra import (
    ClosureFamily, Compl, Cyc, FiniteCofiniteFamily, Fib, Gen, GeneratorOracle, Inter, Lit, Pre,
    RestrictedFamily, SamplingPlan, SymSet, Union, check_admissible_sampled, closure_enumerate, compl,
    family_union, inter, product_preimage, symset_cyc, symset_fib, symset_member, symset_pre,
    term_generators, term_member, term_to_symset, union,
)

P = plus()
SIG = Signature.of(P)
GRID = 7  # strictly larger than every support entry drawn below
EVENS = GeneratorOracle("evens", 1, lambda t: t[0] % 2 == 0)
DIAG = GeneratorOracle("diag", 2, lambda t: t[0] == t[1])


def fin(*pts):
    return SymSet.finite(len(pts[0]) if pts else 1, pts)


def cof(*pts):
    return SymSet.cofinite_of(len(pts[0]) if pts else 1, pts)


def symsets(dim):
    pt = st.tuples(*[st.integers(0, 5)] * dim)
    return st.builds(lambda c, s: SymSet(dim, c, tuple(s)), st.booleans(), st.lists(pt, max_size=6))


def grid(dim, bound=GRID):
    return itertools.product(range(bound), repeat=dim)


# -- worked examples --------------------------------------------------------------------------


def test_boolean_examples():
    assert compl(fin((3,))) == cof((3,))
    assert inter(cof((1,)), cof((2,))) == cof((1,), (2,))
    assert union(fin((1,)), fin((2,))) == fin((1,), (2,))


def test_cyc_examples():
    assert symset_cyc(fin((1, 2))) == fin((2, 1))
    assert symset_cyc(cof((0, 3), (5, 5))) == cof((3, 0), (5, 5))


def test_fib_examples():
    assert symset_fib(0, cof((0, 3))) == cof((3,))
    assert symset_fib(5, fin((0, 3))) == SymSet.empty(1)
    assert symset_fib(0, SymSet.full(2)) == SymSet.full(1)


def test_pre_examples():
    assert symset_pre(P, 1, fin((5,))) == fin(*[(a, 5 - a) for a in range(6)])
    assert symset_pre(P, 1, SymSet.full(1)) == SymSet.full(2)
    assert symset_pre(P, 2, cof((0, 0))) == cof((0, 0, 0))


def test_pre_requires_finite_fibers():
    with pytest.raises(InputError):
        symset_pre(monus(), 1, fin((0,)))


def test_member_examples():
    assert symset_member((3,), fin((3,)))
    assert not symset_member((3,), cof((3,)))
    assert symset_member((7, 7), cof((0, 0)))
    with pytest.raises(InputError):
        symset_member((1, 2), fin((3,)))


def test_term_member_examples():
    o = {"evens": EVENS}
    assert term_member((4,), Gen("evens"), o)
    assert term_member((1, 3), Pre(P, 1, Gen("evens")), o)
    assert not term_member((3,), Compl(Union(Gen("evens"), Lit(fin((3,))))), o)
    with pytest.raises(InputError):
        term_member((4,), Gen("odds"), o)


def test_mixed_dimensions_rejected():
    with pytest.raises(InputError):
        Union(Gen("evens"), Gen("diag", 2))


# -- semantics against explicit point sets ----------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(symsets(2), symsets(2))
def test_boolean_ops_match_pointwise(X, Y):
    for t in grid(2):
        x, y = symset_member(t, X), symset_member(t, Y)
        assert symset_member(t, union(X, Y)) == (x or y)
        assert symset_member(t, inter(X, Y)) == (x and y)
        assert symset_member(t, compl(X)) == (not x)


@settings(max_examples=60, deadline=None)
@given(symsets(3))
def test_cyc_semantics_and_order(X):
    Y = symset_cyc(X)
    for t in grid(3, 6):
        assert symset_member(t[1:] + t[:1], Y) == symset_member(t, X)
    assert symset_cyc(symset_cyc(Y)) == X


@settings(max_examples=60, deadline=None)
@given(symsets(2), st.integers(0, 6))
def test_fib_semantics(X, c):
    Y = symset_fib(c, X)
    for a in range(GRID):
        assert symset_member((a,), Y) == symset_member((c, a), X)


@settings(max_examples=40, deadline=None)
@given(symsets(1))
def test_pre_semantics(X):
    Y = symset_pre(P, 1, X)
    for a, b in grid(2):
        assert symset_member((a, b), Y) == symset_member((a + b,), X)


@settings(max_examples=40, deadline=None)
@given(symsets(2))
def test_product_preimage_semantics(X):
    Y = product_preimage([P, P], X)
    assert Y.dim == 4
    for t in grid(4, 4):
        assert symset_member(t, Y) == symset_member((t[0] + t[1], t[2] + t[3]), X)


@settings(max_examples=40, deadline=None)
@given(symsets(2), symsets(2))
def test_terms_evaluate_like_their_symset(X, Y):
    T = Compl(Union(Lit(X), Cyc(Lit(Y))))
    S = term_to_symset(T)
    for t in grid(2):
        assert term_member(t, T) == symset_member(t, S)


# -- closure -------------------------------------------------------------------------------------


def test_closure_depth_zero_is_generators_and_singletons():
    terms = closure_enumerate({"evens": EVENS}, SIG, 0, {1})
    assert terms[0] == Gen("evens")
    assert all(isinstance(T, Lit) and len(T.value.support) == 1 and not T.value.cofinite for T in terms[1:])


def test_closure_of_singletons_is_finite_or_cofinite():
    terms = closure_enumerate({}, SIG, 2, {1}, constructors=("union", "inter", "compl"))
    assert len(terms) > 10
    for T in terms:
        S = term_to_symset(T)
        for x in range(GRID):
            assert term_member((x,), T) == symset_member((x,), S)


def test_closure_one_dim2_generator_depth_one():
    terms = closure_enumerate({"diag": DIAG}, SIG, 1, {1, 2})
    g = Gen("diag", 2)
    for T in (Cyc(g), Fib(0, g), Fib(1, g), Compl(g)):
        assert T in terms


def test_closure_is_deterministic_and_deduplicated():
    a = closure_enumerate({"evens": EVENS, "diag": DIAG}, SIG, 1, {1, 2})
    b = closure_enumerate({"diag": DIAG, "evens": EVENS}, SIG, 1, {1, 2})
    assert a == b
    assert len(set(a)) == len(a)


def test_term_generators():
    T = Inter(Gen("evens"), Fib(0, Gen("diag", 2)))
    assert term_generators(T) == {"evens", "diag"}


# -- admissibility ------------------------------------------------------------------------------------


def test_finite_cofinite_family_is_admissible():
    rep = check_admissible_sampled(FiniteCofiniteFamily(SIG), SamplingPlan(samples=256))
    assert rep.passed, rep.counterexamples
    assert rep.checked["cyc"] == 256 and rep.checked["pre"] == 256


def test_generated_family_is_admissible():
    fam = ClosureFamily({"evens": EVENS, "diag": DIAG}, SIG, 1, dims=(1, 2))
    rep = check_admissible_sampled(fam, SamplingPlan(samples=256))
    assert rep.passed, rep.counterexamples


def test_family_without_cyc_fails_with_counterexample():
    fam = ClosureFamily({"diag": DIAG}, SIG, 1, dims=(1, 2))
    rep = check_admissible_sampled(RestrictedFamily(fam, ["cyc"]), SamplingPlan(samples=64))
    assert not rep.passed
    assert rep.counterexamples[0]["clause"] == "cyc"


def test_family_union():
    fc = FiniteCofiniteFamily(SIG, dims=(1, 2))
    gen = ClosureFamily({"evens": EVENS}, SIG, 1, dims=(1, 2))
    same = family_union([gen, gen])
    assert same.members(1) == gen.members(1)
    both = family_union([fc, gen])
    assert both.contains(Gen("evens")) and both.contains(fin((3,)))
    assert check_admissible_sampled(both, SamplingPlan(samples=128)).passed
    with pytest.raises(InputError):
        family_union([gen, FiniteCofiniteFamily(Signature(()))])


def test_random_sets_membership_consistent_with_family():
    fam = FiniteCofiniteFamily(SIG, seed=3)
    rng = random.Random(0)
    for X in fam.members(2)[:10]:
        t = (rng.randint(0, 9), rng.randint(0, 9))
        assert fam.member(t, X) == symset_member(t, X)
