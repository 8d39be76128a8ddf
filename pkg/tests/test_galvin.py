import itertools
import random

import pytest

from ramsey.core_algebra import Signature, monus, plus, shifted_mult
from ramsey.errors import BudgetExhausted, InputError, is_unknown
from ramsey.galvin import (
    ChainNormalForm, FRChainField, build_fr_field, chain_members, check_chain_axioms, fr_chain_member,
    galvin_construct, nf_compl, nf_member, nf_subset, normalize, verify_strongly_reducible,
)
from ramsey.reduction import StreamSeq, arithmetic, fr_member, naturals, powers2
from ramsey.set_algebra import Compl, Fib, Gen, Inter, Lit, SymSet, Union
from ramsey.ultrafilter import COFINITE, FRChainUF, Principal

P = plus()
SIG = Signature.of(P)


@pytest.fixture(scope="module")
def field():
    return FRChainField(powers2(), SIG, 6)


def all_sums(b):
    return {sum(c) for r in range(1, len(b) + 1) for c in itertools.combinations(b, r)}


# -- normal forms ------------------------------------------------------------------------------


def test_normalize_examples(field):
    nf = normalize(field, Inter(field.gen(2), field.gen(5)))
    assert nf.index == 5 and not nf.plus and not nf.minus
    assert is_unknown(normalize(field, Inter(field.gen(1), Compl(field.gen(3)))))


def test_normal_form_keeps_only_effective_exceptions(field):
    T = Inter(Union(field.gen(1), Lit(SymSet.singleton(0))), Compl(Lit(SymSet.singleton(7))))
    # over the naturals G1 = FS(2, 3, ...) contains 7, so the removal is recorded
    nat = FRChainField(naturals(), SIG, 3)
    nf = normalize(nat, T)
    assert (nf.index, set(nf.plus), set(nf.minus)) == (1, {0}, {7})
    # over powers of two 7 is odd and already outside G1
    nf = normalize(field, T)
    assert (nf.index, set(nf.plus), set(nf.minus)) == (1, {0}, set())


def test_normalize_rejects_foreign_generator(field):
    with pytest.raises(InputError):
        normalize(field, Gen("H0"))


def test_normalize_non_boolean_is_unknown(field):
    assert is_unknown(normalize(field, Fib(0, Lit(SymSet.full(2)))))
    assert is_unknown(normalize(field, Lit(SymSet.full(2))))


def test_normal_form_membership_matches_term_evaluation(field):
    rng = random.Random(7)
    forms, undecided = chain_members(field, 2)
    assert forms and undecided
    for nf in forms:
        for x in rng.sample(range(200), 40):
            assert isinstance(nf_member(field, x, nf), bool)
    # cross-check a few against the oracle semantics of the term they came from
    with_one = normalize(field, Union(field.gen(3), Lit(SymSet.singleton(1))))
    outside = normalize(field, Compl(field.gen(0)))
    for x in range(150):
        assert nf_member(field, x, with_one) == (x == 1 or fr_member(x, powers2(), 3, SIG))
        assert nf_member(field, x, outside) == (not fr_member(x, powers2(), 0, SIG))


# -- chain ultrafilter ---------------------------------------------------------------------------


def test_chain_membership_examples(field):
    assert fr_chain_member(field, field.gen(3)) is True
    assert fr_chain_member(field, SymSet.cofinite_of(1, [(x,) for x in range(10)])) is True
    assert fr_chain_member(field, SymSet.singleton(5)) is False


def test_chain_membership_monotone(field):
    forms, _ = chain_members(field, 2)
    for X in forms:
        for Y in forms:
            if fr_chain_member(field, X) and nf_subset(field, X, Y) is True:
                assert fr_chain_member(field, Y)


def test_chain_axioms_on_depth_two_forms(field):
    forms, _ = chain_members(field, 2)
    rep = check_chain_axioms(field, forms)
    assert rep["passed"], rep["failures"]
    for nf in forms:
        assert fr_chain_member(field, nf) != fr_chain_member(field, nf_compl(nf))


def test_field_preconditions():
    with pytest.raises(InputError):
        FRChainField(powers2(), Signature.of(monus()), 2)
    with pytest.raises(InputError):
        FRChainField(StreamSeq.finite([3, 2, 1]), SIG, 2)


# -- homogeneous sequences ----------------------------------------------------------------------------


def test_galvin_cofinite_example():
    X = SymSet.cofinite_of(1, [(x,) for x in range(10)])
    res = galvin_construct(COFINITE, P, X, 8)
    assert len(res.seq) == 8 and list(res.seq) == sorted(set(res.seq))
    sums = all_sums(res.seq)
    assert all(s >= 10 for s in sums)
    assert res.values_checked == 255


def test_galvin_full_set():
    res = galvin_construct(COFINITE, P, SymSet.full(1), 5)
    assert res.seq == (0, 1, 2, 3, 4)


def test_galvin_principal_zero():
    res = galvin_construct(Principal(0), P, SymSet.singleton(0), 1)
    assert res.seq == (0,)


def test_galvin_shifted_mult():
    X = SymSet.cofinite_of(1, [(3,), (4,), (15,)])
    res = galvin_construct(COFINITE, shifted_mult(), X, 5)
    assert res.verified and res.values_checked == 31


def test_galvin_chain_example(field):
    res = galvin_construct(FRChainUF(field), P, field.gen(2), 5)
    assert res.seq == (4, 8, 16, 32, 64)
    assert all(fr_member(v, powers2(), 2, SIG) for v in all_sums(res.seq))


def test_galvin_rejects_non_members_and_non_idempotent():
    with pytest.raises(InputError):
        galvin_construct(COFINITE, P, SymSet.singleton(3), 3)
    with pytest.raises(InputError):
        galvin_construct(Principal(1), P, SymSet.singleton(1), 2)


def test_galvin_scan_cap():
    X = SymSet.cofinite_of(1, [(x,) for x in range(50)])
    with pytest.raises(BudgetExhausted):
        galvin_construct(COFINITE, P, X, 2, scan_cap=20)


# -- strong reducibility ----------------------------------------------------------------------------


def test_strongly_reducible_chain(field):
    rep = verify_strongly_reducible(FRChainUF(field), SIG, field.gen(0), powers2(), 5)
    assert rep["verdict"] is True and rep["tails"] == [True] * 5


def test_strongly_reducible_cofinite_fails_with_gap():
    # multiples of 3 have FS sets missing every non-multiple, so none is cofinite
    a = StreamSeq.of_rule(arithmetic(3, 3))
    rep = verify_strongly_reducible(COFINITE, SIG, SymSet.full(1), a, 3)
    assert rep["verdict"] is False and rep["tails"] == [False] * 3


def test_strongly_reducible_zero_tails_is_homogeneity():
    rep = verify_strongly_reducible(COFINITE, SIG, SymSet.full(1), naturals(), 0)
    assert rep["verdict"] is True and rep["tails"] == []


def test_build_fr_field_depth_zero():
    fam, U, rep = build_fr_field(powers2(), SIG, 0, tails=1)
    assert "G0" in fam.oracles and len(fam.oracles) == 1
    assert fr_chain_member(U.field, U.field.gen(0)) is True
    assert fr_chain_member(U.field, SymSet.singleton(1)) is False


def test_normal_form_json():
    nf = ChainNormalForm(2, (1,), (9,))
    assert nf.to_json()["index"] == 2


def test_strongly_reducible_cofinite_passes_on_naturals():
    # FS(n, n+1, ...) contains every integer >= n, so each tail set is cofinite
    rep = verify_strongly_reducible(COFINITE, SIG, SymSet.full(1), naturals(), 3)
    assert rep["verdict"] is True
