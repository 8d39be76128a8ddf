import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from ramsey.core_algebra import (
    ASSOCIATIVE, FINITE_FIBERS, INFLATIONARY, IDENTITY, Apply, OpDef, Signature, builtin, compose,
    enumerate_orderly_terms, monus, plus, shifted_mult, term_arity, term_depth, term_eval,
    term_fiber, term_op, validate_flags, zero,
)
from ramsey.errors import InputError

P = plus()
SIG = Signature.of(P)
ADD2 = Apply(P, (IDENTITY, IDENTITY))
LEFT3 = Apply(P, (ADD2, IDENTITY))


def catalan(n):
    return math.comb(2 * n, n) // (n + 1)


def test_arity_examples():
    assert term_arity(IDENTITY) == 1
    assert term_arity(ADD2) == 2
    assert term_arity(LEFT3) == 3


def test_eval_examples():
    assert term_eval(IDENTITY, [7]) == 7
    assert term_eval(ADD2, [1, 2]) == 3
    assert term_eval(LEFT3, [1, 2, 4]) == 7


def test_eval_rejects_wrong_argument_count():
    with pytest.raises(InputError):
        term_eval(ADD2, [1])


def test_enumeration_small_cases():
    assert enumerate_orderly_terms(SIG, 1, 3) == [IDENTITY]
    assert enumerate_orderly_terms(SIG, 2, 2) == [ADD2]
    three = enumerate_orderly_terms(SIG, 3, 3)
    assert len(three) == 2
    assert set(three) == {LEFT3, Apply(P, (IDENTITY, ADD2))}


@pytest.mark.parametrize("m", range(1, 8))
def test_catalan_counts_against_brute_tree_count(m):
    # independent oracle: count binary trees with m leaves by recursion on the root split
    def trees(n):
        if n == 1:
            return 1
        return sum(trees(k) * trees(n - k) for k in range(1, n))
    assert len(enumerate_orderly_terms(SIG, m, m)) == trees(m) == catalan(m - 1)


def test_depth_bound_prunes():
    # the identity leaf has depth 1, so only the balanced tree fits in depth 3
    terms = enumerate_orderly_terms(SIG, 4, 3)
    assert terms == [Apply(P, (ADD2, ADD2))]
    assert all(term_depth(t) <= 3 for t in terms)
    assert enumerate_orderly_terms(SIG, 4, 2) == []


def test_mixed_arity_signature_counts():
    # ternary plus-like op together with binary plus: 4 leaves -> trees over {2,3}-ary nodes
    t3 = OpDef("sum3", 3, lambda a, b, c: a + b + c, frozenset({INFLATIONARY, FINITE_FIBERS}),
               fiber_bound=lambda c: c)
    sig = Signature.of(P, t3)
    terms = enumerate_orderly_terms(sig, 4, 4)
    assert len(set(terms)) == len(terms)
    assert all(term_arity(t) == 4 for t in terms)
    def count(n):
        if n == 1:
            return 1
        total = 0
        for k in (2, 3):
            total += _splits(n, k, count)
        return total
    assert len(terms) == count(4)


def _splits(n, k, count):
    if k == 1:
        return count(n)
    return sum(count(i) * _splits(n - i, k - 1, count) for i in range(1, n - k + 2))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 50), min_size=1, max_size=5))
def test_every_plus_term_computes_the_sum(args):
    for t in enumerate_orderly_terms(SIG, len(args), len(args)):
        assert term_eval(t, args) == sum(args)


def test_compose_substitutes_in_order():
    t = compose(ADD2, [ADD2, IDENTITY])
    assert t == LEFT3
    assert compose(IDENTITY, [ADD2]) == ADD2
    with pytest.raises(InputError):
        compose(ADD2, [IDENTITY])


def test_shifted_mult_is_associative_and_flags_validate():
    op = shifted_mult()
    assert validate_flags(op) == []
    rng = random.Random(1)
    for _ in range(200):
        a, b, c = (rng.randint(0, 40) for _ in range(3))
        assert op.fn(op.fn(a, b), c) == op.fn(a, op.fn(b, c))


def test_flag_validation_catches_false_claims():
    bad = monus(flags=[FINITE_FIBERS])
    assert any(msg.startswith(FINITE_FIBERS) for msg in validate_flags(bad))
    assert validate_flags(zero()) == []
    assert ASSOCIATIVE in zero().flags


def test_builtin_lookup():
    assert builtin("plus") == P
    with pytest.raises(InputError):
        builtin("nope")


def test_term_fiber_matches_brute_force():
    for t in enumerate_orderly_terms(SIG, 3, 3):
        for c in range(6):
            brute = {(a, b, d) for a in range(c + 1) for b in range(c + 1) for d in range(c + 1) if a + b + d == c}
            assert set(term_fiber(t, c)) == brute


def test_term_op_inherits_flags():
    op = term_op(LEFT3)
    assert op.arity == 3
    assert FINITE_FIBERS in op.flags
    assert op.fn(1, 2, 4) == 7
    ident = term_op(IDENTITY)
    assert ident.fn(9) == 9
