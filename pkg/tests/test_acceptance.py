"""Acceptance suite: twelve criteria, each with its own time limit.

Each criterion returns ``(passed, detail)``.  Results are recorded so the
pytest terminal summary (see conftest.py) prints one PASS/FAIL line per
criterion.  Running this file directly prints the same lines.
"""

import itertools
import math
import random
import sys
import time

import pytest

from ramsey.core_algebra import Signature, enumerate_orderly_terms, plus, shifted_mult, term_eval, zero
from ramsey.galvin import FRChainField, build_fr_field, galvin_construct
from ramsey.reduction import check_witness, fr_enumerate, naturals, powers2
from ramsey.search import SearchBudget, mod_coloring, parity, probe_degeneracy, search_monochromatic
from ramsey.set_algebra import ClosureFamily, FiniteCofiniteFamily, SamplingPlan, SymSet, compl, inter, random_symset
from ramsey.ultrafilter import (
    COFINITE, FRChainUF, Principal, check_associativity, check_restriction, is_idempotent,
    orderly_idempotence_check, section_block, section_set, tensor_member,
)

PLUS = plus()
SIG = Signature.of(PLUS)
RESULTS = {}


def subset_sums(b):
    return [sum(c) for r in range(1, len(b) + 1) for c in itertools.combinations(b, r)]


# -- criteria ------------------------------------------------------------------------------------


def c1_fr_equals_subset_sums():
    checked = 0
    for n in range(1, 7):
        for b in itertools.combinations(range(1, 21), n):
            if fr_enumerate(b, SIG) != set(subset_sums(b)):
                return False, f"mismatch on {b}"
            checked += 1
    return True, f"{checked} sequences"


def c2_orderly_term_counts():
    rng = random.Random(2)
    for m in range(1, 7):
        terms = enumerate_orderly_terms(SIG, m, m)
        expected = math.comb(2 * (m - 1), m - 1) // m
        if len(terms) != expected or len(set(terms)) != expected:
            return False, f"arity {m}: {len(terms)} terms, expected {expected}"
        for t in terms:
            for _ in range(100):
                args = [rng.randint(0, 1000) for _ in range(m)]
                if term_eval(t, args) != sum(args):
                    return False, f"term of arity {m} misevaluates {args}"
    return True, "counts 1, 1, 2, 5, 14, 42"


def c3_tensor_ultrafilter_axioms():
    pool = [COFINITE] + [Principal(c) for c in range(6)]
    rng = random.Random(3)
    sets = [random_symset(rng, 2, 8, 7) for _ in range(200)]
    empty, full = SymSet.empty(2), SymSet.full(2)
    checks = 0
    for U, V in itertools.product(pool, repeat=2):
        P = (U, V)
        if tensor_member(P, empty) or not tensor_member(P, full):
            return False, f"properness fails for {U!r} ⊗ {V!r}"
        member = [tensor_member(P, X) for X in sets]
        for X, m in zip(sets, member):
            checks += 1
            if m == tensor_member(P, compl(X)):
                return False, f"totality fails for {X!r} under {U!r} ⊗ {V!r}"
        for i in range(len(sets)):
            j = (i * 37 + 11) % len(sets)
            checks += 1
            if tensor_member(P, inter(sets[i], sets[j])) != (member[i] and member[j]):
                return False, f"intersection fails for {sets[i]!r}, {sets[j]!r}"
    return True, f"{checks} checks over 49 products"


def c4_section_folding_equivalence():
    """One-shot k-sections equal iterated sections for k = 1, 2.

    Enumerated: every support of size <= 2 inside {0..4}^3 in both modes
    (15,752 sets), plus 2,000 seeded supports of size up to 12 in the same box.
    The membership equivalence follows by evaluating the first factor on the
    common section.
    """
    pool = [COFINITE, Principal(0), Principal(1), Principal(2)]
    pts = list(itertools.product(range(5), repeat=3))
    sets = [SymSet(3, c, sup) for r in (0, 1, 2) for sup in itertools.combinations(pts, r) for c in (False, True)]
    rng = random.Random(4)
    sets += [SymSet(3, rng.random() < 0.5, tuple(rng.sample(pts, rng.randint(3, 12)))) for _ in range(2000)]
    checks = 0
    for X in sets:
        for U3 in pool:
            s3 = section_set(X, U3)
            if section_block(X, (U3,)) != s3:
                return False, f"k=1 disagrees on {X!r} with {U3!r}"
            for U2 in pool:
                iterated = section_set(s3, U2)
                one_shot = section_block(X, (U2, U3))
                checks += 1
                if one_shot != iterated:
                    return False, f"k=2 disagrees on {X!r} with {U2!r}, {U3!r}"
    # membership: X ∈ U1⊗U2⊗U3 iff its 2-section lies in U1, on a seeded subsample
    for X in rng.sample(sets, 300):
        for f in itertools.product(pool, repeat=3):
            W = section_block(X, f[1:])
            if tensor_member(f, X) != tensor_member(f[:1], W):
                return False, f"membership disagrees on {X!r} with {f}"
    return True, f"{len(sets)} sets, {checks} k=2 comparisons"


def c5_semigroup():
    pool = [COFINITE] + [Principal(c) for c in range(6)]
    out = []
    for op in (plus(), shifted_mult()):
        rep = check_associativity(op, pool)
        if not rep.passed or rep.checked != 343:
            return False, f"{op.name}: {rep.failures[:2]} ({rep.checked} triples)"
        out.append(f"{op.name} 343/343")
    return True, ", ".join(out)


def c6_idempotence():
    if not is_idempotent(PLUS, COFINITE):
        return False, "cofinite ultrafilter is not idempotent"
    for c in range(11):
        if is_idempotent(PLUS, Principal(c)) != (c == 0):
            return False, f"wrong verdict for P{c}"
    return True, "Cof and P0 idempotent, P1..P10 not"


def c7_orderly_extension():
    rep = orderly_idempotence_check(SIG, COFINITE, 4, samples=100, seed=7)
    counts = rep.extra.get("terms_per_arity")
    if counts != {1: 1, 2: 1, 3: 2, 4: 5}:
        return False, f"term counts {counts}"
    return rep.passed, f"{rep.checked} terms, {len(rep.failures)} violations"


def c8_galvin_homogeneity():
    rng = random.Random(8)
    for case in range(100):
        F = rng.sample(range(51), rng.randint(0, 6))
        X = SymSet.cofinite_of(1, [(x,) for x in F])
        res = galvin_construct(COFINITE, PLUS, X, 8)
        sums = subset_sums(res.seq)
        if len(res.seq) != 8 or list(res.seq) != sorted(set(res.seq)):
            return False, f"case {case}: bad sequence {res.seq}"
        if len(sums) != 255 or any(s in F for s in sums):
            return False, f"case {case}: sums hit {sorted(set(sums) & set(F))}"
    return True, "100 cases, 255 sums each"


def c9_monochromatic_search():
    found = []
    for col in (parity(300), mod_coloring(3, 300)):
        res = search_monochromatic(SIG, naturals(), col, SearchBudget(4, 300))
        if not res.found or len(res.witness) != 4:
            return False, f"{col.name}: {res.status}"
        colors = {col.color_of(s) for s in subset_sums(res.witness)}
        if len(colors) != 1:
            return False, f"{col.name}: witness {res.witness} is not monochromatic"
        if not check_witness(res.witness, naturals(), res.reduction, SIG):
            return False, f"{col.name}: witness {res.witness} is not a reduction of the seed"
        found.append(f"{col.name} {res.witness}")
    return True, "; ".join(found)


def c10_fr_chain_field():
    _, _, rep = build_fr_field(powers2(), SIG, 3, plan=SamplingPlan(samples=512), tails=3)
    parts = {
        "admissibility": rep.admissibility["passed"],
        "axioms": rep.axioms["passed"],
        "nonprincipal": rep.nonprincipal["passed"],
        "sections": rep.sections["passed"],
        "idempotence": rep.idempotence["passed"],
        "strongly_reducible": rep.strongly_reducible["verdict"] is True,
    }
    failed = [k for k, v in parts.items() if not v]
    detail = f"{rep.axioms['forms']} normal forms, tails {rep.strongly_reducible['tails']}"
    return not failed, detail if not failed else f"failed: {failed}"


def c11_restriction():
    F = FRChainField(powers2(), SIG, 3)
    fine = ClosureFamily(F.oracles, SIG, 1, dims=(1, 2))
    rep = check_restriction(FiniteCofiniteFamily(SIG), fine, FRChainUF(F), PLUS, samples=100, seed=11)
    return rep.passed and rep.checked == 100, f"{rep.checked} sets, restriction {rep.extra['restriction']}"


def c12_degeneracy():
    z = probe_degeneracy(Signature.of(zero()), naturals(), SearchBudget(4, 100))
    p = probe_degeneracy(SIG, powers2(), SearchBudget(4, 1000))
    ok = z.fr_size == 1 and p.fr_size == 2 ** 4 - 1
    return ok, f"zero op {z.fr_size}, plus on powers of two {p.fr_size}"


CRITERIA = [
    (1, "FR equals finite sums", c1_fr_equals_subset_sums, 5),
    (2, "orderly term counts", c2_orderly_term_counts, 5),
    (3, "tensor ultrafilter axioms", c3_tensor_ultrafilter_axioms, 10),
    (4, "section folding equivalence", c4_section_folding_equivalence, 30),
    (5, "pushforward semigroup", c5_semigroup, 10),
    (6, "idempotence", c6_idempotence, 1),
    (7, "orderly term extension", c7_orderly_extension, 30),
    (8, "homogeneous sequences", c8_galvin_homogeneity, 30),
    (9, "monochromatic search", c9_monochromatic_search, 60),
    (10, "FR-chain field", c10_fr_chain_field, 60),
    (11, "restriction compatibility", c11_restriction, 10),
    (12, "degeneracy probe", c12_degeneracy, 10),
]


def cold_caches():
    """Drop memo tables so each criterion is timed from a cold start."""
    from ramsey import reduction, ultrafilter
    ultrafilter._pushforward.cache_clear()
    reduction.block_values.cache_clear()
    reduction._block_memo.clear()


def run_criterion(fn, limit):
    cold_caches()
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure, reported with its message
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if elapsed >= limit:
        passed, detail = False, f"{detail}; took {elapsed:.2f}s, limit {limit}s"
    return passed, detail, elapsed


def format_line(num, name, passed, detail, elapsed, limit):
    return f"criterion {num:>2} {'PASS' if passed else 'FAIL'} {name} ({elapsed:.2f}s / {limit}s): {detail}"


@pytest.mark.parametrize("num,name,fn,limit", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(num, name, fn, limit):
    passed, detail, elapsed = run_criterion(fn, limit)
    line = format_line(num, name, passed, detail, elapsed, limit)
    RESULTS[num] = line
    print(line)
    assert passed, line


if __name__ == "__main__":
    failures = 0
    for num, name, fn, limit in CRITERIA:
        passed, detail, elapsed = run_criterion(fn, limit)
        failures += not passed
        print(format_line(num, name, passed, detail, elapsed, limit), flush=True)
    sys.exit(1 if failures else 0)
