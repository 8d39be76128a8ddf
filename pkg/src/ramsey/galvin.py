"""FR-chain fields, their chain ultrafilter, and homogeneous-sequence construction.

For a strictly increasing positive stream ``b`` and inflationary operations,
``G_i = FR(b - i)`` is a decreasing chain of infinite sets with decidable
membership.  The chain ultrafilter contains ``X`` iff some ``G_n ⊆ X``.
Boolean combinations of chain generators and finite sets reduce to a chain
literal with finitely many exceptions, which decides that question.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .core_algebra import (
    ASSOCIATIVE,
    FINITE_FIBERS,
    INFLATIONARY,
    OpDef,
    Signature,
    enumerate_orderly_terms,
    require_flags,
    term_eval,
)
from .errors import BudgetExhausted, InputError, Unknown, is_unknown
from .reduction import StreamSeq, fr_enumerate, fr_member
from .set_algebra import (
    ClosureFamily,
    Compl,
    Fib,
    Gen,
    GeneratorOracle,
    Inter,
    Lit,
    Pre,
    SamplingPlan,
    SetTerm,
    SymSet,
    Union,
    check_admissible_sampled,
    closure_enumerate,
    oracle_table,
    symset_fib,
    symset_member,
    symset_pre,
    term_member,
)
from .ultrafilter import (
    COFINITE,
    CofiniteUF,
    FRChainUF,
    Principal,
    Ultrafilter,
    classify,
    is_idempotent,
    section_set,
    uf_member,
)

SCAN_CAP = 10 ** 6
PREFIX_CHECK = 64


class FRChainField:
    """Generators ``G_i = FR(seq - i)`` for ``i <= depth`` over an inflationary signature."""

    def __init__(self, seq: StreamSeq, sig: Signature, depth: int, name: str = "G"):
        if depth < 0:
            raise InputError("depth must be >= 0")
        if sig.min_arity() < 2:
            raise InputError("FR-chain fields need operations of arity >= 2")
        sig.require(INFLATIONARY, FINITE_FIBERS)
        seq.check_increasing(PREFIX_CHECK)
        if seq.at(0) < 1:
            raise InputError("FR-chain fields need a positive stream")
        self.seq = seq
        self.sig = sig
        self.depth = depth
        self.name = name
        self.oracles = {f"{name}{i}": self._oracle(i) for i in range(depth + 1)}

    def _oracle(self, i):
        return GeneratorOracle(f"{self.name}{i}", 1, lambda t, i=i: fr_member(t[0], self.seq, i, self.sig),
                               ("chain", self.name, i))

    def gen(self, i: int) -> Gen:
        if not 0 <= i <= self.depth:
            raise InputError(f"chain index {i} is outside 0..{self.depth}")
        return Gen(f"{self.name}{i}", 1)

    def index_of(self, gid: str) -> int:
        if gid.startswith(self.name) and gid[len(self.name):].isdigit():
            i = int(gid[len(self.name):])
            if i <= self.depth:
                return i
        raise InputError(f"generator {gid!r} is not part of chain {self.name}0..{self.name}{self.depth}")

    def in_chain(self, x: int, i: int) -> bool:
        return fr_member(x, self.seq, i, self.sig)

    def describe(self) -> dict:
        return {"seq": repr(self.seq.rule) if self.seq.rule else list(self.seq.prefix),
                "sig": list(self.sig.names), "depth": self.depth}

    def __repr__(self):
        return f"FRChainField({self.describe()})"


# -- normal forms ------------------------------------------------------------------------

EMPTY, FULL, CHAIN, COCHAIN = "empty", "full", "chain", "cochain"


@dataclass(frozen=True)
class ChainNormalForm:
    """``(G_index ∪ plus) ∖ minus``, complemented when the flag is set.

    ``index`` None means no chain component.  Exceptions are kept minimal:
    ``plus`` misses the literal and ``minus`` lies inside it.
    """

    index: int | None
    plus: frozenset = frozenset()
    minus: frozenset = frozenset()
    complemented: bool = False

    def to_json(self) -> dict:
        return {"index": self.index, "plus": sorted(self.plus), "minus": sorted(self.minus),
                "complemented": self.complemented}


def _to_parts(nf: ChainNormalForm):
    if nf.index is None:
        return (FULL, None, frozenset(), nf.plus) if nf.complemented else (EMPTY, None, nf.plus, frozenset())
    if nf.complemented:
        return (COCHAIN, nf.index, nf.minus, nf.plus)
    return (CHAIN, nf.index, nf.plus, nf.minus)


def _lit_member(F, kind, i, x):
    if kind == EMPTY:
        return False
    if kind == FULL:
        return True
    inside = F.in_chain(x, i)
    return inside if kind == CHAIN else not inside


def _build(F, kind, i, points, member) -> ChainNormalForm:
    """Canonical form of the set equal to literal ``(kind, i)`` off ``points``."""
    add = frozenset(x for x in points if member(x) and not _lit_member(F, kind, i, x))
    rem = frozenset(x for x in points if not member(x) and _lit_member(F, kind, i, x))
    if kind == EMPTY:
        return ChainNormalForm(None, add)
    if kind == FULL:
        return ChainNormalForm(None, rem, frozenset(), True)
    if kind == CHAIN:
        return ChainNormalForm(i, add, rem)
    return ChainNormalForm(i, rem, add, True)


def nf_member(F: FRChainField, x: int, nf: ChainNormalForm) -> bool:
    kind, i, add, rem = _to_parts(nf)
    if x in add:
        return True
    if x in rem:
        return False
    return _lit_member(F, kind, i, x)


def _lit_union(a, b):
    (ka, ia), (kb, ib) = a, b
    if ka == EMPTY:
        return b
    if kb == EMPTY:
        return a
    if FULL in (ka, kb):
        return (FULL, None)
    if ka == kb == CHAIN:
        return (CHAIN, min(ia, ib))
    if ka == kb == COCHAIN:
        return (COCHAIN, max(ia, ib))
    g, co = (ia, ib) if ka == CHAIN else (ib, ia)
    # G_g ∪ (ω ∖ G_co): everything when G_co ⊆ G_g, otherwise a ring complement
    return (FULL, None) if g <= co else None


def _lit_compl(a):
    k, i = a
    return {EMPTY: (FULL, None), FULL: (EMPTY, None), CHAIN: (COCHAIN, i), COCHAIN: (CHAIN, i)}[k]


def _lit_inter(a, b):
    u = _lit_union(_lit_compl(a), _lit_compl(b))
    return None if u is None else _lit_compl(u)


def _combine(F, x: ChainNormalForm, y: ChainNormalForm, kind: str):
    px, py = _to_parts(x), _to_parts(y)
    lit = (_lit_union if kind == "union" else _lit_inter)(px[:2], py[:2])
    if lit is None:
        return Unknown(f"{kind} of chain literals {px[:2]} and {py[:2]} leaves a ring difference")
    points = px[2] | px[3] | py[2] | py[3]
    if kind == "union":
        member = lambda v: nf_member(F, v, x) or nf_member(F, v, y)  # noqa: E731
    else:
        member = lambda v: nf_member(F, v, x) and nf_member(F, v, y)  # noqa: E731
    return _build(F, lit[0], lit[1], points, member)


def nf_compl(nf: ChainNormalForm) -> ChainNormalForm:
    return ChainNormalForm(nf.index, nf.plus, nf.minus, not nf.complemented)


def normalize(F: FRChainField, T):
    """Reduce a dim-1 term over chain generators and finite/cofinite literals.

    Returns a ChainNormalForm, or Unknown when the term leaves the decided
    fragment (ring differences ``G_i ∖ G_j``, or constructors other than
    union, intersection and complement).
    """
    if isinstance(T, ChainNormalForm):
        return T
    if isinstance(T, SymSet):
        T = Lit(T)
    if not isinstance(T, SetTerm):
        raise InputError(f"cannot normalize {T!r}")
    if T.dim != 1:
        return Unknown(f"term of dimension {T.dim} is outside the chain fragment")
    if isinstance(T, Lit):
        X = T.value
        pts = frozenset(t[0] for t in X.support)
        return ChainNormalForm(None, pts, frozenset(), X.cofinite)
    if isinstance(T, Gen):
        return ChainNormalForm(F.index_of(T.id))
    if isinstance(T, Compl):
        inner = normalize(F, T.arg)
        return inner if is_unknown(inner) else nf_compl(inner)
    if isinstance(T, (Union, Inter)):
        left = normalize(F, T.left)
        if is_unknown(left):
            return left
        right = normalize(F, T.right)
        if is_unknown(right):
            return right
        return _combine(F, left, right, "union" if isinstance(T, Union) else "inter")
    return Unknown(f"{type(T).__name__} node is outside the chain fragment")


def witness_index(F: FRChainField, nf: ChainNormalForm) -> int | None:
    """Some ``n`` with ``G_n ⊆ X``, or None when there is none."""
    kind, i, _, rem = _to_parts(nf)
    if kind in (EMPTY, COCHAIN):
        # G_n is infinite, and for every n it meets G_i in an infinite set
        return None
    n = 0 if kind == FULL else i
    top = max(rem, default=-1)
    # inflationary ops: FR(seq - n) lies above seq(n)
    while F.seq.at(n) <= top:
        n += 1
    return n


def fr_chain_member(F: FRChainField, X):
    """Membership in the chain ultrafilter: True, False, or Unknown."""
    nf = normalize(F, X)
    if is_unknown(nf):
        return nf
    return witness_index(F, nf) is not None


def nf_subset(F: FRChainField, X: ChainNormalForm, Y: ChainNormalForm):
    """True when ``X ⊆ Y`` is provable from the normal forms, else Unknown."""
    diff = _combine(F, X, nf_compl(Y), "inter")
    if is_unknown(diff):
        return diff
    if diff.index is None and not diff.complemented and not diff.plus:
        return True
    return Unknown("difference is not syntactically empty")


# -- sections via the reduction claim --------------------------------------------------------------


def _last_index(F: FRChainField, x: int) -> int:
    """Largest index whose entry is <= x: a bound on the indices any FR value x uses."""
    n = 0
    while F.seq.at(n + 1) <= x:
        n += 1
    return n


def section_verdict(F: FRChainField, T, a: int):
    """Decide ``{b : (a, b) ∈ T} ∈ U`` for a dim-2 term, three-valued.

    Boolean structure is pushed inside (an ultrafilter respects it); a leaf
    ``Pre(op, 1, S)`` with ``S ⊇ G_n`` is in when ``a ∈ G_n``, since then
    ``op(a, b)`` stays in ``G_n`` for every ``b`` far enough along the chain.
    """
    if isinstance(T, Lit):
        return uf_member(COFINITE, symset_fib(a, T.value))
    if isinstance(T, Compl):
        v = section_verdict(F, T.arg, a)
        return v if is_unknown(v) else not v
    if isinstance(T, (Union, Inter)):
        l, r = section_verdict(F, T.left, a), section_verdict(F, T.right, a)
        if isinstance(T, Union):
            if l is True or r is True:
                return True
            if l is False and r is False:
                return False
        else:
            if l is False or r is False:
                return False
            if l is True and r is True:
                return True
        return l if is_unknown(l) else r
    if isinstance(T, Pre) and T.n == 1 and T.op.arity == 2 and T.op in F.sig.ops:
        inner = normalize(F, T.arg)
        if is_unknown(inner):
            return inner
        n = witness_index(F, inner)
        if n is not None and F.in_chain(a, n):
            return True
        return Unknown(f"section at {a} of a preimage is outside the decided fragment")
    return Unknown(f"section of {type(T).__name__} node is outside the decided fragment")


def idempotence_instance(F: FRChainField, op: OpDef, X, samples: int = 16, seed: int = 0,
                         max_block: int = 4):
    """Sampled check that ``op⁻¹[X] ∈ U ⊗ U`` for ``X`` in the chain ultrafilter.

    Draws ``a ∈ G_n`` as orderly-term values on blocks of the chain, confirms
    the claim verdict for the section at ``a``, and spot-checks ``op(a, b) ∈ X``
    for ``b`` drawn further along the chain.
    """
    nf = normalize(F, X)
    if is_unknown(nf):
        return nf
    n = witness_index(F, nf)
    if n is None:
        return Unknown("set is not in the chain ultrafilter")
    rng = random.Random(seed)
    pre = Pre(op, 1, _nf_term(F, nf))
    for _ in range(samples):
        a, end = _random_fr(F, n, rng, max_block)
        if section_verdict(F, pre, a) is not True:
            return False
        start = max(end + 1, _beyond(F, nf, n))
        b, _ = _random_fr(F, start, rng, max_block)
        if not nf_member(F, op.fn(a, b), nf):
            return False
    return True


def _beyond(F, nf, n):
    top = max(_to_parts(nf)[3], default=-1)
    while F.seq.at(n) <= top:
        n += 1
    return n


def _random_fr(F, start, rng, max_block):
    k = rng.randint(1, max_block)
    idx = sorted(rng.sample(range(start, start + 2 * max_block), k))
    terms = enumerate_orderly_terms(F.sig, k, k)
    t = terms[rng.randrange(len(terms))]
    return term_eval(t, [F.seq.at(i) for i in idx]), idx[-1]


def _nf_term(F, nf: ChainNormalForm) -> SetTerm:
    kind, i, add, rem = _to_parts(nf)
    base = {EMPTY: Lit(SymSet.empty(1)), FULL: Lit(SymSet.full(1))}.get(kind)
    if base is None:
        base = Gen(f"{F.name}{i}", 1) if kind == CHAIN else Compl(Gen(f"{F.name}{i}", 1))
    if add:
        base = Union(base, Lit(SymSet.finite(1, [(x,) for x in sorted(add)])))
    if rem:
        base = Inter(base, Lit(SymSet.cofinite_of(1, [(x,) for x in sorted(rem)])))
    return base


# -- homogeneous sequences -----------------------------------------------------------------------


@dataclass
class GalvinResult:
    seq: tuple
    verified: bool
    values_checked: int
    trace: list = field(default_factory=list)

    def to_json(self):
        return {"sequence": list(self.seq), "verified": self.verified,
                "values_checked": self.values_checked, "trace": self.trace}


def _star(op, Y: SymSet, U) -> SymSet:
    """``Y ∩ {y : {z : op(y, z) ∈ Y} ∈ U}``."""
    return _inter(Y, section_set(symset_pre(op, 1, Y), U))


def _inter(X, Y):
    from .set_algebra import inter

    return inter(X, Y)


def _shift(op, x, Y: SymSet) -> SymSet:
    """``{z : op(x, z) ∈ Y}``."""
    return symset_fib(x, symset_pre(op, 1, Y))


def galvin_construct(U: Ultrafilter, op: OpDef, X, length: int, scan_cap: int = SCAN_CAP) -> GalvinResult:
    """A strictly increasing ``a`` of the given length with ``FR(a) ⊆ X``.

    Finite/cofinite case: keep ``Y ∈ U``, pick the least ``x`` above the last
    pick with ``x ∈ Y*`` (``Y* = Y ∩ {y : y⁻¹Y ∈ U}``), then continue with
    ``Y* ∩ x⁻¹(Y*)``.  Chain case: ``X ⊇ G_n`` and the answer is
    ``seq(n), ..., seq(n + length - 1)``.
    """
    if length < 1:
        raise InputError("length must be positive")
    if op.arity != 2:
        raise InputError("galvin_construct needs a binary operation")
    require_flags(op, ASSOCIATIVE, FINITE_FIBERS)
    if isinstance(U, FRChainUF):
        return _chain_construct(U.field, op, X, length)
    if not isinstance(X, SymSet) or X.dim != 1:
        raise InputError("galvin_construct needs a dim-1 SymSet for this ultrafilter")
    if not is_idempotent(op, U):
        raise InputError(f"{U!r} is not idempotent for {op.name}")
    if not uf_member(U, X):
        raise InputError(f"{X!r} is not in {U!r}")
    picks = []
    trace = []
    Y = X
    for _ in range(length):
        Ystar = _star(op, Y, U)
        x = (picks[-1] + 1) if picks else 0
        while not symset_member((x,), Ystar):
            x += 1
            if x > scan_cap:
                raise BudgetExhausted(f"no element of {Ystar!r} found up to {scan_cap}", scan_cap)
        picks.append(x)
        trace.append({"pick": x, "set": repr(Ystar)})
        Y = _inter(Ystar, _shift(op, x, Ystar))
    seq = tuple(picks)
    checked = _check_folds(seq, op, lambda v: symset_member((v,), X))
    return GalvinResult(seq, True, checked, trace)


FOLD_CHECK_MAX = 16


def _check_folds(seq, op, member) -> int:
    """Check every nonempty subset fold of ``seq`` lands in the target set.

    For an associative binary op these folds are exactly the FR values.  Past
    ``FOLD_CHECK_MAX`` entries only the distinct values are checked.
    Returns the number of checks made.
    """
    if len(seq) > FOLD_CHECK_MAX:
        values = fr_enumerate(tuple(seq), Signature.of(op))
        if not all(member(v) for v in values):
            raise InputError("internal: constructed sequence is not homogeneous")
        return len(values)
    folds = [None]
    for x in seq:
        folds += [x if f is None else op.fn(f, x) for f in folds]
    bad = [v for v in folds[1:] if not member(v)]
    if bad:
        raise InputError(f"internal: constructed sequence is not homogeneous (value {bad[0]})")
    return len(folds) - 1


def _chain_construct(F, op, X, length):
    if op not in F.sig.ops:
        raise InputError(f"{op.name} is not in the chain signature")
    nf = normalize(F, X)
    if is_unknown(nf):
        raise InputError(f"cannot decide chain membership: {nf.reason}")
    n = witness_index(F, nf)
    if n is None:
        raise InputError("set is not in the chain ultrafilter")
    seq = F.seq.shift(n).take(length)
    checked = _check_folds(tuple(seq), op, lambda v: nf_member(F, v, nf))
    return GalvinResult(tuple(seq), True, checked, [{"chain_index": n}])


# -- strong reducibility -------------------------------------------------------------------------

_DIVISIBLE_KINDS = {"plus", "shifted_mult"}


def _tail_gcd(a: StreamSeq, probe: int = 8):
    """gcd of every entry of ``a`` when the rule makes it provable, else None."""
    rule = a.rule
    if rule is None:
        return None
    first = rule.fn(len(a.prefix) + a.offset)
    if rule.kind == "arithmetic":
        d = math.gcd(first, rule.params["step"])
    elif rule.kind in ("geometric", "powers"):
        ratio = rule.params.get("ratio", rule.params.get("base"))
        if ratio < 1:
            return None
        d = first
    else:
        return None
    for v in a.prefix:
        d = math.gcd(d, v)
    return d


def _covers_all_above(a: StreamSeq, sig: Signature) -> bool:
    """FR(a) contains every integer >= a(0), by the rule's shape."""
    rule = a.rule
    if rule is None or a.prefix:
        return False
    if rule.kind == "arithmetic" and rule.params["step"] == 1:
        return True
    plus_in = any(op.kind == "plus" for op in sig.ops)
    # sums of distinct powers of two are all positive integers
    return plus_in and rule.kind == "powers" and rule.params["base"] == 2 and a.offset == 0


def _tail_in_uf(U, sig, a: StreamSeq, i: int):
    tail = a.shift(i)
    if isinstance(U, Principal):
        return fr_member(U.c, a, i, sig)
    if isinstance(U, CofiniteUF):
        if _covers_all_above(tail, sig):
            return True
        if all(op.kind in _DIVISIBLE_KINDS for op in sig.ops):
            d = _tail_gcd(tail)
            if d is not None and d >= 2:
                return False
        return Unknown(f"cannot decide whether FR(a - {i}) is cofinite")
    if isinstance(U, FRChainUF):
        F = U.field
        if F.sig.names == sig.names:
            for s in range(PREFIX_CHECK):
                if F.seq.shift(s) == tail:
                    return True
        return Unknown(f"FR(a - {i}) is not a recognised chain tail")
    return Unknown(f"unsupported ultrafilter {U!r}")


def _in_set(x, X, F):
    if isinstance(X, SymSet):
        return symset_member((x,), X)
    if F is not None:
        nf = normalize(F, X)
        if not is_unknown(nf):
            return nf_member(F, x, nf)
        if isinstance(X, SetTerm):
            return term_member((x,), X, F.oracles)
    raise InputError(f"cannot test membership in {X!r}")


def verify_strongly_reducible(U: Ultrafilter, sig: Signature, X, a: StreamSeq, tails: int,
                              prefix: int = 8) -> dict:
    """Check ``FR(a↾N) ⊆ X`` and ``FR(a - i) ∈ U`` for ``i < tails``.

    ``verdict`` is True, False, or Unknown; the report names the clauses and
    the prefix consulted.
    """
    F = U.field if isinstance(U, FRChainUF) else None
    if isinstance(X, SymSet) or F is None:
        member = uf_member(U, X) if isinstance(X, SymSet) else Unknown("no decision procedure for X")
    else:
        member = fr_chain_member(F, X)
    if member is False:
        raise InputError("precondition failed: X is not in the ultrafilter")
    N = prefix if a.is_infinite else min(prefix, len(a.prefix))
    values = sorted(fr_enumerate(a.take(N), sig))
    homogeneous = all(_in_set(v, X, F) for v in values)
    clause2 = [_tail_in_uf(U, sig, a, i) for i in range(tails)]
    if not homogeneous or any(v is False for v in clause2):
        verdict = False
    elif any(is_unknown(v) for v in clause2) or is_unknown(member):
        verdict = Unknown("some clause is undecided", N)
    else:
        verdict = True
    return {
        "homogeneous": homogeneous,
        "prefix_checked": N,
        "values_checked": len(values),
        "tails": [v.to_json() if is_unknown(v) else v for v in clause2],
        "tails_checked": tails,
        "verdict": verdict,
    }


# -- the field and its ultrafilter ---------------------------------------------------------------


@dataclass
class FRFieldReport:
    admissibility: dict
    axioms: dict
    nonprincipal: dict
    sections: dict
    idempotence: dict
    strongly_reducible: dict | None = None

    @property
    def passed(self) -> bool:
        sr = self.strongly_reducible
        return (self.admissibility["passed"] and self.axioms["passed"] and self.nonprincipal["passed"]
                and self.sections["passed"] and self.idempotence["passed"]
                and (sr is None or sr["verdict"] is True))

    def to_json(self):
        sr = self.strongly_reducible
        if sr is not None and is_unknown(sr["verdict"]):
            sr = dict(sr, verdict=sr["verdict"].to_json())
        return {"passed": self.passed, "admissibility": self.admissibility, "axioms": self.axioms,
                "nonprincipal": self.nonprincipal, "sections": self.sections,
                "idempotence": self.idempotence, "strongly_reducible": sr}


def chain_members(F: FRChainField, depth: int = 2, singleton_bound: int = 1) -> tuple[list, list]:
    """Distinct normal forms of the Boolean closure of the chain and singletons, plus undecided terms."""
    terms = closure_enumerate(F.oracles, F.sig, depth, {1}, constructors=("union", "inter", "compl"),
                              singleton_bound=singleton_bound)
    forms, seen, undecided = [], set(), []
    for T in terms:
        nf = normalize(F, T)
        if is_unknown(nf):
            undecided.append(T)
        elif nf not in seen:
            seen.add(nf)
            forms.append(nf)
    return forms, undecided


def check_chain_axioms(F: FRChainField, forms) -> dict:
    failures = []
    verdict = {nf: fr_chain_member(F, nf) for nf in forms}
    if fr_chain_member(F, ChainNormalForm(None)) is not False:
        failures.append("empty set is in the ultrafilter")
    if fr_chain_member(F, ChainNormalForm(None, complemented=True)) is not True:
        failures.append("ω is not in the ultrafilter")
    pairs = 0
    for X in forms:
        if verdict[X] == fr_chain_member(F, nf_compl(X)):
            failures.append(f"exactly one of X, X^c must be in U: {X}")
    for X in forms:
        for Y in forms:
            pairs += 1
            meet = _combine(F, X, Y, "inter")
            if not is_unknown(meet) and (verdict[X] and verdict[Y]) != fr_chain_member(F, meet):
                failures.append(f"intersection closure fails for {X} and {Y}")
            if verdict[X] and not verdict[Y] and nf_subset(F, X, Y) is True:
                failures.append(f"upward closure fails: {X} ⊆ {Y}")
            if len(failures) > 20:
                break
    return {"passed": not failures, "forms": len(forms), "pairs": pairs, "failures": failures[:20]}


def check_nonprincipal(F: FRChainField, forms, witnesses: int = 4) -> dict:
    failures = []
    members = 0
    for nf in forms:
        n = witness_index(F, nf)
        if n is None:
            continue
        members += 1
        # G_n contains seq(n), seq(n+1), ... which are pairwise distinct
        pts = [F.seq.at(n + j) for j in range(witnesses)]
        if len(set(pts)) != witnesses or not all(nf_member(F, p, nf) for p in pts):
            failures.append(f"member {nf} lacks its chain witness points")
    for c in range(8):
        if fr_chain_member(F, SymSet.singleton(c)) is not False:
            failures.append(f"singleton {{{c}}} is in the ultrafilter")
    return {"passed": not failures, "members": members, "failures": failures}


def check_sections(F: FRChainField, family: ClosureFamily, samples: int = 64, seed: int = 0,
                   points: int = 8) -> dict:
    """Sampled dim-2 members: the section at ``a`` and at its complement never agree."""
    rng = random.Random(seed)
    pool = family.members(2)
    counts = {"true": 0, "false": 0, "unknown": 0}
    failures = []
    if not pool:
        return {"passed": True, "counts": counts, "failures": failures}
    for _ in range(samples):
        T = rng.choice(pool)
        a = rng.randint(0, points)
        v = section_verdict(F, T, a)
        w = section_verdict(F, Compl(T), a)
        counts["unknown" if is_unknown(v) else str(v).lower()] += 1
        if not is_unknown(v) and not is_unknown(w) and v == w:
            failures.append(f"section of {T!r} at {a} and of its complement agree")
    return {"passed": not failures, "counts": counts, "failures": failures}


def build_fr_field(seq: StreamSeq, sig: Signature, depth: int, extra=None, *,
                   closure_depth: int = 1, plan: SamplingPlan = SamplingPlan(), tails: int = 3,
                   seed: int = 0) -> tuple[ClosureFamily, FRChainUF, FRFieldReport]:
    """The closure family over ``G_0..G_depth`` and the chain ultrafilter, with checks."""
    F = FRChainField(seq, sig, depth)
    oracles = dict(F.oracles)
    if extra:
        for gid, o in oracle_table(extra).items():
            if gid in oracles:
                raise InputError(f"extra generator {gid!r} clashes with a chain generator")
            oracles[gid] = o
    family = ClosureFamily(oracles, sig, closure_depth, dims=(1, 2), name=f"FR-chain closure (depth {depth})")
    U = FRChainUF(F)
    admissible = check_admissible_sampled(family, plan).to_json()
    forms, undecided = chain_members(F, 2)
    axioms = check_chain_axioms(F, forms)
    axioms["undecided_terms"] = len(undecided)
    nonprincipal = check_nonprincipal(F, forms)
    sections = check_sections(F, family, seed=seed)
    idem_fail = []
    rng = random.Random(seed)
    members = [nf for nf in forms if witness_index(F, nf) is not None]
    for op in sig.ops:
        if op.arity != 2:
            continue
        for nf in rng.sample(members, min(len(members), 16)):
            if idempotence_instance(F, op, nf, seed=rng.randrange(1 << 30)) is not True:
                idem_fail.append(f"{op.name}: {nf}")
    idempotence = {"passed": not idem_fail, "checked": min(len(members), 16) * len(sig.ops),
                   "failures": idem_fail}
    report = FRFieldReport(admissible, axioms, nonprincipal, sections, idempotence)
    if tails > 0:
        report.strongly_reducible = verify_strongly_reducible(U, sig, F.gen(0), seq, tails)
    return family, U, report
