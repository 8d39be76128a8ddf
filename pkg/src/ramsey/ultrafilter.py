"""Ultrafilters on the finite/cofinite family, tensor products and pushforwards.

On finite/cofinite subsets of ω an ultrafilter is either principal or the
cofinite one, so ultrafilters are stored by classification and compared as
such.  An FR-chain ultrafilter lives on a larger field; restricted to SymSets
it classifies as cofinite.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .core_algebra import (
    ASSOCIATIVE,
    FINITE_FIBERS,
    IDENTITY,
    Apply,
    OpDef,
    Signature,
    enumerate_orderly_terms,
    require_flags,
    term_arity,
    term_op,
    term_str,
)
from .errors import Inconclusive, InputError, is_unknown
from .set_algebra import (
    Family,
    SymSet,
    _raw_symset,
    product_preimage,
    random_symset,
    symset_member,
    symset_pre,
)

PUSHFORWARD_SCAN = 256


class Ultrafilter:
    kind = "abstract"


@dataclass(frozen=True)
class Principal(Ultrafilter):
    c: int
    kind = "principal"

    def __post_init__(self):
        if self.c < 0:
            raise InputError("principal ultrafilters sit on natural numbers")

    def __repr__(self):
        return f"P{self.c}"


@dataclass(frozen=True)
class CofiniteUF(Ultrafilter):
    kind = "cofinite"

    def __repr__(self):
        return "Cof"


COFINITE = CofiniteUF()


@dataclass(frozen=True, eq=False)
class FRChainUF(Ultrafilter):
    """``{X : G_n ⊆ X for some n}`` over an FR-chain field; see ``galvin``."""

    field: object
    kind = "fr_chain"

    def __eq__(self, other):
        return isinstance(other, FRChainUF) and other.field is self.field

    def __hash__(self):
        return id(self.field)

    def __repr__(self):
        return f"FRChain({self.field!r})"


def classify(U: Ultrafilter) -> Ultrafilter:
    """Restriction to the finite/cofinite family."""
    if isinstance(U, (Principal, CofiniteUF)):
        return U
    if isinstance(U, FRChainUF):
        # FR sets of a strictly increasing stream are infinite, so every
        # finite set is excluded and every cofinite set is included
        return COFINITE
    raise Inconclusive(f"cannot classify {U!r} on finite/cofinite sets")


def uf_to_json(U: Ultrafilter) -> dict:
    if isinstance(U, Principal):
        return {"kind": "principal", "point": U.c}
    if isinstance(U, CofiniteUF):
        return {"kind": "cofinite"}
    if isinstance(U, FRChainUF):
        return {"kind": "fr_chain", "field": U.field.describe()}
    raise InputError(f"not an ultrafilter: {U!r}")


# -- membership -----------------------------------------------------------------------------


def uf_member(U: Ultrafilter, X):
    """``X ∈ U`` for a dim-1 set.  FR-chain ultrafilters may answer ``Unknown``."""
    if isinstance(U, FRChainUF):
        from .galvin import fr_chain_member

        return fr_chain_member(U.field, X)
    if not isinstance(X, SymSet):
        raise InputError(f"{U!r} decides SymSets only, got {X!r}")
    if X.dim != 1:
        raise InputError(f"ultrafilter membership needs a dim-1 set, got dim {X.dim}")
    if isinstance(U, Principal):
        return symset_member((U.c,), X)
    if isinstance(U, CofiniteUF):
        return X.cofinite
    raise InputError(f"not an ultrafilter: {U!r}")


def _decided(U, X) -> bool:
    v = uf_member(U, X)
    if is_unknown(v):
        raise Inconclusive(f"membership of {X!r} in {U!r} is undecided: {v.reason}", v.bound)
    return v


def section_set(X: SymSet, U: Ultrafilter) -> SymSet:
    """``{ā : {b : (ā, b) ∈ X} ∈ U}`` as a SymSet of dim n-1.

    Tuples ā that head no support element all share the section ∅ (finite
    mode) or ω (cofinite mode); the rest are tested one by one.
    """
    if X.dim < 2:
        raise InputError("section_set needs dimension >= 2")
    # sorted supports keep heads and per-head tails sorted and unique
    if isinstance(U, Principal):
        hits = tuple(t[:-1] for t in X.support if t[-1] == U.c)
        return _raw_symset(X.dim - 1, X.cofinite, hits)
    generic = _decided(U, _raw_symset(1, X.cofinite, ()))
    by_head: dict = {}
    for t in X.support:
        by_head.setdefault(t[:-1], []).append(t[-1:])
    exceptions = tuple(head for head, pts in by_head.items()
                       if _decided(U, _raw_symset(1, X.cofinite, tuple(pts))) != generic)
    return _raw_symset(X.dim - 1, generic, exceptions)


@dataclass(frozen=True)
class TensorProduct:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InputError("a tensor product needs at least one factor")

    def __repr__(self):
        return " ⊗ ".join(map(repr, self.factors))


def _factors(P) -> tuple:
    return P.factors if isinstance(P, TensorProduct) else tuple(P)


def tensor_member(P, X: SymSet) -> bool:
    """``X ∈ U1 ⊗ ... ⊗ Un``: fold sections from the last factor down to dim 1."""
    factors = _factors(P)
    if X.dim != len(factors):
        raise InputError(f"set of dim {X.dim} against a product of {len(factors)} factors")
    W = X
    for U in reversed(factors[1:]):
        W = section_set(W, U)
    return _decided(factors[0], W)


def section_block(X: SymSet, tail: Sequence[Ultrafilter]) -> SymSet:
    """One-step k-section: ``{ā : {b̄ ∈ ω^k : (ā, b̄) ∈ X} ∈ ⊗tail}``."""
    k = len(tail)
    if not 1 <= k < X.dim:
        raise InputError(f"cannot take a {k}-section of a dim-{X.dim} set")
    generic = tensor_member(tail, _raw_symset(k, X.cofinite, ()))
    by_head: dict = {}
    for t in X.support:
        by_head.setdefault(t[:-k], []).append(t[-k:])
    exceptions = tuple(head for head, pts in by_head.items()
                       if tensor_member(tail, _raw_symset(k, X.cofinite, tuple(pts))) != generic)
    return _raw_symset(X.dim - k, generic, exceptions)


# -- pushforward ------------------------------------------------------------------------


@dataclass
class Derivation:
    steps: list = field(default_factory=list)

    def add(self, text: str):
        self.steps.append(text)


def pushforward(op: OpDef, factors: Sequence[Ultrafilter], scan: int = PUSHFORWARD_SCAN,
                trace: Derivation | None = None) -> Ultrafilter:
    """Classify ``{X : op⁻¹[X] ∈ U1 ⊗ ... ⊗ Um}`` on finite/cofinite sets.

    Candidates ``c`` for a principal image are ``op`` at the principal points
    plus every ``c <= scan``; each is tested by tensor membership of
    ``op⁻¹[{c}]``.  If none passes the image is the cofinite ultrafilter.  That
    is exact: a principal image needs a finite preimage inside the product, but
    a finite set lies in a product only when every factor is principal, and
    then ``op`` at the points is already a candidate.
    """
    require_flags(op, FINITE_FIBERS)
    factors = tuple(classify(U) for U in factors)
    if len(factors) != op.arity:
        raise InputError(f"{op.name} has arity {op.arity} but got {len(factors)} ultrafilters")
    result = _pushforward(op, factors, scan)
    if trace is not None:
        trace.add(f"{op.name}_*({', '.join(map(repr, factors))}) = {result!r}")
    return result


@lru_cache(maxsize=4096)
def _pushforward(op, factors, scan):
    principal = all(isinstance(U, Principal) for U in factors)
    candidates = [op.fn(*(U.c for U in factors))] if principal else []
    # explicit preimages of high-arity ops grow like c^(arity-1); keep the scan small there
    limit = scan if op.arity <= 2 else min(scan, 16)
    candidates.extend(c for c in range(limit + 1) if c not in candidates)
    try:
        for c in candidates:
            if tensor_member(factors, symset_pre(op, 1, SymSet.singleton(c))):
                return Principal(c)
    except InputError as exc:
        raise Inconclusive(f"pushforward scan failed: {exc}", scan) from exc
    if principal:
        raise Inconclusive(f"{op.name} at principal points found no principal image", scan)
    return COFINITE


def is_idempotent(op: OpDef, U: Ultrafilter) -> bool:
    return pushforward(op, [U] * op.arity) == classify(U)


@dataclass
class Report:
    name: str
    passed: bool = True
    checked: int = 0
    failures: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def fail(self, detail):
        self.passed = False
        if len(self.failures) < 50:
            self.failures.append(detail)

    def to_json(self) -> dict:
        out = {"check": self.name, "passed": self.passed, "checked": self.checked, "failures": self.failures}
        out.update(self.extra)
        return out


def check_associativity(op: OpDef, pool: Sequence[Ultrafilter]) -> Report:
    """``f(f(U, V), W) = f(U, f(V, W))`` for all triples from the pool."""
    require_flags(op, ASSOCIATIVE, FINITE_FIBERS)
    report = Report(f"associativity of {op.name}")
    for U, V, W in itertools.product(pool, repeat=3):
        left = pushforward(op, [pushforward(op, [U, V]), W])
        right = pushforward(op, [U, pushforward(op, [V, W])])
        report.checked += 1
        if left != right:
            report.fail({"triple": [repr(U), repr(V), repr(W)], "left": repr(left), "right": repr(right)})
    return report


def orderly_idempotence_check(sig: Signature, U: Ultrafilter, arity_bound: int,
                              samples: int = 100, seed: int = 0, entry_bound: int = 6) -> Report:
    """Idempotence of every orderly term of arity <= bound, plus the product-preimage identity.

    For ``t = f(h1, ..., hk)`` the identity compares membership of a sampled
    dim-k set X in ``h1_*(U) ⊗ ... ⊗ hk_*(U)`` with membership of
    ``{(x̄1, ..., x̄k) : (h1(x̄1), ..., hk(x̄k)) ∈ X}`` in ``U ⊗ ... ⊗ U``.
    """
    report = Report(f"orderly idempotence over {list(sig.names)}")
    target = classify(U)
    for op in sig.ops:
        try:
            require_flags(op, FINITE_FIBERS)
            if not is_idempotent(op, U):
                report.fail({"op": op.name, "reason": f"{U!r} is not idempotent for {op.name}"})
        except InputError as exc:
            report.fail({"op": op.name, "reason": str(exc)})
    if not report.passed:
        return report
    rng = random.Random(seed)
    counts = {}
    for m in range(1, arity_bound + 1):
        terms = enumerate_orderly_terms(sig, m, m)
        counts[m] = len(terms)
        for t in terms:
            report.checked += 1
            op_t = term_op(t)
            if t != IDENTITY:
                require_flags(op_t, FINITE_FIBERS)
            image = pushforward(op_t, [U] * m)
            if image != target:
                report.fail({"term": term_str(t), "image": repr(image)})
            if isinstance(t, Apply):
                hs = t.children
                h_ops = [term_op(h) for h in hs]
                images = [pushforward(h, [U] * h.arity) for h in h_ops]
                total = sum(term_arity(h) for h in hs)
                for _ in range(samples):
                    X = random_symset(rng, len(hs), 8, entry_bound)
                    lhs = tensor_member(images, X)
                    rhs = tensor_member([U] * total, product_preimage(h_ops, X))
                    if lhs != rhs:
                        report.fail({"term": term_str(t), "set": repr(X), "lhs": lhs, "rhs": rhs})
    report.extra["terms_per_arity"] = counts
    return report


# -- restriction ---------------------------------------------------------------------------


def check_restriction(coarse: Family, fine: Family, U_fine: Ultrafilter, op: OpDef,
                      restriction: Ultrafilter | None = None, samples: int = 100, seed: int = 0,
                      entry_bound: int = 16) -> Report:
    """Compare membership computed over the fine family with the coarse classification.

    Sampled dim-1 sets of the coarse family are tested for ``X ∈ U`` and for
    ``op⁻¹[X] ∈ U ⊗ ... ⊗ U`` using ``U_fine`` directly, and against the
    restriction (``classify(U_fine)`` unless overridden).
    """
    require_flags(op, FINITE_FIBERS)
    restricted = classify(U_fine) if restriction is None else restriction
    image = pushforward(op, [restricted] * op.arity)
    report = Report(f"restriction of {U_fine!r} for {op.name}")
    report.extra["restriction"] = repr(restricted)
    rng = random.Random(seed)
    pool = [X for X in coarse.members(1) if isinstance(X, SymSet)] if 1 in coarse.dims else []
    for i in range(samples):
        X = pool[i] if i < len(pool) and i % 2 == 0 else random_symset(rng, 1, 8, entry_bound)
        if not fine.contains(X):
            raise InputError(f"coarse set {X!r} is not in the fine family")
        report.checked += 1
        fine_in = _decided(U_fine, X)
        fine_push = tensor_member([U_fine] * op.arity, symset_pre(op, 1, X))
        if fine_in != uf_member(restricted, X):
            report.fail({"set": repr(X), "clause": "membership", "fine": fine_in})
        if fine_push != uf_member(image, X):
            report.fail({"set": repr(X), "clause": "pushforward", "fine": fine_push})
    return report
