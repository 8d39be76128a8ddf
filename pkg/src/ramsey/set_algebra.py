"""Finite/cofinite subsets of ω^n, symbolic set terms, and bounded closures.

``SymSet`` is the computable admissible family: each set is either a finite
support or the complement of one.  ``SetTerm`` trees name sets generated from
membership oracles; they are compared structurally and queried pointwise.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core_algebra import FINITE_FIBERS, OpDef, Signature, require_flags
from .errors import InputError


def _point(t, dim=None):
    if type(t) is tuple and all(type(x) is int and x >= 0 for x in t):
        if dim is not None and len(t) != dim:
            raise InputError(f"tuple {t} does not have dimension {dim}")
        return t
    pt = tuple(int(x) for x in t)
    if dim is not None and len(pt) != dim:
        raise InputError(f"tuple {pt} does not have dimension {dim}")
    if any(x < 0 for x in pt):
        raise InputError(f"tuple {pt} has negative entries")
    return pt


@dataclass(frozen=True)
class SymSet:
    """A finite or cofinite subset of ω^dim in canonical form.

    ``Cofinite`` with empty support is ω^dim; ``Finite`` with empty support is ∅.
    Supports are sorted, so structural equality is set equality.
    """

    dim: int
    cofinite: bool
    support: tuple = ()

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise InputError(f"dimension must be a positive integer, got {self.dim!r}")
        pts = tuple(sorted({_point(t, self.dim) for t in self.support}))
        object.__setattr__(self, "support", pts)

    @classmethod
    def finite(cls, dim: int, points: Iterable = ()) -> "SymSet":
        return cls(dim, False, tuple(points))

    @classmethod
    def cofinite_of(cls, dim: int, points: Iterable = ()) -> "SymSet":
        return cls(dim, True, tuple(points))

    @classmethod
    def empty(cls, dim: int = 1) -> "SymSet":
        return cls(dim, False, ())

    @classmethod
    def full(cls, dim: int = 1) -> "SymSet":
        return cls(dim, True, ())

    @classmethod
    def singleton(cls, point) -> "SymSet":
        pt = (point,) if isinstance(point, int) else tuple(point)
        return cls(len(pt), False, (pt,))

    @property
    def mode(self) -> str:
        return "cofinite" if self.cofinite else "finite"

    def __contains__(self, t):
        return symset_member(t, self)

    def __repr__(self):
        pts = ", ".join(str(p[0]) if self.dim == 1 else str(p) for p in self.support)
        head = "Cofinite" if self.cofinite else "Finite"
        return f"{head}^{self.dim}{{{pts}}}"


def _raw_symset(dim: int, cofinite: bool, support: tuple) -> SymSet:
    """Skip validation; ``support`` must already be sorted, unique and well formed."""
    X = object.__new__(SymSet)
    object.__setattr__(X, "dim", dim)
    object.__setattr__(X, "cofinite", cofinite)
    object.__setattr__(X, "support", support)
    return X


def symset_member(t, X: SymSet) -> bool:
    pt = (t,) if isinstance(t, int) else _point(t)
    if len(pt) != X.dim:
        raise InputError(f"tuple {pt} does not have dimension {X.dim}")
    return (pt in set(X.support)) != X.cofinite


def _same_dim(X, Y):
    if X.dim != Y.dim:
        raise InputError(f"dimension mismatch: {X.dim} vs {Y.dim}")


def symset_bool(kind: str, X: SymSet, Y: SymSet | None = None) -> SymSet:
    if kind == "compl":
        return SymSet(X.dim, not X.cofinite, X.support)
    if Y is None:
        raise InputError(f"{kind} needs two operands")
    _same_dim(X, Y)
    a, b = set(X.support), set(Y.support)
    if kind == "union":
        if not X.cofinite and not Y.cofinite:
            return SymSet(X.dim, False, a | b)
        if X.cofinite and Y.cofinite:
            return SymSet(X.dim, True, a & b)
        fin, cof = (a, b) if Y.cofinite else (b, a)
        return SymSet(X.dim, True, cof - fin)
    if kind == "inter":
        if not X.cofinite and not Y.cofinite:
            return SymSet(X.dim, False, a & b)
        if X.cofinite and Y.cofinite:
            return SymSet(X.dim, True, a | b)
        fin, cof = (a, b) if Y.cofinite else (b, a)
        return SymSet(X.dim, False, fin - cof)
    raise InputError(f"unknown boolean operation {kind!r}")


def union(X, Y):
    return symset_bool("union", X, Y)


def inter(X, Y):
    return symset_bool("inter", X, Y)


def compl(X):
    return symset_bool("compl", X)


def symset_cyc(X: SymSet) -> SymSet:
    """``{(a2, ..., an, a1) : (a1, ..., an) ∈ X}``."""
    if X.dim < 2:
        raise InputError("cyc needs dimension >= 2")
    return SymSet(X.dim, X.cofinite, tuple(t[1:] + t[:1] for t in X.support))


def symset_fib(c: int, X: SymSet) -> SymSet:
    """``{(a1, ..., a_{n-1}) : (c, a1, ..., a_{n-1}) ∈ X}``."""
    if X.dim < 2:
        raise InputError("fib needs dimension >= 2")
    return SymSet(X.dim - 1, X.cofinite, tuple(t[1:] for t in X.support if t[0] == c))


def symset_pre(op: OpDef, n: int, X: SymSet) -> SymSet:
    """``{(a1..a_{n-1}, x̄) : (a1..a_{n-1}, op(x̄)) ∈ X}``; needs finite fibers."""
    require_flags(op, FINITE_FIBERS)
    if X.dim != n:
        raise InputError(f"pre at position {n} needs a set of dimension {n}, got {X.dim}")
    pts = []
    fibers = {}
    for t in X.support:
        c = t[-1]
        if c not in fibers:
            fibers[c] = op.preimage(c)
        pts.extend(t[:-1] + xs for xs in fibers[c])
    return SymSet(n + op.arity - 1, X.cofinite, tuple(pts))


def product_preimage(ops: Sequence[OpDef], X: SymSet) -> SymSet:
    """``{(x̄1, ..., x̄m) : (h1(x̄1), ..., hm(x̄m)) ∈ X}`` for finite-fiber ``h_i``."""
    if len(ops) != X.dim:
        raise InputError(f"{len(ops)} operations for a set of dimension {X.dim}")
    for op in ops:
        require_flags(op, FINITE_FIBERS)
    pts = []
    for t in X.support:
        pools = [op.preimage(c) for op, c in zip(ops, t)]
        for parts in itertools.product(*pools):
            pts.append(tuple(x for part in parts for x in part))
    return SymSet(sum(op.arity for op in ops), X.cofinite, tuple(pts))


# -- generators and set terms ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GeneratorOracle:
    """A named subset of ω^dim given by a total membership test."""

    id: str
    dim: int
    member: Callable[[tuple], bool]
    hint: tuple = ("unknown",)

    def __eq__(self, other):
        return isinstance(other, GeneratorOracle) and (self.id, self.dim) == (other.id, other.dim)

    def __hash__(self):
        return hash((self.id, self.dim))


def oracle_table(oracles: Iterable[GeneratorOracle] | dict) -> dict:
    if isinstance(oracles, dict):
        return dict(oracles)
    table = {}
    for o in oracles:
        if o.id in table:
            raise InputError(f"duplicate generator id {o.id!r}")
        table[o.id] = o
    return table


class SetTerm:
    """Base class of symbolic set expressions."""

    dim: int

    def children(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Lit(SetTerm):
    value: SymSet

    @property
    def dim(self):
        return self.value.dim

    def __repr__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Gen(SetTerm):
    id: str
    dim: int = 1

    def __repr__(self):
        return self.id


@dataclass(frozen=True)
class Union(SetTerm):
    left: SetTerm
    right: SetTerm

    def __post_init__(self):
        _same_dim(self.left, self.right)

    @property
    def dim(self):
        return self.left.dim

    def children(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"({self.left!r} ∪ {self.right!r})"


@dataclass(frozen=True)
class Inter(SetTerm):
    left: SetTerm
    right: SetTerm

    def __post_init__(self):
        _same_dim(self.left, self.right)

    @property
    def dim(self):
        return self.left.dim

    def children(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"({self.left!r} ∩ {self.right!r})"


@dataclass(frozen=True)
class Compl(SetTerm):
    arg: SetTerm

    @property
    def dim(self):
        return self.arg.dim

    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"¬{self.arg!r}"


@dataclass(frozen=True)
class Cyc(SetTerm):
    arg: SetTerm

    def __post_init__(self):
        if self.arg.dim < 2:
            raise InputError("Cyc needs dimension >= 2")

    @property
    def dim(self):
        return self.arg.dim

    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"cyc({self.arg!r})"


@dataclass(frozen=True)
class Fib(SetTerm):
    c: int
    arg: SetTerm

    def __post_init__(self):
        if self.arg.dim < 2:
            raise InputError("Fib needs dimension >= 2")
        if self.c < 0:
            raise InputError("Fib constant must be a natural number")

    @property
    def dim(self):
        return self.arg.dim - 1

    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"fib{self.c}({self.arg!r})"


@dataclass(frozen=True)
class Pre(SetTerm):
    op: OpDef
    n: int
    arg: SetTerm

    def __post_init__(self):
        if self.arg.dim != self.n:
            raise InputError(f"Pre at position {self.n} needs an argument of dimension {self.n}")

    @property
    def dim(self):
        return self.n + self.op.arity - 1

    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"pre[{self.op.name},{self.n}]({self.arg!r})"


def set_term_depth(T: SetTerm) -> int:
    kids = T.children()
    return 0 if not kids else 1 + max(set_term_depth(k) for k in kids)


def term_generators(T: SetTerm) -> set[str]:
    if isinstance(T, Gen):
        return {T.id}
    out = set()
    for k in T.children():
        out |= term_generators(k)
    return out


def term_member(t, T, oracles: dict | None = None) -> bool:
    """Pointwise membership by structural recursion."""
    pt = (t,) if isinstance(t, int) else tuple(t)
    if isinstance(T, SymSet):
        return symset_member(pt, T)
    if len(pt) != T.dim:
        raise InputError(f"tuple {pt} does not have dimension {T.dim}")
    return _member(pt, T, oracles or {})


def _member(pt, T, oracles):
    if isinstance(T, Lit):
        return symset_member(pt, T.value)
    if isinstance(T, Gen):
        try:
            oracle = oracles[T.id]
        except KeyError:
            raise InputError(f"unresolved generator id {T.id!r}") from None
        return bool(oracle.member(pt))
    if isinstance(T, Union):
        return _member(pt, T.left, oracles) or _member(pt, T.right, oracles)
    if isinstance(T, Inter):
        return _member(pt, T.left, oracles) and _member(pt, T.right, oracles)
    if isinstance(T, Compl):
        return not _member(pt, T.arg, oracles)
    if isinstance(T, Cyc):
        return _member(pt[-1:] + pt[:-1], T.arg, oracles)
    if isinstance(T, Fib):
        return _member((T.c,) + pt, T.arg, oracles)
    if isinstance(T, Pre):
        head = pt[:T.n - 1]
        return _member(head + (T.op.fn(*pt[T.n - 1:]),), T.arg, oracles)
    raise InputError(f"not a set term: {T!r}")


def term_to_symset(T: SetTerm) -> SymSet:
    """Evaluate a generator-free term to its canonical SymSet."""
    if isinstance(T, SymSet):
        return T
    if isinstance(T, Lit):
        return T.value
    if isinstance(T, Gen):
        raise InputError(f"term mentions generator {T.id!r}; it has no SymSet value")
    if isinstance(T, Union):
        return union(term_to_symset(T.left), term_to_symset(T.right))
    if isinstance(T, Inter):
        return inter(term_to_symset(T.left), term_to_symset(T.right))
    if isinstance(T, Compl):
        return compl(term_to_symset(T.arg))
    if isinstance(T, Cyc):
        return symset_cyc(term_to_symset(T.arg))
    if isinstance(T, Fib):
        return symset_fib(T.c, term_to_symset(T.arg))
    if isinstance(T, Pre):
        return symset_pre(T.op, T.n, term_to_symset(T.arg))
    raise InputError(f"not a set term: {T!r}")


# -- bounded closure ------------------------------------------------------------------------------


CONSTRUCTORS = ("union", "inter", "compl", "cyc", "fib", "pre")


def singletons(dim: int, bound: int) -> list[Lit]:
    return [Lit(SymSet.singleton(pt)) for pt in itertools.product(range(bound + 1), repeat=dim)]


def closure_enumerate(generators, sig: Signature, depth: int, dims: Iterable[int], *,
                      constructors: Sequence[str] = CONSTRUCTORS, fib_constants: Sequence[int] = (0, 1),
                      singleton_bound: int = 1) -> list[SetTerm]:
    """Set terms of depth <= ``depth`` over the generators and singleton literals.

    Intermediate dimensions range over ``1..max(dims)``; the result keeps only
    terms whose dimension lies in ``dims``.  Commutative constructors are
    generated once per unordered pair.  Deterministic order.
    """
    if depth < 0:
        raise InputError("closure depth must be >= 0")
    dims = sorted(set(dims))
    top = max(dims)
    bad = set(constructors) - set(CONSTRUCTORS)
    if bad:
        raise InputError(f"unknown constructors {sorted(bad)}")
    table = oracle_table(generators)
    pre_ops = [op for op in sig.ops if FINITE_FIBERS in op.flags] if "pre" in constructors else []

    seen = set()
    terms: list[SetTerm] = []
    newest: list[SetTerm] = []

    def add(T, bucket):
        if T not in seen:
            seen.add(T)
            terms.append(T)
            bucket.append(T)

    for gid in sorted(table):
        if table[gid].dim <= top:
            add(Gen(gid, table[gid].dim), newest)
    for d in range(1, top + 1):
        for lit in singletons(d, singleton_bound):
            add(lit, newest)

    for _ in range(depth):
        fresh: list[SetTerm] = []
        current = list(terms)
        index = {T: i for i, T in enumerate(current)}
        newest_set = set(newest)
        for T in newest:
            if "compl" in constructors:
                add(Compl(T), fresh)
            if "cyc" in constructors and T.dim >= 2:
                add(Cyc(T), fresh)
            if "fib" in constructors and T.dim >= 2:
                for c in fib_constants:
                    add(Fib(c, T), fresh)
            for op in pre_ops:
                if T.dim + op.arity - 1 <= top:
                    add(Pre(op, T.dim, T), fresh)
        for kind, ctor in (("union", Union), ("inter", Inter)):
            if kind not in constructors:
                continue
            for A in current:
                for B in current:
                    if index[A] >= index[B] or A.dim != B.dim:
                        continue
                    if A in newest_set or B in newest_set:
                        add(ctor(A, B), fresh)
        newest = fresh
    return [T for T in terms if T.dim in dims]


# -- families -------------------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplingPlan:
    entry_bound: int = 16
    samples: int = 512
    seed: int = 0


class Family:
    """A handle on an indexed family of fields of subsets of ω^n.

    Subclasses decide which sets belong (``contains``), how to enumerate a
    finite sample of members, and which member realizes ``cyc``/``fib``/``pre``.
    A ``None`` from those methods means the family has no such member.
    """

    name = "family"
    sig: Signature = Signature(())
    dims: tuple = (1, 2)

    def members(self, dim: int) -> list:
        raise NotImplementedError

    def contains(self, X) -> bool:
        raise NotImplementedError

    def member(self, t, X) -> bool:
        raise NotImplementedError

    def cyc(self, X):
        raise NotImplementedError

    def fib(self, c: int, X):
        raise NotImplementedError

    def pre(self, op: OpDef, n: int, X):
        raise NotImplementedError

    def describe(self) -> dict:
        return {"name": self.name, "dims": list(self.dims), "sig": list(self.sig.names)}


class FiniteCofiniteFamily(Family):
    """All finite and cofinite subsets of ω^n; members are sampled SymSets."""

    def __init__(self, sig: Signature = Signature(()), dims=(1, 2, 3), sample_size: int = 64,
                 support_size: int = 6, entry_bound: int = 6, seed: int = 0):
        self.name = "finite/cofinite"
        self.sig = sig
        self.dims = tuple(sorted(dims))
        self._size = sample_size
        self._support = support_size
        self._bound = entry_bound
        self._seed = seed
        self._cache = {}

    def members(self, dim):
        if dim not in self._cache:
            rng = random.Random(f"{self._seed}:{dim}")
            sets = [SymSet.empty(dim), SymSet.full(dim)]
            while len(sets) < self._size:
                sets.append(random_symset(rng, dim, self._support, self._bound))
            self._cache[dim] = sets
        return self._cache[dim]

    def contains(self, X):
        return isinstance(X, SymSet) or (isinstance(X, Lit))

    def member(self, t, X):
        return symset_member(t, X.value if isinstance(X, Lit) else X)

    def cyc(self, X):
        return symset_cyc(_as_symset(X))

    def fib(self, c, X):
        return symset_fib(c, _as_symset(X))

    def pre(self, op, n, X):
        return symset_pre(op, n, _as_symset(X))


def _as_symset(X):
    return X.value if isinstance(X, Lit) else X


def random_symset(rng: random.Random, dim: int, max_support: int = 6, entry_bound: int = 6) -> SymSet:
    k = rng.randint(0, max_support)
    pts = [tuple(rng.randint(0, entry_bound) for _ in range(dim)) for _ in range(k)]
    return SymSet(dim, rng.random() < 0.5, tuple(pts))


class ClosureFamily(Family):
    """The field generated by oracles, singletons and the set constructors.

    Membership in the family is syntactic: any term over the known generators
    built with the allowed constructors belongs (the closure is the union over
    all depths).  ``members`` enumerates the bounded-depth fragment.
    """

    def __init__(self, generators, sig: Signature, depth: int = 1, dims=(1, 2), *,
                 constructors: Sequence[str] = CONSTRUCTORS, fib_constants=(0, 1),
                 singleton_bound: int = 1, name: str = "closure"):
        self.name = name
        self.oracles = oracle_table(generators)
        self.sig = sig
        self.depth = depth
        self.dims = tuple(sorted(dims))
        self.constructors = tuple(constructors)
        self.fib_constants = tuple(fib_constants)
        self.singleton_bound = singleton_bound
        self._members = None

    def all_members(self) -> list:
        if self._members is None:
            self._members = closure_enumerate(
                self.oracles, self.sig, self.depth, self.dims, constructors=self.constructors,
                fib_constants=self.fib_constants, singleton_bound=self.singleton_bound)
        return self._members

    def members(self, dim):
        return [T for T in self.all_members() if T.dim == dim]

    def contains(self, X):
        if isinstance(X, SymSet):
            return True
        return _built_from(X, self.oracles, self.constructors, self.sig)

    def member(self, t, X):
        return term_member(t, X, self.oracles)

    def cyc(self, X):
        return Cyc(_as_term(X)) if "cyc" in self.constructors else None

    def fib(self, c, X):
        return Fib(c, _as_term(X)) if "fib" in self.constructors else None

    def pre(self, op, n, X):
        if "pre" not in self.constructors or op not in self.sig.ops:
            return None
        return Pre(op, n, _as_term(X))

    def describe(self):
        d = super().describe()
        d.update(depth=self.depth, generators=sorted(self.oracles), constructors=list(self.constructors))
        return d


def _as_term(X):
    return Lit(X) if isinstance(X, SymSet) else X


_CTOR_NAMES = {Union: "union", Inter: "inter", Compl: "compl", Cyc: "cyc", Fib: "fib", Pre: "pre"}


def _built_from(T, oracles, constructors, sig):
    if isinstance(T, Lit):
        return True
    if isinstance(T, Gen):
        return T.id in oracles
    name = _CTOR_NAMES.get(type(T))
    if name is None or name not in constructors:
        return False
    if isinstance(T, Pre) and T.op not in sig.ops:
        return False
    return all(_built_from(k, oracles, constructors, sig) for k in T.children())


class RestrictedFamily(Family):
    """A family with some constructors removed; used as a negative control."""

    def __init__(self, base: Family, exclude: Iterable[str]):
        self.base = base
        self.exclude = frozenset(exclude)
        self.name = f"{base.name} without {sorted(self.exclude)}"
        self.sig = base.sig
        self.dims = base.dims

    def _allowed(self, X):
        if isinstance(X, SetTerm) and not isinstance(X, (Lit, Gen)):
            if _CTOR_NAMES.get(type(X)) in self.exclude:
                return False
            return all(self._allowed(k) for k in X.children())
        return True

    def members(self, dim):
        return [X for X in self.base.members(dim) if self._allowed(X)]

    def contains(self, X):
        return self._allowed(X) and self.base.contains(X)

    def member(self, t, X):
        return self.base.member(t, X)

    def cyc(self, X):
        return None if "cyc" in self.exclude else self.base.cyc(X)

    def fib(self, c, X):
        return None if "fib" in self.exclude else self.base.fib(c, X)

    def pre(self, op, n, X):
        return None if "pre" in self.exclude else self.base.pre(op, n, X)


class UnionFamily(Family):
    """Union of families sharing a signature; operations delegate to the owner."""

    def __init__(self, families: Sequence[Family]):
        if not families:
            raise InputError("family_union needs at least one family")
        names = families[0].sig.names
        for fam in families[1:]:
            if fam.sig.names != names:
                raise InputError(f"signature mismatch: {names} vs {fam.sig.names}")
        self.families = list(families)
        self.sig = families[0].sig
        self.dims = tuple(sorted({d for fam in families for d in fam.dims}))
        self.name = " ∪ ".join(fam.name for fam in families)

    def members(self, dim):
        out, seen = [], set()
        for fam in self.families:
            if dim not in fam.dims:
                continue
            for X in fam.members(dim):
                if X not in seen:
                    seen.add(X)
                    out.append(X)
        return out

    def _owner(self, X):
        for fam in self.families:
            if fam.contains(X):
                return fam
        return None

    def contains(self, X):
        return self._owner(X) is not None

    def member(self, t, X):
        owner = self._owner(X)
        if owner is None:
            raise InputError(f"{X!r} is not in {self.name}")
        return owner.member(t, X)

    def cyc(self, X):
        owner = self._owner(X)
        return None if owner is None else owner.cyc(X)

    def fib(self, c, X):
        owner = self._owner(X)
        return None if owner is None else owner.fib(c, X)

    def pre(self, op, n, X):
        owner = self._owner(X)
        return None if owner is None else owner.pre(op, n, X)


def family_union(families: Sequence[Family]) -> UnionFamily:
    return UnionFamily(families)


# -- sampled admissibility ------------------------------------------------------------------------


@dataclass
class AdmissibilityReport:
    family: str
    passed: bool = True
    checked: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    def fail(self, clause, detail):
        self.passed = False
        if len(self.counterexamples) < 20:
            self.counterexamples.append({"clause": clause, "detail": detail})

    def to_json(self):
        return {"family": self.family, "passed": self.passed, "checked": self.checked,
                "counterexamples": self.counterexamples}


def check_admissible_sampled(family: Family, plan: SamplingPlan = SamplingPlan()) -> AdmissibilityReport:
    """Sample the closure clauses (cyc, fib, iterated sections, and pre for the signature)."""
    rng = random.Random(plan.seed)
    report = AdmissibilityReport(family.name)
    pools = {n: family.members(n) for n in family.dims}
    high = [n for n in family.dims if n >= 2 and pools[n]]
    for clause in ("cyc", "fib", "sections"):
        report.checked[clause] = 0
    if not high:
        return report

    def rand_pt(k):
        return tuple(rng.randint(0, plan.entry_bound) for _ in range(k))

    def agree(clause, X, Y, lhs, rhs):
        report.checked[clause] += 1
        if Y is None or not family.contains(Y):
            report.fail(clause, f"{clause} image of {X!r} is not in the family")
            return
        if family.member(lhs, Y) != family.member(rhs, X):
            report.fail(clause, f"membership of {lhs} in {Y!r} disagrees with {rhs} in {X!r}")

    for _ in range(plan.samples):
        n = rng.choice(high)
        X = rng.choice(pools[n])
        t = rand_pt(n)
        agree("cyc", X, family.cyc(X), t, (t[-1],) + t[:-1])

    for _ in range(plan.samples):
        n = rng.choice(high)
        X = rng.choice(pools[n])
        c = rng.randint(0, plan.entry_bound)
        t = rand_pt(n - 1)
        agree("fib", X, family.fib(c, X), t, (c,) + t)

    for _ in range(plan.samples):
        n = rng.choice(high)
        X = rng.choice(pools[n])
        k = rng.randint(1, n - 1)
        head = rand_pt(n - k)
        Y = X
        for a in head:
            Y = family.fib(a, Y) if Y is not None else None
        t = rand_pt(k)
        agree("sections", X, Y, t, head + t)

    ops = [op for op in family.sig.ops if FINITE_FIBERS in op.flags]
    if ops:
        report.checked["pre"] = 0
        for _ in range(plan.samples):
            op = rng.choice(ops)
            n = rng.choice([d for d in family.dims if pools[d]])
            X = rng.choice(pools[n])
            t = rand_pt(n + op.arity - 1)
            agree("pre", X, family.pre(op, n, X), t, t[:n - 1] + (op.fn(*t[n - 1:]),))
    return report
