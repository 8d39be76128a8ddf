"""Operations on the naturals, signatures, and orderly terms.

An orderly term is either the identity or ``g(h_1(x_1..), ..., h_n(x_n..))``
where the argument blocks of the ``h_i`` are consecutive and disjoint.  Terms
are plain trees; equality is structural.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .errors import InputError

FINITE_FIBERS = "finite_fibers"
INFLATIONARY = "inflationary"
STRICT = "strictly_increasing_safe"
ASSOCIATIVE = "associative"
KNOWN_FLAGS = frozenset({FINITE_FIBERS, INFLATIONARY, STRICT, ASSOCIATIVE})

# Sampled flag validation box and the fibers whose stability is checked.
VALIDATION_BOUND = 64
FIBER_CHECK_MAX = 32


@dataclass(frozen=True, eq=False)
class OpDef:
    """An operation ``N^arity -> N`` with declared flags.

    ``fiber`` enumerates the exact preimage of a value when known in closed
    form; otherwise ``fiber_bound(c)`` bounds every coordinate of every
    preimage of ``c`` and the preimage is found by a box scan.
    """

    name: str
    arity: int
    fn: Callable[..., int]
    flags: frozenset = frozenset()
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    fiber: Callable[[int], Iterable[tuple]] | None = None
    fiber_bound: Callable[[int], int] | None = None

    def __post_init__(self):
        if not isinstance(self.arity, int) or self.arity < 1:
            raise InputError(f"operation {self.name!r}: arity must be a positive integer (no nullary ops)")
        unknown = set(self.flags) - KNOWN_FLAGS
        if unknown:
            raise InputError(f"operation {self.name!r}: unknown flags {sorted(unknown)}")
        object.__setattr__(self, "flags", frozenset(self.flags))
        key = (self.name, self.arity, self.kind, repr(sorted(self.params.items())))
        object.__setattr__(self, "_cached_key", key)
        object.__setattr__(self, "_cached_hash", hash(key))

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise InputError(f"{self.name} expects {self.arity} arguments, got {len(args)}")
        return self.fn(*args)

    def _key(self):
        return self._cached_key

    def __eq__(self, other):
        return self is other or (isinstance(other, OpDef) and self._cached_key == other._cached_key)

    def __hash__(self):
        return self._cached_hash

    def __repr__(self):
        return f"OpDef({self.name}/{self.arity})"

    def has(self, flag: str) -> bool:
        return flag in self.flags

    def preimage(self, c: int) -> tuple[tuple[int, ...], ...]:
        """All argument tuples mapped to ``c``, sorted."""
        if self.fiber is not None:
            return tuple(sorted(set(self.fiber(c))))
        bound = self.bound_for(c)
        return tuple(
            pt for pt in itertools.product(range(bound + 1), repeat=self.arity) if self.fn(*pt) == c
        )

    def bound_for(self, c: int) -> int:
        if self.fiber_bound is not None:
            return self.fiber_bound(c)
        if INFLATIONARY in self.flags:
            return c
        raise InputError(f"operation {self.name!r} has no fiber bound; preimages cannot be computed")


# -- built-in operations -----------------------------------------------------


def _plus_fiber(c):
    return ((a, c - a) for a in range(c + 1))


def _shifted_mult_fiber(c):
    n = c + 1
    for d in range(1, n + 1):
        if n % d == 0:
            yield (d - 1, n // d - 1)


def _succ_fiber(c):
    return [(c - 1,)] if c >= 1 else []


def plus() -> OpDef:
    return OpDef("plus", 2, lambda a, b: a + b,
                 frozenset({FINITE_FIBERS, INFLATIONARY, STRICT, ASSOCIATIVE}),
                 kind="plus", fiber=_plus_fiber)


def shifted_mult() -> OpDef:
    # (a+1)(b+1) - 1, associative because it is multiplication conjugated by x -> x+1
    return OpDef("shifted_mult", 2, lambda a, b: a + b + a * b,
                 frozenset({FINITE_FIBERS, INFLATIONARY, STRICT, ASSOCIATIVE}),
                 kind="shifted_mult", fiber=_shifted_mult_fiber)


def zero() -> OpDef:
    return OpDef("zero", 2, lambda a, b: 0, frozenset({ASSOCIATIVE}), kind="zero")


def first() -> OpDef:
    return OpDef("first", 2, lambda a, b: a, frozenset({ASSOCIATIVE}), kind="first")


def monus(flags: Iterable[str] = ()) -> OpDef:
    """Truncated subtraction; its fibers are infinite, so it is never finite_fibers."""
    return OpDef("monus", 2, lambda a, b: a - b if a > b else 0, frozenset(flags), kind="monus",
                 fiber_bound=lambda c: VALIDATION_BOUND)


def succ() -> OpDef:
    return OpDef("succ", 1, lambda a: a + 1, frozenset({FINITE_FIBERS, INFLATIONARY, STRICT}),
                 kind="succ", fiber=_succ_fiber)


def table(name: str, arity: int, entries: dict, default: str = "plus",
          flags: Iterable[str] = (), fiber_bound: int | None = None) -> OpDef:
    """An operation given by a finite table, falling back to a built-in rule elsewhere."""
    fallback = BUILTINS[default]()
    if fallback.arity != arity:
        raise InputError(f"table {name!r}: default rule {default!r} has arity {fallback.arity}, not {arity}")
    lookup = {tuple(k): int(v) for k, v in entries.items()}
    for k in lookup:
        if len(k) != arity:
            raise InputError(f"table {name!r}: entry {k} does not have arity {arity}")

    def fn(*args):
        return lookup.get(args, fallback.fn(*args) if fallback.arity == len(args) else 0)

    box = max((max(k) for k in lookup), default=0)
    values = max(lookup.values(), default=0)
    if fiber_bound is not None:
        fb = lambda c: fiber_bound  # noqa: E731
    elif INFLATIONARY in fallback.flags:
        fb = lambda c: max(c, box)  # noqa: E731
    else:
        fb = None
    params = {"entries": sorted([list(k), v] for k, v in lookup.items()), "default": default,
              "max_value": values}
    if fiber_bound is not None:
        params["fiber_bound"] = fiber_bound
    return OpDef(name, arity, fn, frozenset(flags), kind="table", params=params, fiber_bound=fb)


BUILTINS: dict[str, Callable[[], OpDef]] = {
    "plus": plus,
    "shifted_mult": shifted_mult,
    "zero": zero,
    "first": first,
    "monus": monus,
    "succ": succ,
}


def builtin(name: str) -> OpDef:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise InputError(f"unknown built-in operation {name!r}; known: {sorted(BUILTINS)}") from None


# -- flag validation -----------------------------------------------------------


def _sample_points(arity, lo, hi, limit, rng):
    width = hi - lo + 1
    if width ** arity <= limit:
        return list(itertools.product(range(lo, hi + 1), repeat=arity))
    return [tuple(rng.randint(lo, hi) for _ in range(arity)) for _ in range(limit)]


def validate_flags(op: OpDef, bound: int = VALIDATION_BOUND, samples: int = 4096, seed: int = 0) -> list[str]:
    """Check each declared flag on sampled arguments in ``[0, bound]``.

    Returns a list of human-readable failures; empty means every flag survived.
    """
    rng = random.Random(seed)
    failures = []
    points = _sample_points(op.arity, 0, bound, samples, rng)

    if INFLATIONARY in op.flags:
        for pt in points:
            if op.fn(*pt) < max(pt):
                failures.append(f"{INFLATIONARY}: {op.name}{pt} = {op.fn(*pt)} < {max(pt)}")
                break

    if STRICT in op.flags:
        for pt in _sample_points(op.arity, 1, bound, samples, rng):
            if op.fn(*pt) <= max(pt):
                failures.append(f"{STRICT}: {op.name}{pt} = {op.fn(*pt)} <= {max(pt)}")
                break

    if ASSOCIATIVE in op.flags:
        if op.arity != 2:
            failures.append(f"{ASSOCIATIVE}: declared on an operation of arity {op.arity}")
        else:
            for a, b, c in _sample_points(3, 0, bound, samples, rng):
                if op.fn(op.fn(a, b), c) != op.fn(a, op.fn(b, c)):
                    failures.append(f"{ASSOCIATIVE}: fails at {(a, b, c)}")
                    break

    if FINITE_FIBERS in op.flags:
        failures.extend(_validate_fibers(op, samples, rng))
    return failures


def _validate_fibers(op, samples, rng):
    try:
        fibers = {c: set(op.preimage(c)) for c in range(FIBER_CHECK_MAX + 1)}
    except InputError as exc:
        return [f"{FINITE_FIBERS}: {exc}"]
    for c, fib in fibers.items():
        for pt in fib:
            if op.fn(*pt) != c:
                return [f"{FINITE_FIBERS}: {op.name}{pt} != {c} but listed in its fiber"]
    # stability: a scan of a strictly larger box must not find new preimages
    try:
        wide = max(op.bound_for(c) for c in range(FIBER_CHECK_MAX + 1)) + 16
    except InputError as exc:
        return [f"{FINITE_FIBERS}: {exc}"]
    for pt in _sample_points(op.arity, 0, wide, max(samples, 20000), rng):
        v = op.fn(*pt)
        if v <= FIBER_CHECK_MAX and pt not in fibers[v]:
            return [f"{FINITE_FIBERS}: fiber of {v} is unstable ({pt} lies outside the computed preimage)"]
    return []


_validated: dict = {}


def require_flags(op: OpDef, *flags: str) -> None:
    """Raise InputError unless ``op`` declares ``flags`` and they pass sampled validation."""
    missing = [f for f in flags if f not in op.flags]
    if missing:
        raise InputError(f"operation {op.name!r} lacks required flags {missing}")
    key = (op, op.flags)
    if key not in _validated:
        _validated[key] = validate_flags(op)
    failures = [f for f in _validated[key] if f.split(":")[0] in flags]
    if failures:
        raise InputError(f"operation {op.name!r} fails flag validation: {failures}")


# -- signatures ------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    ops: tuple[OpDef, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise InputError(f"signature op names must be distinct: {names}")

    @classmethod
    def of(cls, *ops: OpDef) -> "Signature":
        return cls(tuple(ops))

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(op.name for op in self.ops)

    def get(self, name: str) -> OpDef:
        for op in self.ops:
            if op.name == name:
                return op
        raise InputError(f"operation {name!r} is not in the signature {self.names}")

    def min_arity(self) -> int:
        return min((op.arity for op in self.ops), default=2)

    def max_arity(self) -> int:
        return max((op.arity for op in self.ops), default=1)

    def complete_enumeration(self) -> bool:
        """True when depth-bounded enumeration is complete (no unary ops)."""
        return self.min_arity() >= 2

    def all_have(self, flag: str) -> bool:
        return all(flag in op.flags for op in self.ops)

    def require(self, *flags: str) -> None:
        for op in self.ops:
            require_flags(op, *flags)


# -- orderly terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    def __repr__(self):
        return "x"


IDENTITY = Identity()


@dataclass(frozen=True)
class Apply:
    op: OpDef
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) != self.op.arity:
            raise InputError(
                f"{self.op.name} has arity {self.op.arity} but was given {len(self.children)} children")

    def __repr__(self):
        return term_str(self)


OrderlyTerm = Identity | Apply


def term_arity(t: OrderlyTerm) -> int:
    """Number of leaves; argument blocks are consecutive so arity is additive."""
    if isinstance(t, Identity):
        return 1
    return sum(term_arity(c) for c in t.children)


def term_depth(t: OrderlyTerm) -> int:
    """Tree depth with the identity leaf at depth 1."""
    if isinstance(t, Identity):
        return 1
    return 1 + max(term_depth(c) for c in t.children)


def term_ops(t: OrderlyTerm) -> set[OpDef]:
    if isinstance(t, Identity):
        return set()
    out = {t.op}
    for c in t.children:
        out |= term_ops(c)
    return out


def term_eval(t: OrderlyTerm, args: Sequence[int]) -> int:
    if len(args) != term_arity(t):
        raise InputError(f"term {term_str(t)} has arity {term_arity(t)}, got {len(args)} arguments")
    return _eval(t, tuple(args))


def _eval(t, args):
    if isinstance(t, Identity):
        return args[0]
    values = []
    pos = 0
    for child in t.children:
        k = term_arity(child)
        values.append(_eval(child, args[pos:pos + k]))
        pos += k
    return t.op.fn(*values)


def term_str(t: OrderlyTerm, names: Iterable[str] | None = None) -> str:
    var_names = iter(names) if names is not None else (f"x{i}" for i in itertools.count())
    return _render(t, var_names)


def _render(t, names):
    if isinstance(t, Identity):
        return next(names)
    inner = ", ".join(_render(c, names) for c in t.children)
    return f"{t.op.name}({inner})"


def compose(g: OrderlyTerm, hs: Sequence[OrderlyTerm]) -> OrderlyTerm:
    """Orderly composition: substitute ``hs[i]`` for the i-th leaf of ``g``."""
    if len(hs) != term_arity(g):
        raise InputError(f"compose: {term_str(g)} has {term_arity(g)} leaves, got {len(hs)} terms")
    it = iter(hs)
    return _subst(g, it)


def _subst(t, it):
    if isinstance(t, Identity):
        return next(it)
    return Apply(t.op, tuple(_subst(c, it) for c in t.children))


def compositions(n: int, k: int):
    """Ordered ways to write ``n`` as ``k`` positive parts, in lexicographic order."""
    if k == 1:
        if n >= 1:
            yield (n,)
        return
    for first_part in range(1, n - k + 2):
        for rest in compositions(n - first_part, k - 1):
            yield (first_part,) + rest


def enumerate_orderly_terms(sig: Signature, arity: int, max_depth: int) -> list[OrderlyTerm]:
    """All orderly terms over ``sig`` of the given arity and depth at most ``max_depth``.

    Order: the identity first, then by op in signature order, then by block
    composition lexicographically, then children in their own order.
    """
    if arity < 1 or max_depth < 1:
        raise InputError("arity and max_depth must be positive")
    return list(_terms(sig, arity, max_depth))


@lru_cache(maxsize=4096)
def _terms(sig, arity, depth):
    if depth < 1:
        return ()
    out = []
    if arity == 1:
        out.append(IDENTITY)
    if depth >= 2:
        for op in sig.ops:
            if op.arity > arity:
                continue
            for parts in compositions(arity, op.arity):
                pools = [_terms(sig, p, depth - 1) for p in parts]
                for kids in itertools.product(*pools):
                    out.append(Apply(op, kids))
    return tuple(out)


def term_fiber(t: OrderlyTerm, c: int) -> Iterable[tuple[int, ...]]:
    if isinstance(t, Identity):
        yield (c,)
        return
    for values in t.op.preimage(c):
        pools = [tuple(term_fiber(child, v)) for child, v in zip(t.children, values)]
        for parts in itertools.product(*pools):
            yield tuple(x for part in parts for x in part)


def term_op(t: OrderlyTerm, name: str | None = None) -> OpDef:
    """View an orderly term as an operation, inheriting flags its ops all share."""
    ops = term_ops(t)
    flags = set()
    for flag in (FINITE_FIBERS, INFLATIONARY):
        if all(flag in op.flags for op in ops):
            flags.add(flag)
    if ops and all(STRICT in op.flags for op in ops):
        flags.add(STRICT)
    fiber = None
    if FINITE_FIBERS in flags:
        fiber = lambda c: term_fiber(t, c)  # noqa: E731
    return OpDef(name or term_str(t), term_arity(t), lambda *args: _eval(t, args), frozenset(flags),
                 kind="term", params={"term": term_str(t)}, fiber=fiber)
