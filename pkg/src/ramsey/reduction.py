"""Reductions between sequences and finite-reduction (FR) sets.

``a`` reduces to ``b`` when each ``a[n]`` is an orderly term applied to a block
of ``b``, and the blocks, read in order, select a subsequence of ``b``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .core_algebra import (
    IDENTITY,
    INFLATIONARY,
    OrderlyTerm,
    Signature,
    compose,
    compositions,
    enumerate_orderly_terms,
    term_arity,
    term_eval,
    term_ops,
    term_str,
)
from .errors import InputError, PrefixTooShort

FiniteSeq = tuple


@dataclass(frozen=True, eq=False)
class Rule:
    """A pure generator ``index -> entry`` for the unbounded part of a stream."""

    kind: str
    params: dict
    fn: Callable[[int], int]

    def _key(self):
        return (self.kind, repr(sorted(self.params.items())))

    def __eq__(self, other):
        return isinstance(other, Rule) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        args = ", ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({args})"


def arithmetic(start: int, step: int) -> Rule:
    return Rule("arithmetic", {"start": start, "step": step}, lambda i: start + step * i)


def geometric(start: int, ratio: int) -> Rule:
    return Rule("geometric", {"start": start, "ratio": ratio}, lambda i: start * ratio ** i)


def powers(base: int) -> Rule:
    return Rule("powers", {"base": base}, lambda i: base ** i)


def table_rule(values: Sequence[int]) -> Rule:
    vals = tuple(values)

    def fn(i):
        if i >= len(vals):
            raise PrefixTooShort(i)
        return vals[i]

    return Rule("table", {"values": list(vals)}, fn)


RULES = {"arithmetic": arithmetic, "geometric": geometric, "powers": powers, "table": table_rule}


@dataclass(frozen=True)
class StreamSeq:
    """A sequence given by an explicit prefix and an optional rule for the rest.

    Without a rule the stream is just the finite sequence ``prefix``.
    Entry ``i`` past the prefix is ``rule(i + offset)``; ``offset`` records cut-offs.
    """

    prefix: tuple = ()
    rule: Rule | None = None
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(x) for x in self.prefix))

    @classmethod
    def finite(cls, entries: Sequence[int]) -> "StreamSeq":
        return cls(tuple(entries), None)

    @classmethod
    def of_rule(cls, rule: Rule) -> "StreamSeq":
        return cls((), rule)

    @property
    def is_infinite(self) -> bool:
        return self.rule is not None

    def __len__(self):
        if self.rule is not None:
            raise TypeError("infinite stream has no length")
        return len(self.prefix)

    def has(self, i: int) -> bool:
        return self.rule is not None or i < len(self.prefix)

    def at(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        if self.rule is None:
            raise PrefixTooShort(i)
        return self.rule.fn(i + self.offset)

    def take(self, n: int) -> tuple:
        return tuple(self.at(i) for i in range(n))

    def shift(self, n: int) -> "StreamSeq":
        """The cut-off sequence starting at entry ``n``."""
        if n <= len(self.prefix):
            return StreamSeq(self.prefix[n:], self.rule, self.offset + n)
        if self.rule is None:
            return StreamSeq((), None, 0)
        return StreamSeq((), self.rule, self.offset + n)

    def check_increasing(self, upto: int, start: int = 0) -> None:
        prev = None
        for i in range(start, upto):
            if not self.has(i):
                break
            v = self.at(i)
            if prev is not None and v <= prev:
                raise InputError(f"stream is not strictly increasing at entry {i} ({prev} then {v})")
            prev = v


def powers2() -> StreamSeq:
    return StreamSeq.of_rule(powers(2))


def naturals(start: int = 1) -> StreamSeq:
    return StreamSeq.of_rule(arithmetic(start, 1))


def _entries(b) -> tuple:
    if isinstance(b, StreamSeq):
        if b.is_infinite:
            raise InputError("a finite sequence is required here; take a prefix first")
        return b.prefix
    return tuple(b)


# -- witnesses ------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    indices: tuple
    term: OrderlyTerm = IDENTITY

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))


@dataclass(frozen=True)
class ReductionWitness:
    blocks: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def __len__(self):
        return len(self.blocks)

    def flat_indices(self) -> tuple:
        return tuple(i for blk in self.blocks for i in blk.indices)

    def describe(self) -> list[str]:
        return [f"{term_str(blk.term)} @ {list(blk.indices)}" for blk in self.blocks]


def _validate_witness(a_len, b_len, w, sig):
    if len(w.blocks) != a_len:
        raise InputError(f"witness has {len(w.blocks)} blocks for a sequence of length {a_len}")
    prev = -1
    allowed = set(sig.ops)
    for n, blk in enumerate(w.blocks):
        if not blk.indices:
            raise InputError(f"block {n} is empty")
        if term_arity(blk.term) != len(blk.indices):
            raise InputError(
                f"block {n}: term {term_str(blk.term)} has arity {term_arity(blk.term)} "
                f"but the block has {len(blk.indices)} indices")
        foreign = term_ops(blk.term) - allowed
        if foreign:
            raise InputError(f"block {n}: term uses operations outside the signature: {sorted(o.name for o in foreign)}")
        for i in blk.indices:
            if b_len is not None and not 0 <= i < b_len:
                raise InputError(f"block {n}: index {i} is out of range for a sequence of length {b_len}")
            if i <= prev:
                raise InputError(f"block {n}: indices are not globally increasing ({prev} then {i})")
            prev = i


def check_witness(a: Sequence[int], b, w: ReductionWitness, sig: Signature) -> bool:
    """Decide whether ``w`` certifies ``a ⊴ b``; malformed witnesses raise InputError."""
    a = tuple(a)
    stream = b if isinstance(b, StreamSeq) else StreamSeq.finite(b)
    b_len = None if stream.is_infinite else len(stream.prefix)
    _validate_witness(len(a), b_len, w, sig)
    return all(
        term_eval(blk.term, [stream.at(i) for i in blk.indices]) == a[n]
        for n, blk in enumerate(w.blocks)
    )


# -- value sets of blocks ----------------------------------------------------------------


def default_depth(length: int) -> int:
    return max(1, length)


@lru_cache(maxsize=1 << 16)
def block_values(values: tuple, sig: Signature, depth: int, cap: int | None = None) -> frozenset:
    """Values of all orderly terms of depth <= ``depth`` applied to the whole block.

    ``cap`` drops values above it; only sound when every op is inflationary.
    """
    n = len(values)
    if sig.min_arity() >= 2 and depth > n:
        # a tree with n leaves and no unary nodes has depth <= n
        return block_values(values, sig, n, cap)
    out = set()
    if n == 1 and (cap is None or values[0] <= cap):
        out.add(values[0])
    if depth >= 2:
        for op in sig.ops:
            if op.arity > n:
                continue
            fn = op.fn
            for cuts in _cut_points(n, op.arity):
                pools = []
                for a, b in cuts:
                    pool = block_values(values[a:b], sig, depth - 1, cap)
                    if not pool:
                        break
                    pools.append(pool)
                else:
                    if op.arity == 2:
                        vals = {fn(x, y) for x in pools[0] for y in pools[1]}
                    else:
                        vals = {fn(*combo) for combo in itertools.product(*pools)}
                    if cap is not None:
                        vals = {v for v in vals if v <= cap}
                    out |= vals
    return frozenset(out)


@lru_cache(maxsize=None)
def _cut_points(n: int, k: int) -> tuple:
    """Each composition of n into k parts as (start, end) slices."""
    out = []
    for parts in compositions(n, k):
        pos, cuts = 0, []
        for p in parts:
            cuts.append((pos, pos + p))
            pos += p
        out.append(tuple(cuts))
    return tuple(out)


def max_block_length(sig: Signature, depth: int) -> int:
    top = sig.max_arity()
    if top <= 1:
        return 1
    return top ** (depth - 1)


def fr_enumerate(b: Sequence[int], sig: Signature, max_depth: int | None = None) -> frozenset:
    """FR of a finite sequence: values of orderly terms on nonempty subsequences."""
    entries = _entries(b)
    depth = default_depth(len(entries)) if max_depth is None else max_depth
    longest = min(len(entries), max_block_length(sig, depth))
    complete = sig.min_arity() >= 2 and depth >= longest
    memo = _block_memo.setdefault((sig, None if complete else depth), {})
    if len(memo) > _BLOCK_MEMO_LIMIT:
        memo.clear()
    out = set(entries)
    for k in range(2, longest + 1):
        for sub in itertools.combinations(entries, k):
            vals = memo.get(sub)
            if vals is None:
                vals = memo[sub] = block_values(sub, sig, depth)
            out |= vals
    return frozenset(out)


# plain dict in front of the lru cache: cheaper lookups in the subset loop
_block_memo: dict = {}
_BLOCK_MEMO_LIMIT = 1 << 18


def _lex_blocks(p, m, longest):
    for i in range(p, m):
        yield (i,)
        if longest > 1:
            for rest in _lex_blocks(i + 1, m, longest - 1):
                yield (i,) + rest


def first_term(values: Sequence[int], target: int, sig: Signature, depth: int) -> OrderlyTerm | None:
    """Earliest term in enumeration order evaluating to ``target`` on ``values``."""
    for t in enumerate_orderly_terms(sig, len(values), depth):
        if term_eval(t, values) == target:
            return t
    return None


def find_reduction(a: Sequence[int], b: Sequence[int], sig: Signature,
                   max_depth: int | None = None) -> ReductionWitness | None:
    """Search for a witness of ``a ⊴ b``.

    Blocks are tried in lexicographic order and terms in enumeration order, so
    the result is the lexicographically least witness.  Complete when every op
    has arity >= 2 and ``max_depth >= len(b)``.
    """
    a = tuple(a)
    entries = _entries(b)
    depth = default_depth(len(entries)) if max_depth is None else max_depth
    longest = max_block_length(sig, depth)
    failed = set()

    def search(n, p):
        if n == len(a):
            return []
        if (n, p) in failed:
            return None
        remaining_after = len(a) - n - 1
        for blk in _lex_blocks(p, len(entries) - remaining_after, longest):
            if blk[-1] >= len(entries) - remaining_after:
                continue
            vals = tuple(entries[i] for i in blk)
            if a[n] not in block_values(vals, sig, depth):
                continue
            rest = search(n + 1, blk[-1] + 1)
            if rest is not None:
                return [Block(blk, first_term(vals, a[n], sig, depth))] + rest
        failed.add((n, p))
        return None

    found = search(0, 0)
    return None if found is None else ReductionWitness(tuple(found))


# -- FR membership on streams ----------------------------------------------------------------


def _window(b: StreamSeq, tail: int, cap: int) -> tuple:
    out = []
    i = tail
    while b.has(i):
        v = b.at(i)
        if out and v <= out[-1]:
            raise InputError(f"stream is not strictly increasing at entry {i} ({out[-1]} then {v})")
        if v > cap:
            break
        out.append(v)
        i += 1
    return tuple(out)


@lru_cache(maxsize=1 << 12)
def fr_values_upto(b: StreamSeq, tail: int, sig: Signature, cap: int) -> frozenset:
    """All elements of FR(b - tail) that are <= cap.

    Exact under inflationary ops and a strictly increasing stream: only entries
    <= cap can contribute, so an interval dynamic programme over that finite
    window suffices.
    """
    sig.require(INFLATIONARY)
    entries = _window(b, tail, cap)
    k = len(entries)
    unary = [op for op in sig.ops if op.arity == 1]
    wide = [op for op in sig.ops if op.arity >= 2]
    W = {}
    for length in range(1, k + 1):
        for i in range(0, k - length + 1):
            j = i + length - 1
            vals = set()
            if length == 1:
                vals.add(entries[i])
            else:
                vals |= W[(i + 1, j)]
                vals |= W[(i, j - 1)]
            for op in wide:
                if op.arity > length:
                    continue
                for parts in compositions(length, op.arity):
                    pools = []
                    pos = i
                    for p in parts:
                        pools.append(W[(pos, pos + p - 1)])
                        pos += p
                    for combo in itertools.product(*pools):
                        v = op.fn(*combo)
                        if v <= cap:
                            vals.add(v)
            if unary:
                frontier = set(vals)
                while frontier:
                    new = set()
                    for op in unary:
                        for v in frontier:
                            w = op.fn(v)
                            if w <= cap and w not in vals:
                                new.add(w)
                    vals |= new
                    frontier = new
            W[(i, j)] = frozenset(vals)
    return W[(0, k - 1)] if k else frozenset()


def fr_member(x: int, b: StreamSeq, tail: int, sig: Signature) -> bool:
    """Decide ``x ∈ FR(b - tail)`` for inflationary ``sig`` and strictly increasing ``b``."""
    if x < 0:
        return False
    cap = 1
    while cap < x:
        cap *= 2
    return x in fr_values_upto(b, tail, sig, cap)


# -- diagonalization ---------------------------------------------------------------------------


def shift_witness(k: int) -> Callable[[int], Block]:
    """Witness stream for ``a - k ≤ a``: entry j is entry j+k of ``a``."""
    return lambda j: Block((j + k,), IDENTITY)


@dataclass
class Stage:
    """One stage of a diagonal construction.

    ``witness`` maps an entry index of this stage to the block of the previous
    stage it is built from; stage 0 has none.
    """

    seq: StreamSeq
    witness: Callable[[int], Block] | Sequence[Block] | None = None

    def block(self, j: int) -> Block:
        if callable(self.witness):
            return self.witness(j)
        if j >= len(self.witness):
            raise PrefixTooShort(j, f"need longer prefix: stage witness has no block for entry {j}")
        return self.witness[j]


@dataclass
class DiagonalResult:
    seq: tuple
    witnesses: dict = field(default_factory=dict)
    consulted: dict = field(default_factory=dict)


def diagonalize(stages: Sequence[Stage], length: int, sig: Signature | None = None) -> DiagonalResult:
    """Build ``b`` with ``⟨b(n), ..., b(length-1)⟩ ⊴ stage n`` for every ``n < length``.

    Entry ``n`` comes from stage ``min(n, last)`` and is the first entry whose
    block, traced back through the stage witnesses, lies beyond every block
    already consumed in every earlier stage.
    """
    if not stages:
        raise InputError("diagonalize needs at least one stage")
    stages = [st if isinstance(st.seq, StreamSeq) else Stage(StreamSeq.finite(st.seq), st.witness)
              for st in stages]
    last = len(stages) - 1
    consumed = [-1] * len(stages)
    checked: dict = {}
    traces = []
    out = []

    def block_of(m, j):
        key = (m, j)
        if key not in checked:
            blk = stages[m].block(j)
            prev = stages[m - 1].seq
            value = term_eval(blk.term, [prev.at(i) for i in blk.indices])
            if value != stages[m].seq.at(j):
                raise InputError(f"stage {m} entry {j} is not certified by its witness block")
            if j > 0 and (m, j - 1) in checked and checked[(m, j - 1)].indices[-1] >= blk.indices[0]:
                raise InputError(f"stage {m} witness blocks are not increasing at entry {j}")
            checked[key] = blk
        return checked[key]

    def trace(s, j):
        tr = {s: ((j,), IDENTITY)}
        idx, term = (j,), IDENTITY
        for m in range(s, 0, -1):
            blocks = [block_of(m, i) for i in idx]
            idx = tuple(i for blk in blocks for i in blk.indices)
            term = compose(term, [blk.term for blk in blocks])
            tr[m - 1] = (idx, term)
        return tr

    for n in range(length):
        s = min(n, last)
        j = consumed[s] + 1
        while True:
            if not stages[s].seq.has(j):
                raise PrefixTooShort(j, f"need longer prefix: stage {s} has no entry {j}")
            tr = trace(s, j)
            if all(tr[m][0][0] > consumed[m] for m in range(s)):
                break
            j += 1
        out.append(stages[s].seq.at(j))
        for m in range(s + 1):
            consumed[m] = tr[m][0][-1]
        traces.append(tr)

    witnesses = {}
    for m in range(min(length, len(stages))):
        witnesses[m] = ReductionWitness(tuple(Block(*traces[n][m]) for n in range(m, length)))
    result = DiagonalResult(tuple(out), witnesses, {m: consumed[m] + 1 for m in range(len(stages))})
    if sig is not None:
        for m, w in witnesses.items():
            prefix = stages[m].seq.take(result.consulted[m])
            if not check_witness(result.seq[m:], prefix, w, sig):
                raise InputError(f"internal: diagonal witness for stage {m} does not verify")
    return result
