"""Bounded searches for reductions with monochromatic FR sets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .core_algebra import INFLATIONARY, Signature, enumerate_orderly_terms, term_eval
from .errors import InputError, PrefixTooShort
from .reduction import (
    Block,
    ReductionWitness,
    Stage,
    StreamSeq,
    block_values,
    check_witness,
    default_depth,
    diagonalize,
    first_term,
    fr_enumerate,
    max_block_length,
)

FOUND = "found"
EXHAUSTED = "exhausted"
BUDGET = "budget"


@dataclass(frozen=True)
class Coloring:
    """A finite coloring of ``[0, bound]``.

    ``target`` optionally pins the color class a search must land in; without
    it any class will do.
    """

    bound: int
    table: tuple
    name: str = "table"
    target: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(c) for c in self.table))
        if len(self.table) != self.bound + 1:
            raise InputError(f"coloring must cover [0, {self.bound}]: got {len(self.table)} entries")
        used = sorted(set(self.table))
        if used and used != list(range(len(used))):
            raise InputError(f"color ids must be contiguous from 0, got {used}")
        if self.target is not None and self.target not in used:
            raise InputError(f"target color {self.target} is not used by the coloring")

    @classmethod
    def from_fn(cls, bound: int, fn: Callable[[int], int], name: str = "custom", target=None) -> "Coloring":
        return cls(bound, tuple(fn(v) for v in range(bound + 1)), name, target)

    @property
    def palette(self) -> int:
        return max(self.table) + 1 if self.table else 0

    def color_of(self, v: int) -> int:
        if not 0 <= v <= self.bound:
            raise InputError(f"value {v} is outside the colored range [0, {self.bound}]")
        return self.table[v]


def parity(bound: int) -> Coloring:
    return Coloring.from_fn(bound, lambda v: v % 2, "parity")


def mod_coloring(k: int, bound: int) -> Coloring:
    if k < 1:
        raise InputError("modulus must be positive")
    return Coloring.from_fn(bound, lambda v: v % k, f"mod{k}")


def constant(bound: int) -> Coloring:
    return Coloring.from_fn(bound, lambda v: 0, "constant")


def indicator(members, bound: int, target: int | None = None) -> Coloring:
    """Color 0 on ``members``, color 1 elsewhere (just one class if either is empty)."""
    members = set(members)
    inside = [v in members for v in range(bound + 1)]
    if all(inside) or not any(inside):
        return Coloring(bound, (0,) * (bound + 1), "indicator", 0 if target is not None else None)
    return Coloring.from_fn(bound, lambda v: 0 if v in members else 1, "indicator", target)


@dataclass(frozen=True)
class SearchBudget:
    """``horizon`` caps how many seed entries are consulted; ``None`` picks a default."""

    seq_length: int
    value_bound: int
    term_depth: int = 2
    node_limit: int = 200_000
    horizon: int | None = None

    def __post_init__(self):
        for name in ("seq_length", "value_bound", "term_depth", "node_limit"):
            if getattr(self, name) < 1:
                raise InputError(f"budget field {name} must be positive")
        if self.horizon is not None and self.horizon < 1:
            raise InputError("budget horizon must be positive")


@dataclass
class SearchResult:
    status: str
    witness: tuple | None = None
    color: int | None = None
    reduction: ReductionWitness | None = None
    nodes: int = 0
    verified: bool = False
    fr_size: int | None = None
    detail: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND


# -- candidate generation ----------------------------------------------------------------


def _horizon(sig: Signature, seed: StreamSeq, budget: SearchBudget) -> tuple:
    """Seed entries the search may touch."""
    limit = budget.horizon
    capped = sig.all_have(INFLATIONARY)
    if limit is None:
        limit = budget.value_bound + 1 if capped else min(4 * budget.seq_length, 16)
    out = []
    for i in range(limit):
        if not seed.has(i):
            break
        v = seed.at(i)
        if capped and v > budget.value_bound:
            if seed.is_infinite and out and v > out[-1]:
                break
            continue
        out.append(v)
    return tuple(out)


class _Candidates:
    """Per start position: each reachable value with the earliest block realizing it.

    Keeping only the earliest-ending block per value loses nothing: the later
    search only depends on where the block ends.
    """

    def __init__(self, entries, sig, depth, cap):
        self.entries = entries
        self.sig = sig
        self.depth = depth
        self.cap = cap
        self.longest = min(len(entries), max_block_length(sig, depth))

    @lru_cache(maxsize=None)
    def at(self, p: int) -> tuple:
        best = {}
        for end in range(p, len(self.entries)):
            for k in range(0, self.longest):
                for head in itertools.combinations(range(p, end), k):
                    idx = head + (end,)
                    vals = tuple(self.entries[i] for i in idx)
                    for v in block_values(vals, self.sig, self.depth, self.cap):
                        if v not in best:
                            best[v] = idx
        return tuple(sorted(((v, idx) for v, idx in best.items()), key=lambda c: (c[0], c[1][-1], c[1])))


def _fr(b: tuple, sig: Signature) -> frozenset:
    return fr_enumerate(b, sig, default_depth(len(b)))


def brute_force_fr(b: Sequence[int], sig: Signature, depth: int | None = None) -> frozenset:
    """FR by exhausting index subsets and enumerated terms; independent of the DP."""
    b = tuple(b)
    depth = default_depth(len(b)) if depth is None else depth
    out = set()
    for k in range(1, len(b) + 1):
        terms = enumerate_orderly_terms(sig, k, depth)
        for idx in itertools.combinations(range(len(b)), k):
            args = [b[i] for i in idx]
            out.update(term_eval(t, args) for t in terms)
    return frozenset(out)


def verify_monochromatic(b, sig: Signature, coloring: Coloring) -> int | None:
    """The common color of the brute-force FR of ``b``, or None if it is not monochromatic."""
    values = brute_force_fr(b, sig)
    if any(v > coloring.bound or v < 0 for v in values):
        return None
    colors = {coloring.color_of(v) for v in values}
    return colors.pop() if len(colors) == 1 else None


def _witness_for(b, blocks, entries, sig, depth):
    return ReductionWitness(tuple(
        Block(idx, first_term([entries[i] for i in idx], v, sig, depth)) for v, idx in zip(b, blocks)))


# -- monochromatic search ------------------------------------------------------------------


def search_monochromatic(sig: Signature, seed: StreamSeq, coloring: Coloring,
                         budget: SearchBudget, jobs: int = 1) -> SearchResult:
    """Depth-first search for ``b ⊴ seed`` of length L whose FR is one color and <= M.

    Candidates for each entry are ordered by value, then by where their block
    ends.  ``exhausted`` means the bounded tree was fully explored.
    """
    if coloring.bound < budget.value_bound:
        raise InputError(f"coloring covers [0, {coloring.bound}] but the value bound is {budget.value_bound}")
    if isinstance(seed, (list, tuple)):
        seed = StreamSeq.finite(seed)
    entries = _horizon(sig, seed, budget)
    cap = budget.value_bound if sig.all_have(INFLATIONARY) else None
    cands = _Candidates(entries, sig, budget.term_depth, cap)
    L, M = budget.seq_length, budget.value_bound
    nodes = 0
    failed: dict = {}

    def fits(b):
        fr = _fr(b, sig)
        if any(v > M or v < 0 for v in fr):
            return None
        colors = {coloring.color_of(v) for v in fr}
        if len(colors) != 1:
            return None
        color = colors.pop()
        if coloring.target is not None and color != coloring.target:
            return None
        return color

    def dfs(b, blocks, p):
        nonlocal nodes
        if len(b) == L:
            return b, blocks
        if failed.get(b, len(entries) + 1) <= p:
            return None
        for v, idx in cands.at(p):
            if len(entries) - idx[-1] - 1 < L - len(b) - 1:
                continue
            nodes += 1
            if nodes > budget.node_limit:
                raise _OutOfNodes
            nb = b + (v,)
            if fits(nb) is None:
                continue
            got = dfs(nb, blocks + (idx,), idx[-1] + 1)
            if got is not None:
                return got
        failed[b] = min(p, failed.get(b, p))
        return None

    try:
        got = dfs((), (), 0)
    except _OutOfNodes:
        return SearchResult(BUDGET, nodes=nodes, detail={"horizon": len(entries)})
    if got is None:
        return SearchResult(EXHAUSTED, nodes=nodes, detail={"horizon": len(entries)})
    b, blocks = got
    w = _witness_for(b, blocks, entries, sig, budget.term_depth)
    color = verify_monochromatic(b, sig, coloring)
    if color is None or not check_witness(b, entries, w, sig):
        raise InputError("internal: search produced a witness that failed verification")
    return SearchResult(FOUND, b, color, w, nodes, True, len(brute_force_fr(b, sig)),
                        {"horizon": len(entries)})


class _OutOfNodes(Exception):
    pass


# -- iterated search -------------------------------------------------------------------------------


@dataclass
class IteratedResult:
    status: str
    witness: tuple | None = None
    colors: list = field(default_factory=list)
    stages: list = field(default_factory=list)
    verified: bool = False
    failed_stage: int | None = None
    detail: dict = field(default_factory=dict)


def check_tails(b, sig: Signature, colorings: Sequence[Coloring]) -> list:
    """Colors of FR(b - n) for each coloring n; ``None`` marks a failed tail."""
    out = []
    for n, col in enumerate(colorings):
        tail = tuple(b[n:])
        out.append(verify_monochromatic(tail, sig, col) if tail else None)
    return out


def search_iterated(sig: Signature, seed: StreamSeq, colorings: Sequence[Coloring],
                    budget: SearchBudget, max_slack: int = 6, jobs: int = 1) -> IteratedResult:
    """Find ``b`` of length L with FR(b - n) monochromatic for coloring n, n < k.

    Stage n searches inside stage n-1 with its first entry dropped, then the
    stages are diagonalized.  Stage lengths grow until the diagonal fits.
    """
    colorings = list(colorings)
    k = len(colorings)
    if k == 0:
        raise InputError("search_iterated needs at least one coloring")
    L = budget.seq_length
    if L < k:
        raise InputError(f"sequence length {L} is shorter than the number of colorings {k}")
    if isinstance(seed, (list, tuple)):
        seed = StreamSeq.finite(seed)
    if k == 1:
        r = search_monochromatic(sig, seed, colorings[0], budget)
        return IteratedResult(r.status, r.witness, [r.color] if r.found else [],
                              [list(r.witness)] if r.found else [], r.verified,
                              None if r.found else 0, {"nodes": r.nodes})

    # a stage that cannot be met even inside the raw seed is exhaustively impossible
    for n, col in enumerate(colorings):
        probe = search_monochromatic(sig, seed, col,
                                     SearchBudget(L - n, budget.value_bound, budget.term_depth,
                                                  budget.node_limit, budget.horizon))
        if probe.status == EXHAUSTED:
            return IteratedResult(EXHAUSTED, failed_stage=n, detail={"reason": "stage infeasible on the seed"})

    last_fail = None
    for slack in range(max_slack + 1):
        lengths = [L - n + slack * (k - 1 - n) for n in range(k)]
        stages = []
        current = seed
        ok = True
        for n, col in enumerate(colorings):
            sub = current if n == 0 else StreamSeq.finite(stages[-1].seq.prefix[1:])
            r = search_monochromatic(sig, sub, col,
                                     SearchBudget(lengths[n], budget.value_bound, budget.term_depth,
                                                  budget.node_limit,
                                                  budget.horizon if n == 0 else None))
            if not r.found:
                ok, last_fail = False, (n, r.status)
                break
            if n == 0:
                stages.append(Stage(StreamSeq.finite(r.witness)))
                base_prefix = _horizon(sig, seed, budget)
                stage0_w = r.reduction
            else:
                shifted = [Block(tuple(i + 1 for i in blk.indices), blk.term) for blk in r.reduction.blocks]
                stages.append(Stage(StreamSeq.finite(r.witness), shifted))
        if not ok:
            continue
        try:
            diag = diagonalize(stages, L, sig)
        except PrefixTooShort:
            last_fail = ("diagonal", "prefix")
            continue
        b = diag.seq
        colors = check_tails(b, sig, colorings)
        full = _compose_with_seed(diag.witnesses[0], stage0_w)
        verified = all(c is not None for c in colors) and check_witness(b, base_prefix, full, sig)
        if not verified:
            last_fail = ("verify", "tails")
            continue
        return IteratedResult(FOUND, b, colors, [list(st.seq.prefix) for st in stages], True,
                              detail={"slack": slack, "reduction": full.describe()})
    stage = last_fail[0] if last_fail and isinstance(last_fail[0], int) else None
    return IteratedResult(BUDGET, failed_stage=stage, detail={"last_failure": list(last_fail or [])})


def _compose_with_seed(w: ReductionWitness, base: ReductionWitness) -> ReductionWitness:
    """Turn a witness over stage 0 into one over the seed itself."""
    from .core_algebra import compose

    blocks = []
    for blk in w.blocks:
        parts = [base.blocks[i] for i in blk.indices]
        idx = tuple(i for part in parts for i in part.indices)
        blocks.append(Block(idx, compose(blk.term, [part.term for part in parts])))
    return ReductionWitness(tuple(blocks))


# -- degeneracy probe --------------------------------------------------------------------------------


def probe_degeneracy(sig: Signature, seed: StreamSeq, budget: SearchBudget) -> SearchResult:
    """Branch and bound for the reduction of length L with the fewest FR values.

    ``status`` is ``exhausted`` when the minimum is exact for the bounded tree
    and ``budget`` when the node limit cut the search short.
    """
    L = budget.seq_length
    if L < 2:
        raise InputError("probe_degeneracy needs seq_length >= 2")
    if isinstance(seed, (list, tuple)):
        seed = StreamSeq.finite(seed)
    entries = _horizon(sig, seed, budget)
    cap = budget.value_bound if sig.all_have(INFLATIONARY) else None
    cands = _Candidates(entries, sig, budget.term_depth, cap)
    best = [None, None, None]
    nodes = 0
    complete = True

    def dfs(b, blocks, p):
        nonlocal nodes, complete
        if len(b) == L:
            size = len(_fr(b, sig))
            if best[0] is None or size < best[0]:
                best[:] = [size, b, blocks]
            return
        for v, idx in cands.at(p):
            if len(entries) - idx[-1] - 1 < L - len(b) - 1:
                continue
            nodes += 1
            if nodes > budget.node_limit:
                complete = False
                raise _OutOfNodes
            nb = b + (v,)
            if best[0] is not None and len(_fr(nb, sig)) >= best[0]:
                continue
            dfs(nb, blocks + (idx,), idx[-1] + 1)
            if best[0] == 1:
                return

    try:
        dfs((), (), 0)
    except _OutOfNodes:
        pass
    if best[0] is None:
        return SearchResult(BUDGET if not complete else EXHAUSTED, nodes=nodes,
                            detail={"horizon": len(entries)})
    size, b, blocks = best
    w = _witness_for(b, blocks, entries, sig, budget.term_depth)
    if len(brute_force_fr(b, sig)) != size or not check_witness(b, entries, w, sig):
        raise InputError("internal: degeneracy witness failed verification")
    return SearchResult(FOUND, b, None, w, nodes, True, size,
                        {"horizon": len(entries), "exact": complete})
