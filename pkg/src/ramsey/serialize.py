"""JSON codecs for the library's objects and the built-in names used by the CLI."""

from __future__ import annotations

import json
import os
import re

from .core_algebra import BUILTINS, IDENTITY, Apply, OpDef, Signature, builtin, table, term_str
from .errors import InputError, Unknown
from .reduction import RULES, ReductionWitness, StreamSeq, naturals, powers2
from .search import Coloring, constant, indicator, mod_coloring, parity
from .set_algebra import Compl, Cyc, Fib, Gen, Inter, Lit, Pre, SetTerm, SymSet, Union

SCHEMA_VERSION = "1"


def load_arg(value: str):
    """Parse a CLI value: a path to a JSON file, inline JSON, or a bare name."""
    if value.startswith("@"):
        value = value[1:]
    if os.path.isfile(value):
        with open(value, encoding="utf-8") as fh:
            return json.load(fh)
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def dumps(obj, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, default=_default)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=_default)


def _default(o):
    if isinstance(o, Unknown):
        return o.to_json()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serializable: {o!r}")


# -- operations and signatures -------------------------------------------------------------


def op_from_json(obj) -> OpDef:
    """A built-in name, or ``{name, arity, kind, params, flags}``."""
    if isinstance(obj, str):
        return builtin(obj)
    if not isinstance(obj, dict):
        raise InputError(f"cannot read an operation from {obj!r}")
    kind = obj.get("kind", obj.get("name"))
    params = {**obj.get("params", {}), **{k: v for k, v in obj.items() if k in ("entries", "default", "fiber_bound")}}
    if kind == "table":
        entries = {tuple(k): v for k, v in params.get("entries", [])}
        return table(obj.get("name", "table"), int(obj.get("arity", 2)), entries, params.get("default", "plus"),
                     obj.get("flags", ()), params.get("fiber_bound"))
    if kind in BUILTINS:
        op = builtin(kind)
        if "arity" in obj and int(obj["arity"]) != op.arity:
            raise InputError(f"built-in {kind!r} has arity {op.arity}, not {obj['arity']}")
        return op
    raise InputError(f"unknown operation kind {kind!r}")


def op_to_json(op: OpDef):
    if op.kind in BUILTINS:
        return op.name
    params = {k: v for k, v in op.params.items() if k != "max_value"}
    return {"name": op.name, "arity": op.arity, "kind": op.kind, "params": params, "flags": sorted(op.flags)}


def orderly_to_json(t):
    """``["id"]`` for the identity, ``[opname, child, ...]`` otherwise."""
    if t == IDENTITY:
        return ["id"]
    return [t.op.name] + [orderly_to_json(c) for c in t.children]


def orderly_from_json(obj, sig: Signature):
    if not isinstance(obj, list) or not obj:
        raise InputError(f"a term is a non-empty JSON array, got {obj!r}")
    if obj == ["id"]:
        return IDENTITY
    return Apply(sig.get(obj[0]), tuple(orderly_from_json(c, sig) for c in obj[1:]))


def sig_from_json(obj) -> Signature:
    if isinstance(obj, str):
        return Signature(tuple(builtin(n) for n in obj.split(",") if n))
    if isinstance(obj, dict) and "ops" in obj:
        obj = obj["ops"]
    if isinstance(obj, list):
        return Signature(tuple(op_from_json(o) for o in obj))
    raise InputError(f"cannot read a signature from {obj!r}")


def sig_to_json(sig: Signature):
    return [op_to_json(op) for op in sig.ops]


# -- streams -----------------------------------------------------------------------------------

_NAMED_SEQS = {"powers2": powers2, "naturals": naturals}


def seq_from_json(obj) -> StreamSeq:
    if isinstance(obj, str):
        if obj in _NAMED_SEQS:
            return _NAMED_SEQS[obj]()
        raise InputError(f"unknown sequence name {obj!r}; known: {sorted(_NAMED_SEQS)}")
    if isinstance(obj, list):
        return StreamSeq.finite([int(x) for x in obj])
    if isinstance(obj, dict):
        rule = None
        if obj.get("rule") is not None:
            rule_obj = dict(obj["rule"])
            kind = rule_obj.pop("kind", None)
            if kind not in RULES:
                raise InputError(f"unknown rule kind {kind!r}; known: {sorted(RULES)}")
            try:
                rule = RULES[kind](**rule_obj.get("params", rule_obj))
            except TypeError as exc:
                raise InputError(f"bad parameters for rule {kind!r}: {exc}") from None
        return StreamSeq(tuple(obj.get("prefix", ())), rule, int(obj.get("offset", 0)))
    raise InputError(f"cannot read a sequence from {obj!r}")


def seq_to_json(s: StreamSeq):
    if s.rule is None:
        return list(s.prefix)
    return {"prefix": list(s.prefix), "rule": {"kind": s.rule.kind, "params": dict(s.rule.params)},
            "offset": s.offset}


# -- colorings ----------------------------------------------------------------------------------


def coloring_from_json(obj, bound: int) -> Coloring:
    target = None
    if isinstance(obj, dict):
        target = obj.get("target")
        kind = obj.get("kind")
    else:
        kind = obj
    if kind == "parity":
        col = parity(bound)
    elif kind == "constant":
        col = constant(bound)
    elif isinstance(kind, str) and re.fullmatch(r"mod\d+", kind):
        col = mod_coloring(int(kind[3:]), bound)
    elif kind == "mod":
        col = mod_coloring(int(obj["k"]), bound)
    elif kind == "classes":
        return indicator(obj["members"], bound, target)
    elif kind == "table":
        colors = list(obj["colors"])
        if len(colors) <= bound:
            raise InputError(f"color table has {len(colors)} entries but the bound is {bound}")
        return Coloring(bound, tuple(colors[:bound + 1]), "table", target)
    else:
        raise InputError(f"unknown coloring {obj!r}")
    if target is not None:
        col = Coloring(col.bound, col.table, col.name, target)
    return col


# -- sets ----------------------------------------------------------------------------------


def symset_from_json(obj) -> SymSet:
    try:
        mode = obj["mode"]
        if mode not in ("finite", "cofinite"):
            raise InputError(f"unknown SymSet mode {mode!r}")
        return SymSet(int(obj["dim"]), mode == "cofinite", tuple(tuple(t) for t in obj.get("support", ())))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed SymSet JSON: {obj!r}") from exc


def symset_to_json(X: SymSet) -> dict:
    return {"dim": X.dim, "mode": X.mode, "support": [list(t) for t in X.support]}


def term_from_json(obj) -> SetTerm:
    if not isinstance(obj, dict) or len(obj) != 1:
        if isinstance(obj, dict) and "gen" in obj:
            return Gen(obj["gen"], int(obj.get("dim", 1)))
        raise InputError(f"a set term is a single-key object, got {obj!r}")
    (tag, body), = obj.items()
    if tag == "lit":
        return Lit(symset_from_json(body))
    if tag == "gen":
        return Gen(body, 1)
    if tag in ("union", "inter"):
        left, right = (term_from_json(x) for x in body)
        return (Union if tag == "union" else Inter)(left, right)
    if tag == "compl":
        return Compl(term_from_json(body))
    if tag == "cyc":
        return Cyc(term_from_json(body))
    if tag == "fib":
        return Fib(int(body["c"]), term_from_json(body["arg"]))
    if tag == "pre":
        return Pre(op_from_json(body["op"]), int(body["n"]), term_from_json(body["arg"]))
    raise InputError(f"unknown set term tag {tag!r}")


def term_to_json(T: SetTerm):
    if isinstance(T, Lit):
        return {"lit": symset_to_json(T.value)}
    if isinstance(T, Gen):
        return {"gen": T.id, "dim": T.dim}
    if isinstance(T, Union):
        return {"union": [term_to_json(T.left), term_to_json(T.right)]}
    if isinstance(T, Inter):
        return {"inter": [term_to_json(T.left), term_to_json(T.right)]}
    if isinstance(T, Compl):
        return {"compl": term_to_json(T.arg)}
    if isinstance(T, Cyc):
        return {"cyc": term_to_json(T.arg)}
    if isinstance(T, Fib):
        return {"fib": {"c": T.c, "arg": term_to_json(T.arg)}}
    if isinstance(T, Pre):
        return {"pre": {"op": op_to_json(T.op), "n": T.n, "arg": term_to_json(T.arg)}}
    raise InputError(f"not a set term: {T!r}")


def parse_range_set(text: str) -> set[int]:
    """``"0..9,15"`` -> {0, ..., 9, 15}."""
    out = set()
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            out.update(range(int(lo), int(hi) + 1))
        else:
            out.add(int(part))
    if any(x < 0 for x in out):
        raise InputError("set elements must be natural numbers")
    return out


def witness_to_json(w: ReductionWitness) -> list:
    return [{"indices": list(b.indices), "term": orderly_to_json(b.term), "text": term_str(b.term)}
            for b in w.blocks]

