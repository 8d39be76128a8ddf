"""Command-line front end.  Every command prints one JSON document on stdout.

Exit codes: 0 for a definitive answer, 1 for Unknown or an exhausted budget,
2 for malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .errors import BudgetExhausted, Inconclusive, InputError, RamseyError, is_unknown
from .galvin import FRChainField, build_fr_field, fr_chain_member, galvin_construct
from .reduction import find_reduction, fr_enumerate
from .search import BUDGET, SearchBudget, probe_degeneracy, search_iterated, search_monochromatic
from .serialize import (
    SCHEMA_VERSION,
    coloring_from_json,
    dumps,
    load_arg,
    op_from_json,
    parse_range_set,
    seq_from_json,
    sig_from_json,
    symset_from_json,
    term_to_json,
    witness_to_json,
)
from .set_algebra import (
    ClosureFamily,
    FiniteCofiniteFamily,
    GeneratorOracle,
    RestrictedFamily,
    SamplingPlan,
    SymSet,
    check_admissible_sampled,
    closure_enumerate,
    symset_member,
)
from .ultrafilter import (
    COFINITE,
    Derivation,
    FRChainUF,
    Principal,
    TensorProduct,
    pushforward,
    tensor_member,
    uf_member,
    uf_to_json,
)


class _Outcome:
    def __init__(self, payload: dict, code: int = 0):
        self.payload = payload
        self.code = code


def _prefix(seq, length):
    return seq.take(length) if seq.is_infinite else seq.prefix


def _budget(args):
    return SearchBudget(args.length, args.bound, args.depth, args.node_limit, args.horizon)


# -- commands ----------------------------------------------------------------------------------


def cmd_fr(args):
    seq = seq_from_json(load_arg(args.seq))
    sig = sig_from_json(load_arg(args.sig))
    values = sorted(fr_enumerate(_prefix(seq, args.length), sig, args.depth))
    return _Outcome({"fr": values})


def cmd_reduction(args):
    a = seq_from_json(load_arg(args.a))
    b = seq_from_json(load_arg(args.b))
    sig = sig_from_json(load_arg(args.sig))
    w = find_reduction(_prefix(a, args.length), _prefix(b, args.length), sig, args.depth)
    out = {"reduces": w is not None}
    if w is not None:
        out["witness"] = witness_to_json(w)
    return _Outcome(out)


def _search_payload(r):
    out = {"status": r.status, "witness": list(r.witness) if r.witness else None,
           "color": r.color, "verified": r.verified, "nodes": r.nodes}
    if r.reduction is not None:
        out["reduction"] = witness_to_json(r.reduction)
    if r.fr_size is not None:
        out["fr_size"] = r.fr_size
    return out


def cmd_search(args):
    if args.iterated:
        return cmd_iterated(args)
    sig = sig_from_json(load_arg(args.sig))
    seed = seq_from_json(load_arg(args.seed_seq))
    col = coloring_from_json(load_arg(args.coloring), args.bound)
    r = search_monochromatic(sig, seed, col, _budget(args), args.jobs)
    return _Outcome(_search_payload(r), 1 if r.status == BUDGET else 0)


def cmd_iterated(args):
    sig = sig_from_json(load_arg(args.sig))
    seed = seq_from_json(load_arg(args.seed_seq))
    cols_json = load_arg(args.iterated or args.colorings)
    if not isinstance(cols_json, list):
        raise InputError("iterated colorings must be a JSON list")
    cols = [coloring_from_json(c, args.bound) for c in cols_json]
    r = search_iterated(sig, seed, cols, _budget(args), jobs=args.jobs)
    out = {"status": r.status, "witness": list(r.witness) if r.witness else None, "colors": r.colors,
           "stages": r.stages, "verified": r.verified, "failed_stage": r.failed_stage, "detail": r.detail}
    return _Outcome(out, 1 if r.status == BUDGET else 0)


def cmd_probe(args):
    sig = sig_from_json(load_arg(args.sig))
    seed = seq_from_json(load_arg(args.seed_seq))
    r = probe_degeneracy(sig, seed, _budget(args))
    out = _search_payload(r)
    out["cardinality"] = r.fr_size
    out["exact"] = r.detail.get("exact", False)
    return _Outcome(out, 0 if r.found else 1)


def _generators(args, sig):
    oracles = {}
    chain = None
    if args.chain:
        chain = FRChainField(seq_from_json(load_arg(args.chain)), sig, args.chain_depth)
        oracles.update(chain.oracles)
    if args.generators:
        for g in load_arg(args.generators):
            gid = g["id"]
            if "set" in g:
                X = symset_from_json(g["set"])
                oracles[gid] = GeneratorOracle(gid, X.dim, lambda t, X=X: symset_member(t, X), ("symset",))
            elif "mod" in g:
                k, r = int(g["mod"]), int(g.get("residue", 0))
                oracles[gid] = GeneratorOracle(gid, 1, lambda t, k=k, r=r: t[0] % k == r, ("mod", k, r))
            else:
                raise InputError(f"generator {gid!r} needs a 'set' or 'mod' field")
    return oracles, chain


def cmd_closure(args):
    sig = sig_from_json(load_arg(args.sig))
    oracles, _ = _generators(args, sig)
    dims = sorted(int(d) for d in args.dims.split(","))
    terms = closure_enumerate(oracles, sig, args.depth, dims, singleton_bound=args.singleton_bound)
    shown = terms if args.limit is None else terms[:args.limit]
    return _Outcome({"count": len(terms), "terms": [{"text": repr(T), "dim": T.dim, "term": term_to_json(T)}
                                                    for T in shown]})


def cmd_admissible(args):
    sig = sig_from_json(load_arg(args.sig))
    plan = SamplingPlan(args.entry_bound, args.samples, args.seed)
    if args.family == "finite-cofinite":
        family = FiniteCofiniteFamily(sig, seed=args.seed)
    else:
        oracles, _ = _generators(args, sig)
        family = ClosureFamily(oracles, sig, args.depth, dims=(1, 2))
    if args.exclude:
        family = RestrictedFamily(family, args.exclude.split(","))
    report = check_admissible_sampled(family, plan)
    return _Outcome(report.to_json())


def _eval_uf(expr, trace):
    if not isinstance(expr, dict) or len(expr) != 1:
        raise InputError(f"ultrafilter expressions are single-key objects, got {expr!r}")
    (tag, body), = expr.items()
    if tag == "principal":
        return Principal(int(body))
    if tag == "cofinite":
        return COFINITE
    if tag == "tensor":
        return TensorProduct(tuple(_eval_uf(e, trace) for e in body))
    if tag == "pushforward":
        op = op_from_json(body["op"])
        factors = [_eval_uf(e, trace) for e in body["args"]]
        return pushforward(op, factors, trace=trace)
    if tag == "member":
        U = _eval_uf(body["uf"], trace)
        X = symset_from_json(body["set"])
        v = tensor_member(U, X) if isinstance(U, TensorProduct) else uf_member(U, X)
        trace.add(f"{X!r} ∈ {U!r}: {v}")
        return v
    raise InputError(f"unknown ultrafilter expression tag {tag!r}")


def cmd_uf(args):
    trace = Derivation()
    value = _eval_uf(load_arg(args.expr), trace)
    if isinstance(value, bool):
        out = {"member": value}
    elif isinstance(value, TensorProduct):
        out = {"kind": "tensor", "factors": [uf_to_json(U) for U in value.factors]}
    else:
        out = uf_to_json(value)
    out["trace"] = trace.steps
    return _Outcome(out)


def _parse_uf(text, args):
    if text == "cofinite":
        return COFINITE
    if text.startswith("principal:"):
        return Principal(int(text.split(":", 1)[1]))
    if text == "fr-chain":
        sig = sig_from_json(load_arg(args.sig))
        return FRChainUF(FRChainField(seq_from_json(load_arg(args.seq)), sig, args.chain_depth))
    raise InputError(f"unknown ultrafilter {text!r}; use cofinite, principal:N or fr-chain")


def cmd_galvin(args):
    U = _parse_uf(args.uf, args)
    op = op_from_json(load_arg(args.op))
    if args.set:
        X = symset_from_json(load_arg(args.set))
    elif args.chain_index is not None:
        X = U.field.gen(args.chain_index)
    else:
        X = SymSet.cofinite_of(1, [(x,) for x in parse_range_set(args.avoid or "")])
    r = galvin_construct(U, op, X, args.length, args.scan_cap)
    return _Outcome(r.to_json())


def cmd_frfield(args):
    seq = seq_from_json(load_arg(args.seq))
    sig = sig_from_json(load_arg(args.sig))
    plan = SamplingPlan(args.entry_bound, args.samples, args.seed)
    family, U, report = build_fr_field(seq, sig, args.depth, plan=plan,
                                       tails=args.tails if args.check else 0, seed=args.seed)
    out = {"family": family.describe(), "ultrafilter": uf_to_json(U)}
    code = 0
    if args.check:
        out["report"] = report.to_json()
        sr = report.strongly_reducible
        if sr is not None and is_unknown(sr["verdict"]):
            code = 1
    return _Outcome(out, code)


def cmd_member(args):
    sig = sig_from_json(load_arg(args.sig))
    F = FRChainField(seq_from_json(load_arg(args.seq)), sig, args.chain_depth)
    from .serialize import term_from_json

    v = fr_chain_member(F, term_from_json(load_arg(args.set)))
    return _Outcome({"member": v}, 1 if is_unknown(v) else 0)


# -- parser ------------------------------------------------------------------------------------------


def _default_seed():
    try:
        return int(os.environ.get("RAMSEY_SEED", "0"))
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed(), help="seed for randomized sampling")
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")
    common.add_argument("--manifest", help="write a run manifest to this path")
    common.add_argument("--deterministic", action="store_true", help="accepted; all runs are deterministic")
    common.add_argument("--jobs", type=int, default=1, help="accepted; work runs in one process")

    p = argparse.ArgumentParser(prog="ramsey", description="Finite-scale Ramsey algebra toolkit.")
    p.add_argument("--version", action="version", version=f"ramsey {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(fn=fn)
        return sp

    def search_opts(sp, length=4, bound=300):
        sp.add_argument("--sig", default="plus")
        sp.add_argument("--seed-seq", "--start", dest="seed_seq", default="naturals",
                        help="stream to reduce (name, JSON list or JSON object)")
        sp.add_argument("--length", type=int, default=length)
        sp.add_argument("--bound", type=int, default=bound)
        sp.add_argument("--depth", type=int, default=2, help="term depth for blocks of the seed")
        sp.add_argument("--node-limit", type=int, default=200_000)
        sp.add_argument("--horizon", type=int, default=None)

    sp = add("fr", cmd_fr, "finite reductions of a sequence")
    sp.add_argument("--seq", required=True)
    sp.add_argument("--sig", default="plus")
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--length", type=int, default=8, help="prefix length for infinite streams")

    sp = add("reduction", cmd_reduction, "decide a ⊴ b for finite sequences")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--sig", default="plus")
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--length", type=int, default=8)

    sp = add("search", cmd_search, "monochromatic FR search")
    search_opts(sp)
    sp.add_argument("--coloring", default="parity")
    sp.add_argument("--iterated", help="JSON list of colorings, one per tail")

    sp = add("iterated-search", cmd_iterated, "stagewise search over several colorings")
    search_opts(sp)
    sp.add_argument("--colorings", required=True)
    sp.set_defaults(iterated=None)

    sp = add("probe-degeneracy", cmd_probe, "reduction with the fewest FR values")
    search_opts(sp, length=4, bound=256)

    for name, fn, text in (("closure", cmd_closure, "bounded closure of set terms"),
                           ("admissible-check", cmd_admissible, "sampled admissibility check")):
        sp = add(name, fn, text)
        sp.add_argument("--sig", default="plus")
        sp.add_argument("--generators", help="JSON list of {id, set} or {id, mod, residue}")
        sp.add_argument("--chain", help="stream whose FR tails become generators")
        sp.add_argument("--chain-depth", type=int, default=3)
        sp.add_argument("--depth", type=int, default=1)
        if name == "closure":
            sp.add_argument("--dims", default="1")
            sp.add_argument("--singleton-bound", type=int, default=1)
            sp.add_argument("--limit", type=int, default=None)
        else:
            sp.add_argument("--family", choices=["finite-cofinite", "closure"], default="finite-cofinite")
            sp.add_argument("--exclude", help="constructors to remove, e.g. cyc")
            sp.add_argument("--samples", type=int, default=512)
            sp.add_argument("--entry-bound", type=int, default=16)

    uf = sub.add_parser("uf", help="ultrafilter calculus")
    uf_sub = uf.add_subparsers(dest="uf_command", required=True)
    sp = uf_sub.add_parser("eval", parents=[common], help="evaluate an ultrafilter expression")
    sp.add_argument("--expr", required=True)
    sp.set_defaults(fn=cmd_uf)
    sp = uf_sub.add_parser("chain-member", parents=[common], help="membership in an FR-chain ultrafilter")
    sp.add_argument("--seq", default="powers2")
    sp.add_argument("--sig", default="plus")
    sp.add_argument("--chain-depth", type=int, default=3)
    sp.add_argument("--set", required=True, help="set term JSON over generators G0..Gd")
    sp.set_defaults(fn=cmd_member)

    sp = add("galvin", cmd_galvin, "homogeneous sequence from an idempotent ultrafilter")
    sp.add_argument("--uf", default="cofinite")
    sp.add_argument("--op", default="plus")
    sp.add_argument("--avoid", help="finite set to avoid, e.g. 0..9")
    sp.add_argument("--set", help="SymSet JSON of dim 1")
    sp.add_argument("--chain-index", type=int, default=None)
    sp.add_argument("--seq", default="powers2")
    sp.add_argument("--sig", default="plus")
    sp.add_argument("--chain-depth", type=int, default=3)
    sp.add_argument("--length", type=int, default=8)
    sp.add_argument("--scan-cap", type=int, default=10 ** 6)

    sp = add("frfield", cmd_frfield, "FR-chain field and its ultrafilter")
    sp.add_argument("--seq", default="powers2")
    sp.add_argument("--sig", default="plus")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--check", action="store_true")
    sp.add_argument("--tails", type=int, default=3)
    sp.add_argument("--samples", type=int, default=512)
    sp.add_argument("--entry-bound", type=int, default=16)
    return p


def _manifest(argv, args, payload_text):
    inputs = {}
    for key, value in sorted(vars(args).items()):
        if isinstance(value, str) and key not in ("manifest",):
            resolved = load_arg(value)
            inputs[key] = hashlib.sha256(json.dumps(resolved, sort_keys=True).encode()).hexdigest()
    argv = [a for a in argv if not a.startswith("--manifest=")]
    if "--manifest" in argv:
        i = argv.index("--manifest")
        del argv[i:i + 2]
    return {"version": SCHEMA_VERSION, "library_version": __version__, "command": argv,
            "inputs": inputs, "seed": args.seed,
            "results_digest": hashlib.sha256(payload_text.encode()).hexdigest()}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outcome = args.fn(args)
    except (BudgetExhausted, Inconclusive) as exc:
        outcome = _Outcome({"error": str(exc), "kind": type(exc).__name__, "bound": exc.bound}, 1)
    except (InputError, ValueError, KeyError, TypeError) as exc:
        print(f"ramsey: error: {exc}", file=sys.stderr)
        outcome = _Outcome({"error": str(exc), "kind": "InputError"}, 2)
    except RamseyError as exc:
        outcome = _Outcome({"error": str(exc), "kind": type(exc).__name__}, 2)
    payload = {"version": SCHEMA_VERSION, **outcome.payload}
    text = dumps(payload, args.pretty)
    print(text)
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(dumps(_manifest(argv, args, text), True) + "\n")
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
