"""Command-line front end.

Every command writes its evidence (proofs, models, reports) to files so the
result can be re-checked later with ``amalgam check`` or a model validator.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .algebra import (
    MAX_ALGEBRA_SIZE, MAX_MODAL_OP_SIZE, enumerate_heyting, enumerate_modal_ops,
    enumerate_ultrafilters, has_disjunction_property, is_boolean,
)
from .fileio import (
    FormatError, algebra_record, conservativity_to_text, kripke_to_text, model_from_text,
    model_to_text, proof_from_text, proof_to_text, sweep_to_text, write_text,
)
from .formula import ParseError, is_propositional, parse, to_text
from .ipc import HilbertIPCProof, Provable, ResourceLimitError, check_hilbert_ipc, ipc_prove
from .lkernel import check_lproof, embed_ipc
from .semlab import conservativity_check, conservativity_sweep, countermodel_search, sweep

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2
MAX_SWEEP_VARS, MAX_SWEEP_SIZE = 3, 8


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"amalgam: {msg}", file=sys.stderr)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _formulas(args):
    return [parse(t) for t in args.premise], parse(args.formula)


def cmd_prove_ipc(args) -> int:
    premises, goal = _formulas(args)
    for f in premises + [goal]:
        if not is_propositional(f):
            raise UsageError("prove-ipc takes propositional formulas only")
    res = ipc_prove(premises, goal)
    if isinstance(res, Provable):
        _emit(proof_to_text(res.proof), args.out)
        print(f"Provable: {to_text(goal)} ({len(res.proof.lines)} lines)", file=sys.stderr)
        return EXIT_OK
    _emit(kripke_to_text(res.model), args.out)
    print(f"Refutable: {to_text(goal)} ({res.model.size} worlds)", file=sys.stderr)
    return EXIT_NO


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def cmd_check(args) -> int:
    proof = proof_from_text(_read(args.file))
    if not proof.lines:
        _err("proof has no lines")
        return EXIT_NO
    goal = parse(args.goal) if args.goal else proof.lines[-1][0]
    if isinstance(proof, HilbertIPCProof):
        res = check_hilbert_ipc(proof, proof.premises, goal)
    else:
        res = check_lproof(proof, goal)
    if res:
        print(f"ok: {to_text(goal)}", file=sys.stderr)
        return EXIT_OK
    _err(f"rejected: {res}")
    return EXIT_NO


def cmd_embed(args) -> int:
    proof = proof_from_text(_read(args.file))
    if not isinstance(proof, HilbertIPCProof):
        raise UsageError("embed expects an IPC proof file")
    if not proof.lines:
        raise UsageError("empty proof")
    res = check_hilbert_ipc(proof, proof.premises, proof.conclusion)
    if not res:
        _err(f"input proof rejected: {res}")
        return EXIT_NO
    lp = embed_ipc(proof)
    _emit(proof_to_text(lp), args.out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    bound = args.max_algebra
    if bound > MAX_ALGEBRA_SIZE:
        raise UsageError(f"--max-algebra is limited to {MAX_ALGEBRA_SIZE}")
    if args.kind == "models" and bound > MAX_MODAL_OP_SIZE:
        raise UsageError(f"models are enumerated up to {MAX_MODAL_OP_SIZE} elements")
    lines = []
    for H in enumerate_heyting(bound):
        dp = has_disjunction_property(H)
        boolean = is_boolean(H)
        if (args.boolean and not boolean) or (args.dp and not dp):
            continue
        if args.kind == "algebras":
            lines.append(algebra_record(H, boolean=boolean, disjunction_property=dp))
            continue
        for U in enumerate_ultrafilters(H):
            members = sorted(U.members)
            if args.kind == "ultrafilters":
                lines.append(algebra_record(H, ultrafilter=members))
                continue
            for box in enumerate_modal_ops(H, U.members):
                lines.append(algebra_record(H, true=members, box=list(box)))
    _emit("".join(json.dumps(r) + "\n" for r in lines), args.out)
    print(f"{len(lines)} {args.kind}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not 0 <= args.vars <= MAX_SWEEP_VARS or not 0 <= args.size <= MAX_SWEEP_SIZE:
        raise UsageError(f"sweep bounds: --vars <= {MAX_SWEEP_VARS}, --size <= {MAX_SWEEP_SIZE}")
    report = sweep(args.vars, args.size, sample=args.sample, seed=args.seed)
    out = Path(args.out)
    text = sweep_to_text(report, out, seed=args.seed)
    write_text(out / "report.jsonl", text)
    c = report.counts
    print(f"{len(report.records)} formulas: {c['ipc']} IPC-provable, {c['cpc-only']} CPC-only, "
          f"{c['neither']} neither; {report.evidence_failures} evidence failures", file=sys.stderr)
    bad = report.evidence_failures + report.identity_failures + report.transfer_failures
    return EXIT_OK if bad == 0 else EXIT_NO


def cmd_countermodel(args) -> int:
    premises, goal = _formulas(args)
    if args.max_algebra > MAX_MODAL_OP_SIZE:
        raise UsageError(f"--max-algebra is limited to {MAX_MODAL_OP_SIZE} here")
    res = countermodel_search(premises, goal, args.max_algebra)
    if res.found:
        _emit(model_to_text(res.model, res.assignment), args.out)
        print(f"countermodel with {res.model.size} elements", file=sys.stderr)
        return EXIT_OK
    print(f"not found: {res.reason}", file=sys.stderr)
    return EXIT_NO


def cmd_conservativity(args) -> int:
    if args.formula is None:
        if not args.out:
            raise UsageError("a fragment run needs --out DIR")
        if not 0 <= args.vars <= MAX_SWEEP_VARS or not 0 <= args.size <= MAX_SWEEP_SIZE:
            raise UsageError(f"bounds: --vars <= {MAX_SWEEP_VARS}, --size <= {MAX_SWEEP_SIZE}")
        results = conservativity_sweep(args.vars, args.size)
        out = Path(args.out)
        write_text(out / "report.jsonl",
                   conservativity_to_text(results, args.vars, args.size, out, seed=args.seed))
        bad = sum(not r.ok for r in results)
        print(f"{len(results)} formulas, {bad} failures", file=sys.stderr)
        return EXIT_OK if bad == 0 else EXIT_NO
    f = parse(args.formula)
    if not is_propositional(f):
        raise UsageError("conservativity takes a propositional formula")
    res = conservativity_check(f)
    if res.proof is not None:
        _emit(proof_to_text(res.proof), args.out)
        what = "classical tautology, L proof"
    else:
        _emit(model_to_text(res.model, res.assignment), args.out)
        what = "not a tautology, two-element countermodel"
    print(f"{what}: {'ok' if res.ok else 'FAILED'}", file=sys.stderr)
    return EXIT_OK if res.ok else EXIT_NO


def cmd_validate_model(args) -> int:
    model, gamma = model_from_text(_read(args.file))
    err = model.algebra.validate()
    if err:
        _err(f"not a Heyting algebra: {err}")
        return EXIT_NO
    mc = model.validate()
    if not mc:
        _err(f"model condition {mc.condition} fails")
        return EXIT_NO
    print(f"ok: model with {model.size} elements", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="amalgam", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def formula_cmd(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("formula")
        p.add_argument("--premise", "-p", action="append", default=[])
        p.add_argument("--out", "-o")
        p.set_defaults(fn=fn)
        return p

    formula_cmd("prove-ipc", cmd_prove_ipc, "decide IPC derivability; exit 0 provable, 1 refutable")
    p = sub.add_parser("check", help="check an IPC or L proof file")
    p.add_argument("file")
    p.add_argument("--goal")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("embed", help="turn an IPC proof of A into an L proof of []A")
    p.add_argument("file")
    p.add_argument("--out", "-o")
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("enumerate", help="list algebras, ultrafilters or models")
    p.add_argument("kind", choices=["algebras", "ultrafilters", "models"])
    p.add_argument("--max-algebra", type=int, default=4)
    p.add_argument("--boolean", action="store_true", help="only Boolean algebras")
    p.add_argument("--dp", action="store_true", help="only algebras with the disjunction property")
    p.add_argument("--out", "-o")
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("sweep", help="exhaustive run over a formula fragment")
    p.add_argument("--vars", type=int, default=2)
    p.add_argument("--size", type=int, default=7)
    p.add_argument("--sample", type=int, help="random subset of this many formulas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", required=True, help="output directory")
    p.set_defaults(fn=cmd_sweep)

    formula_cmd("countermodel", cmd_countermodel, "search enumerated models; exit 0 found, 1 not found") \
        .add_argument("--max-algebra", type=int, default=4)
    p = sub.add_parser("conservativity", help="L proof of a tautology or 2-element countermodel")
    p.add_argument("formula", nargs="?", help="omit to run over a whole fragment")
    p.add_argument("--vars", type=int, default=2)
    p.add_argument("--size", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o")
    p.set_defaults(fn=cmd_conservativity)

    p = sub.add_parser("validate-model", help="re-check a model file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate_model)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    try:
        return args.fn(args)
    except ParseError as e:
        _err(f"parse error: {e}")
    except (FormatError, UsageError, ResourceLimitError, ValueError) as e:
        _err(str(e))
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
