"""Text formats for proofs, models and sweep reports.

Proofs are JSON Lines: a header record, then one record per line of the
derivation.  Models are single JSON documents with one field per line.
Every writer is deterministic so equal inputs give byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .algebra import FiniteHeytingAlgebra, LModel
from .formula import Atom, Formula, Skeleton, atom_name, parse, to_text
from .ipc import HilbertIPCProof, Hypothesis, IpcAxiom, KripkeModel, ModusPonens
from .lkernel import AN, AxI, AxII, AxIII, AxIV, LProof, ThmEM, ThmSP

PROOF_FORMAT = "amalgam-proof"
MODEL_FORMAT = "amalgam-model"
KRIPKE_FORMAT = "amalgam-kripke"
REPORT_FORMAT = "amalgam-sweep"


class FormatError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False)


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# proofs

def _step_record(f: Formula, just) -> dict:
    rec = {"formula": to_text(f)}
    if isinstance(just, IpcAxiom):
        rec["rule"] = just.scheme
        rec["inst"] = [to_text(g) for g in just.instantiation]
    elif isinstance(just, Hypothesis):
        rec.update(rule="Hyp", index=just.index)
    elif isinstance(just, ModusPonens):
        rec.update(rule="MP", minor=just.minor, major=just.major)
    elif isinstance(just, AxI):
        rec["rule"] = "AxI"
        if just.witness is not None:
            rec["body"] = to_text(just.witness.body)
            rec["abstraction"] = [[atom_name(a.index), to_text(g)] for a, g in just.witness.abstraction]
    elif isinstance(just, AxII):
        rec.update(rule="AxII", phi=to_text(just.phi))
    elif isinstance(just, AxIII):
        rec.update(rule="AxIII", phi=to_text(just.phi), psi=to_text(just.psi), chi=to_text(just.chi))
    elif isinstance(just, AxIV):
        rec.update(rule="AxIV", phi=to_text(just.phi), psi=to_text(just.psi))
    elif isinstance(just, AN):
        rec.update(rule="AN", line=just.line)
    elif isinstance(just, ThmEM):
        rec.update(rule="EM", phi=to_text(just.phi))
    elif isinstance(just, ThmSP):
        rec.update(rule="SP", phi=to_text(just.phi), psi=to_text(just.psi),
                   chi=to_text(just.chi), x=atom_name(just.x))
    else:
        raise TypeError(f"unknown justification {just!r}")
    return rec


@lru_cache(maxsize=1 << 16)
def _step_text(f: Formula, just) -> str:
    return _dump(_step_record(f, just))[1:]


def proof_to_text(proof: Union[HilbertIPCProof, LProof]) -> str:
    logic = "IPC" if isinstance(proof, HilbertIPCProof) else "L"
    out = [_dump({"format": PROOF_FORMAT, "logic": logic,
                  "premises": [to_text(p) for p in proof.premises]})]
    for n, (f, just) in enumerate(proof.lines, 1):
        out.append(f'{{"n": {n}, {_step_text(f, just)}')
    return "\n".join(out) + "\n"


def _get(rec: dict, key: str, n: int):
    try:
        return rec[key]
    except KeyError:
        raise FormatError(f"record {n}: missing field {key!r}") from None


def _int(rec: dict, key: str, n: int) -> int:
    v = _get(rec, key, n)
    if not isinstance(v, int) or isinstance(v, bool):
        raise FormatError(f"record {n}: field {key!r} must be an integer")
    return v


def _just_from_record(rec: dict, n: int, logic: str):
    rule = _get(rec, "rule", n)
    fm = lambda k: parse(_get(rec, k, n))
    if rule == "Hyp":
        return Hypothesis(_int(rec, "index", n))
    if rule == "MP":
        return ModusPonens(_int(rec, "minor", n), _int(rec, "major", n))
    if logic == "IPC":
        return IpcAxiom(rule, tuple(parse(t) for t in _get(rec, "inst", n)))
    if rule == "AxI":
        if "body" not in rec:
            return AxI()
        pairs = tuple((parse(a), parse(g)) for a, g in rec["abstraction"])
        if not all(isinstance(a, Atom) for a, _ in pairs):
            raise FormatError(f"record {n}: abstraction keys must be variables")
        return AxI(Skeleton(fm("body"), pairs))
    if rule == "AxII":
        return AxII(fm("phi"))
    if rule == "AxIII":
        return AxIII(fm("phi"), fm("psi"), fm("chi"))
    if rule == "AxIV":
        return AxIV(fm("phi"), fm("psi"))
    if rule == "AN":
        return AN(_int(rec, "line", n))
    if rule == "EM":
        return ThmEM(fm("phi"))
    if rule == "SP":
        x = fm("x")
        if not isinstance(x, Atom):
            raise FormatError(f"record {n}: SP variable must be a variable")
        return ThmSP(fm("phi"), fm("psi"), fm("chi"), x.index)
    raise FormatError(f"record {n}: unknown rule {rule!r}")


def proof_from_text(text: str) -> Union[HilbertIPCProof, LProof]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty proof file")
    try:
        recs = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as e:
        raise FormatError(f"malformed JSON: {e}") from None
    head = recs[0]
    if not isinstance(head, dict) or head.get("format") != PROOF_FORMAT:
        raise FormatError("missing proof header")
    logic = head.get("logic")
    if logic not in ("IPC", "L"):
        raise FormatError(f"unknown logic {logic!r}")
    premises = tuple(parse(t) for t in head.get("premises", []))
    steps = []
    for n, rec in enumerate(recs[1:], 1):
        if not isinstance(rec, dict):
            raise FormatError(f"record {n}: not an object")
        if rec.get("n", n) != n:
            raise FormatError(f"record {n}: out of sequence")
        steps.append((parse(_get(rec, "formula", n)), _just_from_record(rec, n, logic)))
    cls = HilbertIPCProof if logic == "IPC" else LProof
    return cls(premises, tuple(steps))


# ---------------------------------------------------------------------------
# models

def _document(fields: List[Tuple[str, object]]) -> str:
    body = ",\n".join(f"  {_dump(k)}: {_dump(v)}" for k, v in fields)
    return "{\n" + body + "\n}\n"


def model_to_text(model: LModel, assignment: Optional[Dict[int, int]] = None) -> str:
    H = model.algebra
    fields = [
        ("format", MODEL_FORMAT),
        ("size", H.n),
        ("bot", H.bot),
        ("top", H.top),
        ("meet", H.meet.tolist()),
        ("join", H.join.tolist()),
        ("imp", H.imp.tolist()),
        ("true", sorted(int(m) for m in model.true)),
        ("box", [int(b) for b in model.box]),
    ]
    if assignment is not None:
        fields.append(("assignment", {atom_name(v): int(assignment[v]) for v in sorted(assignment)}))
    return _document(fields)


def model_from_text(text: str) -> Tuple[LModel, Optional[Dict[int, int]]]:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"malformed JSON: {e}") from None
    if d.get("format") != MODEL_FORMAT:
        raise FormatError("missing model header")
    H = FiniteHeytingAlgebra(np.array(d["meet"]), np.array(d["join"]), np.array(d["imp"]),
                             d["bot"], d["top"])
    model = LModel(H, frozenset(d["true"]), tuple(d["box"]))
    gamma = None
    if "assignment" in d:
        gamma = {}
        for name, val in d["assignment"].items():
            a = parse(name)
            if not isinstance(a, Atom):
                raise FormatError(f"bad variable {name!r}")
            gamma[a.index] = val
    return model, gamma


def kripke_to_text(K: KripkeModel) -> str:
    return _document([
        ("format", KRIPKE_FORMAT),
        ("worlds", K.size),
        ("root", K.root),
        ("up", [sorted(u) for u in K.up]),
        ("valuation", [[atom_name(v) for v in sorted(val)] for val in K.valuation]),
    ])


def kripke_from_text(text: str) -> KripkeModel:
    d = json.loads(text)
    if d.get("format") != KRIPKE_FORMAT:
        raise FormatError("missing Kripke model header")
    val = tuple(frozenset(parse(a).index for a in w) for w in d["valuation"])
    return KripkeModel(tuple(frozenset(u) for u in d["up"]), val, d["root"])


def algebra_record(H: FiniteHeytingAlgebra, **extra) -> dict:
    rec = {"size": H.n, "bot": H.bot, "top": H.top, "meet": H.meet.tolist(),
           "join": H.join.tolist(), "imp": H.imp.tolist()}
    rec.update(extra)
    return rec


def write_text(path: Union[str, Path], text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# sweep reports

def _evidence(proof, model, assignment) -> Tuple[str, str]:
    if proof is not None:
        text = proof_to_text(proof)
        return text, f"evidence/{digest(text)}.jsonl"
    text = model_to_text(model, assignment)
    return text, f"evidence/{digest(text)}.json"


def sweep_to_text(report, out_dir: Optional[Union[str, Path]] = None, seed: int = 0) -> str:
    """Serialize a sweep report; evidence files are written under ``out_dir`` if given."""
    written = set()

    def ref(proof, model, assignment) -> str:
        text, name = _evidence(proof, model, assignment)
        if out_dir is not None and name not in written:
            write_text(Path(out_dir) / name, text)
            written.add(name)
        return name

    out = [_dump({"format": REPORT_FORMAT, "vars": report.variables,
                  "size": report.max_size, "seed": seed})]
    for r in report.records:
        v, c = r.verdict, r.conservativity
        rec = {
            "formula": to_text(r.formula),
            "ipc": r.ipc,
            "classical": r.classical,
            "category": r.category,
            "evidence": r.evidence,
            "evidence_file": ref(v.proof, v.model, v.assignment) if v is not None else None,
            "evidence_ok": r.evidence_ok,
            "conservativity": c.evidence_kind if c is not None else None,
            "conservativity_file": ref(c.proof, c.model, c.assignment) if c is not None else None,
            "conservativity_ok": r.conservativity_ok,
        }
        if r.valid_on_models is not None:
            rec["valid_on_models"] = r.valid_on_models
        out.append(_dump(rec))
    out.append(_dump({
        "summary": True,
        "formulas": len(report.records),
        "counts": report.counts,
        "evidence_failures": report.evidence_failures,
        "identity_pairs": report.identity_pairs,
        "identity_failures": report.identity_failures,
        "transfer_checks": report.transfer_checks,
        "transfer_failures": report.transfer_failures,
        "non_normal_witnesses": report.non_normal_witnesses,
    }))
    return "\n".join(out) + "\n"


def read_report(text: str) -> Tuple[dict, List[dict], dict]:
    recs = [json.loads(ln) for ln in text.splitlines() if ln.strip()]
    if not recs or not str(recs[0].get("format", "")).startswith(REPORT_FORMAT):
        raise FormatError("missing sweep report header")
    return recs[0], recs[1:-1], recs[-1]


def conservativity_to_text(results, n_vars: int, max_size: int,
                           out_dir: Optional[Union[str, Path]] = None, seed: int = 0) -> str:
    out = [_dump({"format": REPORT_FORMAT + "-conservativity", "vars": n_vars,
                  "size": max_size, "seed": seed})]
    failures = classical = 0
    for r in results:
        text, name = _evidence(r.proof, r.model, r.assignment)
        if out_dir is not None:
            write_text(Path(out_dir) / name, text)
        classical += r.classical
        failures += not r.ok
        out.append(_dump({"formula": to_text(r.formula), "classical": r.classical,
                          "evidence": r.evidence_kind, "evidence_file": name, "ok": r.ok}))
    out.append(_dump({"summary": True, "formulas": len(results), "classical": classical,
                      "failures": failures}))
    return "\n".join(out) + "\n"
