"""Semantic experiments tying the proof side to the algebraic models.

The central piece is :func:`kripke_to_lmodel`: the upsets of a finite rooted
Kripke model form a Heyting algebra with the disjunction property, and with
the two-valued box and the ultrafilter of a maximal world it becomes a model
in which ``[]A`` is true exactly when the root forces ``A``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    FinitePoset, LModel, all_assignments, enumerate_models, eval_formula, eval_vector,
    heyting_from_poset, satisfies, trivial_box, two_element_model_of,
)
from .formula import (
    BOT, TOP, Atom, Box, Equiv, Formula, Iff, Imp, Or, atoms, enumerate_formulas,
    is_propositional, size, to_text,
)
from .ipc import (
    KripkeModel, Provable, cpc_valid, falsifying_valuation, forcing_set, kripke_eval,
    ipc_prove, ipc_provable,
)
from .lkernel import LProof, check_lproof, classical_proof, embed_ipc, sp

__all__ = [
    "SoundnessError", "kripke_to_lmodel", "Verdict", "verify_main_theorem",
    "CountermodelResult", "countermodel_search", "check_identity_theorem",
    "identity_theorem_table", "check_sp_validity", "BoundedPrimeTheory",
    "bounded_prime_theory", "ConservativityResult", "conservativity_check", "conservativity_sweep",
    "valid_on_models", "SweepRecord", "SweepReport", "sweep",
]


class SoundnessError(AssertionError):
    """Evidence produced by the pipeline failed independent re-validation."""


# ---------------------------------------------------------------------------
# Kripke models to algebraic models

def kripke_to_lmodel(K: KripkeModel, variables: Optional[Iterable[int]] = None):
    """Upset model of ``K`` with the assignment sending each variable to its truth set."""
    err = K.validate()
    if err:
        raise ValueError(f"not a rooted Kripke model: {err}")
    if variables is None:
        variables = sorted(set().union(*K.valuation))
    return _transfer(K, tuple(sorted(set(variables))))


@lru_cache(maxsize=4096)
def _transfer(K: KripkeModel, variables: Tuple[int, ...]):
    n = K.size
    # downsets of the reversed order are the upsets of K
    rev = FinitePoset(n, tuple(tuple(i in K.up[j] for j in range(n)) for i in range(n)))
    H = heyting_from_poset(rev)
    index = {lab: i for i, lab in enumerate(H.labels)}
    top_world = min(w for w in range(n) if K.up[w] == frozenset((w,)))
    true = frozenset(i for i, lab in enumerate(H.labels) if top_world in lab)
    model = LModel(H, true, trivial_box(H))
    gamma = {v: index[forcing_set(K, Atom(v))] for v in variables}
    return model, gamma


# ---------------------------------------------------------------------------
# the embedding theorem, instance by instance

@dataclass(frozen=True)
class Verdict:
    premises: Tuple[Formula, ...]
    formula: Formula
    ipc_status: str                 # "Provable" or "Refutable"
    proof: Optional[LProof] = None
    kripke: Optional[KripkeModel] = None
    model: Optional[LModel] = None
    assignment: Optional[Dict[int, int]] = None

    @property
    def evidence_kind(self) -> str:
        return "l-proof" if self.proof is not None else "l-model"


def _validate_verdict(v: Verdict) -> None:
    boxed = tuple(Box(p) for p in v.premises)
    if v.ipc_status == "Provable":
        res = check_lproof(v.proof, Box(v.formula))
        if not res or v.proof.premises != boxed:
            raise SoundnessError(f"L proof of []{to_text(v.formula)} rejected: {res}")
        return
    mc = v.model.validate()
    if not mc:
        raise SoundnessError(f"transferred model violates {mc.condition}")
    for b in boxed:
        if not satisfies(v.model, v.assignment, b):
            raise SoundnessError(f"countermodel does not satisfy premise {to_text(b)}")
    if satisfies(v.model, v.assignment, Box(v.formula)):
        raise SoundnessError(f"countermodel satisfies []{to_text(v.formula)}")


def verify_main_theorem(premises: Sequence[Formula], formula: Formula) -> Verdict:
    """Decide ``premises |-IPC formula`` and produce checked evidence for the boxed form.

    Provable: a kernel-checked L proof of ``[]formula`` from the boxed premises.
    Refutable: a model satisfying the boxed premises and refuting ``[]formula``.
    """
    premises = tuple(premises)
    res = ipc_prove(premises, formula)
    if isinstance(res, Provable):
        v = Verdict(premises, formula, "Provable", proof=embed_ipc(res.proof))
    else:
        vs = set(atoms(formula)).union(*(atoms(p) for p in premises))
        model, gamma = kripke_to_lmodel(res.model, vs)
        v = Verdict(premises, formula, "Refutable", kripke=res.model, model=model, assignment=gamma)
    _validate_verdict(v)
    return v


# ---------------------------------------------------------------------------
# countermodels by enumeration

@dataclass(frozen=True)
class CountermodelResult:
    found: bool
    model: Optional[LModel] = None
    assignment: Optional[Dict[int, int]] = None
    reason: str = ""


@lru_cache(maxsize=8)
def _models_upto(k: int) -> Tuple[LModel, ...]:
    return tuple(enumerate_models(k))


MAX_ASSIGNMENTS = 1 << 20


def countermodel_search(
    premises: Sequence[Formula], formula: Formula, max_size: int = 4
) -> CountermodelResult:
    """Look for a model of ``premises`` refuting ``formula`` among models of size <= ``max_size``.

    Smaller models are tried first.  Not finding one says nothing about
    derivability beyond the searched range.
    """
    vs = sorted(set(atoms(formula)).union(*(atoms(p) for p in premises)))
    skipped = 0
    for model in _models_upto(max_size):
        if model.size ** len(vs) > MAX_ASSIGNMENTS:
            skipped += 1
            continue
        env = all_assignments(model, vs)
        memo: dict = {}
        good = ~model._true_mask[eval_vector(model, env, formula, memo)]
        for p in premises:
            good &= model._true_mask[eval_vector(model, env, p, memo)]
        hits = np.flatnonzero(good)
        if len(hits):
            row = int(hits[0])
            gamma = {v: int(env[v][row]) for v in vs}
            assert satisfies(model, gamma, formula) is False
            return CountermodelResult(True, model, gamma)
    reason = f"no countermodel among models with at most {max_size} elements"
    if skipped:
        reason += f" ({skipped} models skipped: too many assignments)"
    return CountermodelResult(False, reason=reason)


def valid_on_models(formula: Formula, models: Sequence[LModel]) -> bool:
    """Is ``formula`` true in every given model under every assignment?"""
    vs = sorted(atoms(formula))
    for model in models:
        env = all_assignments(model, vs)
        if not model._true_mask[eval_vector(model, env, formula)].all():
            return False
    return True


# ---------------------------------------------------------------------------
# identity, substitution, truth predicate

def check_identity_theorem(model: LModel, gamma: Mapping[int, int], a: Formula, b: Formula) -> bool:
    """``a == b`` is satisfied exactly when ``a`` and ``b`` take the same value."""
    sat = satisfies(model, gamma, Equiv(a, b))
    same = eval_formula(model, gamma, a) == eval_formula(model, gamma, b)
    return sat == same


def identity_theorem_table(model: LModel, formulas: Sequence[Formula], variables: Sequence[int]) -> int:
    """Count (pair, assignment) cases where the identity biconditional fails.

    Vectorized form of :func:`check_identity_theorem` over all ordered pairs
    of ``formulas`` and all assignments of ``variables``.
    """
    H = model.algebra
    env = all_assignments(model, variables)
    memo: dict = {}
    rows = len(next(iter(env.values()))) if env else 1
    V = np.stack([np.broadcast_to(eval_vector(model, env, f, memo), (rows,)) for f in formulas])
    box, true = model._box_arr, model._true_mask
    fails = 0
    for i in range(len(formulas)):
        a = V[i][None, :]
        there = box[H.imp[a, V]]          # [](f_i -> f_j)
        back = box[H.imp[V, a]]           # [](f_j -> f_i)
        sat = true[H.meet[there, back]]
        same = V == a
        fails += int((sat != same).sum())
    return fails


def check_sp_validity(model: LModel, gamma: Mapping[int, int], a: Formula, b: Formula,
                      ctx: Formula, x: int) -> bool:
    return satisfies(model, gamma, sp(a, b, ctx, x))


@dataclass(frozen=True)
class BoundedPrimeTheory:
    """Propositional formulas up to a size bound that take the top value."""

    members: FrozenSet[Formula]
    bound: int
    violations: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __contains__(self, f: Formula) -> bool:
        return f in self.members


def bounded_prime_theory(model: LModel, gamma: Mapping[int, int], k: int,
                         variables: Sequence[int]) -> BoundedPrimeTheory:
    """Collect the top-valued formulas of size <= ``k`` and check closure, consistency, primeness."""
    top = model.algebra.top
    fs = enumerate_formulas([Atom(v) for v in variables], k)
    members = frozenset(f for f in fs if eval_formula(model, gamma, f) == top)
    bad: List[str] = []
    if BOT in members:
        bad.append("contains bot")
    if TOP not in members:
        bad.append("misses verum")
    for f in members:
        if isinstance(f, Imp) and f.left in members and f.right not in members:
            bad.append(f"not closed under MP: {to_text(f)}")
        if isinstance(f, Or) and f.left not in members and f.right not in members:
            bad.append(f"not prime: {to_text(f)}")
    return BoundedPrimeTheory(members, k, tuple(sorted(bad)))


# ---------------------------------------------------------------------------
# conservativity over classical logic

@dataclass(frozen=True)
class ConservativityResult:
    formula: Formula
    classical: bool
    ok: bool
    proof: Optional[LProof] = None
    model: Optional[LModel] = None
    assignment: Optional[Dict[int, int]] = None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def evidence_kind(self) -> str:
        return "l-proof" if self.proof is not None else "l-model"


def conservativity_check(f: Formula) -> ConservativityResult:
    """Tautologies get a kernel-checked L proof; non-tautologies a two-element countermodel."""
    if not is_propositional(f):
        raise ValueError("conservativity is about propositional formulas")
    if cpc_valid(f):
        proof = classical_proof(f)
        return ConservativityResult(f, True, bool(check_lproof(proof, f)), proof=proof)
    try:
        classical_proof(f)
        return ConservativityResult(f, False, False)
    except ValueError:
        pass
    model, gamma = two_element_model_of(falsifying_valuation(f))
    return ConservativityResult(f, False, not satisfies(model, gamma, f), model=model, assignment=gamma)


def conservativity_sweep(n_vars: int, max_size: int) -> List[ConservativityResult]:
    """Conservativity evidence for every propositional formula in the fragment, sorted by text."""
    fs = enumerate_formulas([Atom(i) for i in range(n_vars)], max_size)
    return sorted((conservativity_check(f) for f in fs), key=lambda r: to_text(r.formula))


# ---------------------------------------------------------------------------
# exhaustive sweep

@dataclass(frozen=True)
class SweepRecord:
    formula: Formula
    ipc: str
    classical: bool
    evidence: str
    evidence_ok: bool
    conservativity_ok: bool
    valid_on_models: Optional[bool] = None
    verdict: Optional[Verdict] = field(default=None, repr=False, compare=False)
    conservativity: Optional[ConservativityResult] = field(default=None, repr=False, compare=False)

    @property
    def category(self) -> str:
        if self.ipc == "Provable":
            return "ipc"
        return "cpc-only" if self.classical else "neither"


@dataclass
class SweepReport:
    variables: int
    max_size: int
    records: List[SweepRecord]
    counts: Dict[str, int]
    evidence_failures: int
    identity_pairs: int
    identity_failures: int
    transfer_checks: int
    transfer_failures: int
    non_normal_witnesses: List[str]

    def record(self, text: str) -> SweepRecord:
        for r in self.records:
            if to_text(r.formula) == text:
                return r
        raise KeyError(text)


def _identity_pairs(records: Sequence[SweepRecord], pair_size: int) -> Tuple[int, int]:
    # finite analogue of the IPC model: sound on every transferred model, and
    # each non-equivalent pair separated by the model from its own refutation
    base = sorted({r.formula for r in records if size(r.formula) <= pair_size})
    models = {}
    for r in records:
        if r.verdict is not None and r.verdict.kripke is not None:
            models.setdefault(r.verdict.kripke, (r.verdict.model, r.verdict.assignment))
    pairs = failures = 0
    for i, a in enumerate(base):
        for b in base[i:]:
            pairs += 1
            ident = Equiv(a, b)
            res = ipc_prove((), Iff(a, b))
            if isinstance(res, Provable):
                for model, gamma in models.values():
                    g = {**{v: model.algebra.bot for v in atoms(ident)}, **gamma}
                    if not satisfies(model, g, ident):
                        failures += 1
            else:
                vs = atoms(a) | atoms(b)
                model, gamma = kripke_to_lmodel(res.model, vs)
                if satisfies(model, gamma, ident):
                    failures += 1
    return pairs, failures


def _transfer_agreement(records: Sequence[SweepRecord], probe_size: int) -> Tuple[int, int]:
    # root forcing of psi must coincide with truth of []psi in the transferred model
    probes = sorted({r.formula for r in records if size(r.formula) <= probe_size})
    seen = set()
    checks = failures = 0
    for r in records:
        v = r.verdict
        if v is None or v.kripke is None or v.kripke in seen:
            continue
        seen.add(v.kripke)
        K = v.kripke
        vs = set(range(max((max(a) for a in K.valuation if a), default=-1) + 1))
        for psi in probes + [r.formula]:
            model, gamma = kripke_to_lmodel(K, vs | atoms(psi))
            checks += 1
            if kripke_eval(K, K.root, psi) != satisfies(model, gamma, Box(psi)):
                failures += 1
    return checks, failures


def sweep(n_vars: int = 2, max_size: int = 7, *, pair_size: int = 3, model_size: int = 5,
          sample: Optional[int] = None, seed: int = 0) -> SweepReport:
    """Run the embedding theorem and conservativity over every formula in the fragment.

    With ``sample`` set, a seeded random subset of that many formulas is used.
    """
    variables = [Atom(i) for i in range(n_vars)]
    formulas = enumerate_formulas(variables, max_size)
    if sample is not None and sample < len(formulas):
        formulas = random.Random(seed).sample(formulas, sample)
    models = _models_upto(model_size)
    records = []
    failures = 0
    for f in formulas:
        try:
            v = verify_main_theorem((), f)
            ev_ok = True
        except SoundnessError:
            v, ev_ok = None, False
            failures += 1
        cons = conservativity_check(f)
        if not cons.ok:
            failures += 1
        classical = cons.classical
        status = v.ipc_status if v is not None else ("Provable" if ipc_provable((), f) else "Refutable")
        vom = valid_on_models(f, models) if (classical and status == "Refutable") else None
        records.append(SweepRecord(
            f, status, classical, v.evidence_kind if v else "none", ev_ok, cons.ok, vom,
            verdict=v, conservativity=cons,
        ))
    records.sort(key=lambda r: to_text(r.formula))
    counts = {"ipc": 0, "cpc-only": 0, "neither": 0}
    for r in records:
        counts[r.category] += 1
        if r.ipc == "Provable" and not r.classical:
            failures += 1
    witnesses = [to_text(r.formula) for r in records
                 if r.valid_on_models and r.ipc == "Refutable" and r.evidence_ok]
    pairs, id_fail = _identity_pairs(records, pair_size)
    tchecks, tfail = _transfer_agreement(records, pair_size)
    return SweepReport(n_vars, max_size, records, counts, failures, pairs, id_fail,
                       tchecks, tfail, witnesses)
