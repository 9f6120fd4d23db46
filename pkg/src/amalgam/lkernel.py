"""Proof checker and proof generators for the modal logic L.

Axioms of L are the substitution instances of intuitionistic tautologies
(scheme I) and the box schemes II ``[]A -> A``, III
``[](A->B) -> ([](B->C) -> [](A->C))`` and IV ``[](A\\/B) -> []A \\/ []B``.
The rules are modus ponens and axiom necessitation (AN), which boxes an axiom
line and nothing else.  Excluded middle and the substitution principle enter
as theorem schemes, so AN never applies to them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .formula import (
    TOP, And, Atom, Box, Equiv, Formula, Iff, Imp, Neg, Or, Skeleton,
    atoms, is_propositional, max_index, skeleton, substitute, to_text,
)
from .ipc import (
    CheckResult, HilbertIPCProof, Hypothesis, IpcAxiom, ModusPonens,
    atom_em_reduction, check_hilbert_ipc, cpc_valid, ipc_provable, match_ipc_scheme,
    match_pattern,
)

__all__ = [
    "AxI", "AxII", "AxIII", "AxIV", "AN", "ThmEM", "ThmSP", "Hypothesis", "ModusPonens",
    "LProof", "ax2", "ax3", "ax4", "em", "sp", "match_axiom", "is_axiom_i",
    "check_lproof", "ProofBuilder", "deduction_transform", "derive_K",
    "derive_box_top_equiv", "derive_box_conj", "embed_ipc", "classical_proof",
]


# ---------------------------------------------------------------------------
# schemes

def ax2(a: Formula) -> Formula:
    return Imp(Box(a), a)


def ax3(a: Formula, b: Formula, c: Formula) -> Formula:
    return Imp(Box(Imp(a, b)), Imp(Box(Imp(b, c)), Box(Imp(a, c))))


def ax4(a: Formula, b: Formula) -> Formula:
    return Imp(Box(Or(a, b)), Or(Box(a), Box(b)))


def em(a: Formula) -> Formula:
    return Or(a, Neg(a))


def sp(a: Formula, b: Formula, ctx: Formula, x: int) -> Formula:
    return Imp(Equiv(a, b), Equiv(substitute(ctx, x, a), substitute(ctx, x, b)))


_M = [Atom(i) for i in range(3)]
_PAT2, _PAT3, _PAT4 = ax2(_M[0]), ax3(*_M), ax4(_M[0], _M[1])


@dataclass(frozen=True)
class AxI:
    """Instance of an intuitionistic tautology; ``witness`` is optional."""

    witness: Optional[Skeleton] = None


@dataclass(frozen=True)
class AxII:
    phi: Formula


@dataclass(frozen=True)
class AxIII:
    phi: Formula
    psi: Formula
    chi: Formula


@dataclass(frozen=True)
class AxIV:
    phi: Formula
    psi: Formula


@dataclass(frozen=True)
class AN:
    line: int


@dataclass(frozen=True)
class ThmEM:
    phi: Formula


@dataclass(frozen=True)
class ThmSP:
    phi: Formula
    psi: Formula
    chi: Formula
    x: int


_AXIOM_JUSTIFICATIONS = (AxI, AxII, AxIII, AxIV)
LJustification = Union[AxI, AxII, AxIII, AxIV, AN, ThmEM, ThmSP, Hypothesis, ModusPonens]


@dataclass(frozen=True)
class LProof:
    premises: Tuple[Formula, ...]
    lines: Tuple[Tuple[Formula, object], ...]

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1][0]

    def __len__(self) -> int:
        return len(self.lines)


# ---------------------------------------------------------------------------
# axiom recognition

@lru_cache(maxsize=1 << 17)
def _body_provable(body: Formula) -> bool:
    return ipc_provable((), body)


def is_axiom_i(f: Formula) -> bool:
    """Is ``f`` a substitution instance of an intuitionistic tautology?"""
    if match_ipc_scheme(f) is not None:
        return True
    return _body_provable(skeleton(f).body)


def match_axiom(f: Formula) -> Optional[str]:
    """Lowest-numbered axiom scheme (``"I"`` .. ``"IV"``) that ``f`` instantiates."""
    if is_axiom_i(f):
        return "I"
    if match_pattern(_PAT2, f) is not None:
        return "II"
    if match_pattern(_PAT3, f) is not None:
        return "III"
    if match_pattern(_PAT4, f) is not None:
        return "IV"
    return None


# ---------------------------------------------------------------------------
# checking

def _check_line(proof: LProof, n: int, f: Formula, j) -> Optional[str]:
    lines = proof.lines
    if isinstance(j, AxI):
        w = j.witness
        if w is None:
            return None if is_axiom_i(f) else "not an instance of an intuitionistic tautology"
        if not is_propositional(w.body) or w.resubstitute() != f:
            return "skeleton witness does not reproduce the formula"
        return None if _body_provable(w.body) else "witness body is not an intuitionistic tautology"
    if isinstance(j, AxII):
        return None if ax2(j.phi) == f else "not the stated instance of scheme II"
    if isinstance(j, AxIII):
        return None if ax3(j.phi, j.psi, j.chi) == f else "not the stated instance of scheme III"
    if isinstance(j, AxIV):
        return None if ax4(j.phi, j.psi) == f else "not the stated instance of scheme IV"
    if isinstance(j, Hypothesis):
        ok = 0 <= j.index < len(proof.premises) and proof.premises[j.index] == f
        return None if ok else f"hypothesis {j.index} does not match"
    if isinstance(j, ModusPonens):
        if not (1 <= j.minor < n and 1 <= j.major < n):
            return f"MP cites line outside 1..{n - 1}"
        a, ab = lines[j.minor - 1][0], lines[j.major - 1][0]
        if isinstance(ab, Imp) and ab.left == a and ab.right == f:
            return None
        return f"lines {j.minor} and {j.major} do not yield this formula by MP"
    if isinstance(j, AN):
        if not 1 <= j.line < n:
            return f"AN cites line outside 1..{n - 1}"
        g, jk = lines[j.line - 1]
        if not isinstance(jk, _AXIOM_JUSTIFICATIONS):
            return f"AN applied to line {j.line}, which is not an axiom ({type(jk).__name__})"
        return None if f == Box(g) else f"not the necessitation of line {j.line}"
    if isinstance(j, ThmEM):
        return None if em(j.phi) == f else "not the stated excluded-middle instance"
    if isinstance(j, ThmSP):
        if j.x < 0:
            return "bad substitution variable"
        return None if sp(j.phi, j.psi, j.chi, j.x) == f else "not the stated SP instance"
    return f"unknown justification {j!r}"


def check_lproof(proof: LProof, goal: Optional[Formula] = None) -> CheckResult:
    """Check every line of ``proof``; optionally require it to end in ``goal``."""
    if not proof.lines:
        return CheckResult(False, 0, "empty proof")
    for n, (f, j) in enumerate(proof.lines, start=1):
        err = _check_line(proof, n, f, j)
        if err:
            return CheckResult(False, n, err)
    if goal is not None and proof.conclusion != goal:
        return CheckResult(False, len(proof.lines), "last line is not the goal")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# building proofs

class ProofBuilder:
    """Append-only derivation with reuse of already proved formulas."""

    def __init__(self, premises: Sequence[Formula] = ()):
        self.premises = tuple(premises)
        self.lines: List[Tuple[Formula, object]] = []
        self._any: Dict[Formula, int] = {}
        self._axiom: Dict[Formula, int] = {}

    def add(self, f: Formula, j, reuse: bool = True) -> int:
        is_ax = isinstance(j, _AXIOM_JUSTIFICATIONS)
        if reuse:
            n = (self._axiom if is_ax else self._any).get(f)
            if n is not None:
                return n
        self.lines.append((f, j))
        n = len(self.lines)
        self._any.setdefault(f, n)
        if is_ax:
            self._axiom.setdefault(f, n)
        return n

    def have(self, f: Formula) -> Optional[int]:
        return self._any.get(f)

    def axiom_i(self, f: Formula) -> int:
        return self.add(f, AxI())

    def ax2(self, a):
        return self.add(ax2(a), AxII(a))

    def ax3(self, a, b, c):
        return self.add(ax3(a, b, c), AxIII(a, b, c))

    def ax4(self, a, b):
        return self.add(ax4(a, b), AxIV(a, b))

    def hyp(self, i: int) -> int:
        return self.add(self.premises[i], Hypothesis(i))

    def mp(self, minor: int, major: int) -> int:
        imp = self.lines[major - 1][0]
        assert isinstance(imp, Imp) and imp.left == self.lines[minor - 1][0], "bad MP"
        return self.add(imp.right, ModusPonens(minor, major))

    def an(self, k: int) -> int:
        f, j = self.lines[k - 1]
        if not isinstance(j, _AXIOM_JUSTIFICATIONS):
            k = self._axiom[f]
        return self.add(Box(f), AN(k))

    def em(self, a):
        return self.add(em(a), ThmEM(a))

    def sp(self, a, b, ctx, x):
        return self.add(sp(a, b, ctx, x), ThmSP(a, b, ctx, x))

    def infer(self, target: Formula, *premise_lines: int) -> int:
        """Derive ``target`` from the cited lines by one propositional step.

        The implication ``p1 -> (p2 -> ... -> target)`` must be an instance
        of an intuitionistic tautology; it enters as a scheme I line.
        """
        n = self.have(target)
        if n is not None:
            return n
        imp = target
        for k in reversed(premise_lines):
            imp = Imp(self.lines[k - 1][0], imp)
        cur = self.axiom_i(imp)
        for k in premise_lines:
            cur = self.mp(k, cur)
        return cur

    def include(self, proof: LProof) -> int:
        """Copy a premise-free proof in, returning the line of its conclusion."""
        if proof.premises:
            raise ValueError("only premise-free proofs can be included")
        remap: Dict[int, int] = {}
        for n, (f, j) in enumerate(proof.lines, start=1):
            if isinstance(j, ModusPonens):
                j = ModusPonens(remap[j.minor], remap[j.major])
            elif isinstance(j, AN):
                j = AN(remap[j.line])
            remap[n] = self.add(f, j)
        return remap[len(proof.lines)]

    # -- derived rules ----------------------------------------------------

    def box_congruence(self, a: Formula, b: Formula) -> Tuple[int, int]:
        """Lines for ``[]a -> []b`` and ``[]b -> []a``.

        Requires ``a -> b`` and ``b -> a`` to be scheme I instances; goes
        through ``a == b`` and the substitution principle with context ``[]x``.
        """
        ab = self.an(self.axiom_i(Imp(a, b)))
        ba = self.an(self.axiom_i(Imp(b, a)))
        ident = self.infer(Equiv(a, b), ab, ba)
        x = max_index((a, b)) + 1
        boxed = self.mp(ident, self.sp(a, b, Box(Atom(x)), x))
        fwd, bwd = Imp(Box(a), Box(b)), Imp(Box(b), Box(a))
        l1 = self.mp(self.infer(Box(fwd), boxed), self.ax2(fwd))
        l2 = self.mp(self.infer(Box(bwd), boxed), self.ax2(bwd))
        return l1, l2

    def k(self, a: Formula, b: Formula) -> int:
        """Line for the K instance ``[](a->b) -> ([]a -> []b)``."""
        goal = Imp(Box(Imp(a, b)), Imp(Box(a), Box(b)))
        n = self.have(goal)
        if n is not None:
            return n
        top_a, top_b = Imp(TOP, a), Imp(TOP, b)
        into, _ = self.box_congruence(a, top_a)
        _, outof = self.box_congruence(b, top_b)
        chain = self.ax3(TOP, a, b)
        return self.infer(goal, into, chain, outof)

    def build(self, goal: Optional[Formula] = None) -> LProof:
        if goal is not None:
            n = self.have(goal)
            if n is None:
                raise ValueError(f"goal not derived: {to_text(goal)}")
            if n != len(self.lines):
                self.lines.append(self.lines[n - 1])
        return LProof(self.premises, tuple(self.lines))


# ---------------------------------------------------------------------------
# generators

def derive_K(a: Formula, b: Formula) -> LProof:
    """Proof of ``[](a->b) -> ([]a -> []b)``."""
    pb = ProofBuilder()
    pb.k(a, b)
    return pb.build(Imp(Box(Imp(a, b)), Imp(Box(a), Box(b))))


def derive_box_top_equiv(a: Formula) -> LProof:
    """Proof of ``[]a <-> (a == T)``."""
    pb = ProofBuilder()
    fwd, bwd = pb.box_congruence(a, Imp(TOP, a))
    up = pb.an(pb.axiom_i(Imp(a, TOP)))
    goal = Iff(Box(a), Equiv(a, TOP))
    pb.infer(goal, fwd, bwd, up)
    return pb.build(goal)


def derive_box_conj(a: Formula, b: Formula) -> LProof:
    """Proof of ``[](a/\\b) <-> ([]a /\\ []b)``."""
    pb = ProofBuilder()
    ab = And(a, b)
    left = pb.mp(pb.an(pb.axiom_i(Imp(ab, a))), pb.k(ab, a))
    right = pb.mp(pb.an(pb.axiom_i(Imp(ab, b))), pb.k(ab, b))
    pair = pb.mp(pb.an(pb.axiom_i(Imp(a, Imp(b, ab)))), pb.k(a, Imp(b, ab)))
    close = pb.k(b, ab)
    goal = Iff(Box(ab), And(Box(a), Box(b)))
    pb.infer(goal, left, right, pair, close)
    return pb.build(goal)


def deduction_transform(proof: LProof, hyp: Formula) -> LProof:
    """Turn a proof of ``premises |- B`` into one of ``premises - {hyp} |- hyp -> B``.

    Lines that do not depend on ``hyp`` are copied unchanged (AN lines keep
    their axiom) and weakened with ``X -> (hyp -> X)`` only where needed.
    """
    res = check_lproof(proof)
    if not res:
        raise ValueError(f"input proof does not check: {res}")
    if hyp not in proof.premises:
        raise ValueError("discharged formula is not a premise")
    kept = [p for p in proof.premises if p != hyp]
    new_index = {}
    for i, p in enumerate(proof.premises):
        if p != hyp:
            new_index[i] = kept.index(p)
    pb = ProofBuilder(kept)
    plain: Dict[int, int] = {}     # old line -> new line proving the same formula
    cond: Dict[int, int] = {}      # old line -> new line proving hyp -> formula
    lines = proof.lines

    def conditional(n: int) -> int:
        if n not in cond:
            f = lines[n - 1][0]
            cond[n] = pb.mp(plain[n], pb.axiom_i(Imp(f, Imp(hyp, f))))
        return cond[n]

    for n, (f, j) in enumerate(lines, start=1):
        if isinstance(j, Hypothesis):
            if proof.premises[j.index] == hyp:
                cond[n] = pb.axiom_i(Imp(hyp, hyp))
            else:
                plain[n] = pb.add(f, Hypothesis(new_index[j.index]))
        elif isinstance(j, ModusPonens):
            i, k = j.minor, j.major
            if i in plain and k in plain:
                plain[n] = pb.mp(plain[i], plain[k])
            else:
                a = lines[i - 1][0]
                s = pb.axiom_i(Imp(Imp(hyp, Imp(a, f)), Imp(Imp(hyp, a), Imp(hyp, f))))
                cond[n] = pb.mp(conditional(i), pb.mp(conditional(k), s))
        elif isinstance(j, AN):
            plain[n] = pb.add(f, AN(plain[j.line]))
        else:
            plain[n] = pb.add(f, j)
    last = len(lines)
    conditional(last)
    return pb.build(Imp(hyp, lines[-1][0]))


def embed_ipc(proof: HilbertIPCProof) -> LProof:
    """Map an IPC derivation of ``G |- A`` to an L derivation of ``[]G |- []A``.

    Axiom lines become scheme I lines followed by AN, hypotheses become boxed
    hypotheses, and each modus ponens step goes through a K instance.
    """
    res = check_hilbert_ipc(proof, proof.premises, proof.conclusion)
    if not res:
        raise ValueError(f"input IPC proof does not check: {res}")
    pb = ProofBuilder([Box(p) for p in proof.premises])
    boxed: Dict[int, int] = {}
    for n, (f, j) in enumerate(proof.lines, start=1):
        if isinstance(j, IpcAxiom):
            boxed[n] = pb.an(pb.axiom_i(f))
        elif isinstance(j, Hypothesis):
            boxed[n] = pb.hyp(j.index)
        else:
            a = proof.lines[j.minor - 1][0]
            step = pb.mp(boxed[j.major], pb.k(a, f))
            boxed[n] = pb.mp(boxed[j.minor], step)
    return pb.build(Box(proof.conclusion))


def classical_proof(f: Formula) -> LProof:
    """L proof of a classical propositional tautology.

    Excluded middle for each variable, conjoined, then the scheme I line
    ``(x \\/ ~x) /\\ ... -> f`` and one MP.
    """
    if not is_propositional(f) or not cpc_valid(f):
        raise ValueError(f"not a classical propositional tautology: {to_text(f)}")
    pb = ProofBuilder()
    if isinstance(f, Or) and f.right == Neg(f.left):
        pb.em(f.left)
        return pb.build(f)
    reduction = atom_em_reduction(f)
    if not ipc_provable((), reduction):
        raise AssertionError(f"excluded-middle reduction failed for {to_text(f)}")
    ems = [pb.em(Atom(i)) for i in sorted(atoms(f))]
    hyp = reduction.left
    if not ems:
        have = pb.axiom_i(hyp)
    elif len(ems) == 1:
        have = ems[0]
    else:
        have = pb.infer(hyp, *ems)
    pb.mp(have, pb.axiom_i(reduction))
    return pb.build(f)
