"""Intuitionistic propositional logic: decision, proofs and countermodels.

``ipc_prove`` runs a contraction-free sequent calculus (G4ip).  A successful
search is turned into a typed lambda term and then, by bracket abstraction,
into a Hilbert derivation over the schemes A1-A9 with modus ponens.  A failed
search yields a finite rooted Kripke model refuting the sequent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .formula import (
    BOT, And, Atom, Bot, Box, Formula, Imp, Neg, Or, atoms, conj,
    is_propositional, sort_key, to_text,
)

__all__ = [
    "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "IPC_SCHEMES",
    "match_pattern", "match_ipc_scheme",
    "IpcAxiom", "Hypothesis", "ModusPonens", "HilbertIPCProof", "CheckResult",
    "check_hilbert_ipc", "KripkeModel", "kripke_eval", "forcing_set",
    "Provable", "Refutable", "ResourceLimitError", "ipc_prove", "ipc_provable",
    "Sequent", "cpc_valid", "falsifying_valuation", "atom_em_reduction",
    "compile_to_hilbert",
    "Term", "TVar", "THyp", "Lam", "App", "Pair", "Fst", "Snd", "Inl", "Inr", "Case", "Abort",
]


# ---------------------------------------------------------------------------
# Hilbert basis

def A1(a, b):
    return Imp(a, Imp(b, a))


def A2(a, b, c):
    return Imp(Imp(a, Imp(b, c)), Imp(Imp(a, b), Imp(a, c)))


def A3(a, b):
    return Imp(And(a, b), a)


def A4(a, b):
    return Imp(And(a, b), b)


def A5(a, b):
    return Imp(a, Imp(b, And(a, b)))


def A6(a, b):
    return Imp(a, Or(a, b))


def A7(a, b):
    return Imp(b, Or(a, b))


def A8(a, b, c):
    return Imp(Imp(a, c), Imp(Imp(b, c), Imp(Or(a, b), c)))


def A9(a):
    return Imp(BOT, a)


IPC_SCHEMES = {
    "A1": (A1, 2), "A2": (A2, 3), "A3": (A3, 2), "A4": (A4, 2), "A5": (A5, 2),
    "A6": (A6, 2), "A7": (A7, 2), "A8": (A8, 3), "A9": (A9, 1),
}

_META = [Atom(i) for i in range(8)]


def match_pattern(pattern: Formula, f: Formula, binding: Optional[Dict[int, Formula]] = None):
    """Match ``f`` against ``pattern`` whose atoms are metavariables.

    Returns the metavariable binding, or None.
    """
    binding = {} if binding is None else binding
    stack = [(pattern, f)]
    while stack:
        pat, g = stack.pop()
        t = pat.tag
        if isinstance(pat, Atom):
            old = binding.get(pat.index)
            if old is None:
                binding[pat.index] = g
            elif old != g:
                return None
        elif t != g.tag:
            return None
        elif isinstance(pat, Box):
            stack.append((pat.body, g.body))
        elif not isinstance(pat, Bot):
            stack.append((pat.left, g.left))
            stack.append((pat.right, g.right))
    return binding


_IPC_PATTERNS = {name: fn(*_META[:k]) for name, (fn, k) in IPC_SCHEMES.items()}


def match_ipc_scheme(f: Formula) -> Optional[Tuple[str, Tuple[Formula, ...]]]:
    """First Hilbert scheme that ``f`` instantiates, with the instantiation."""
    for name, pat in _IPC_PATTERNS.items():
        b = match_pattern(pat, f)
        if b is not None:
            k = IPC_SCHEMES[name][1]
            return name, tuple(b[i] for i in range(k))
    return None


# ---------------------------------------------------------------------------
# Hilbert proofs

@dataclass(frozen=True)
class IpcAxiom:
    scheme: str
    instantiation: Tuple[Formula, ...]


@dataclass(frozen=True)
class Hypothesis:
    index: int


@dataclass(frozen=True)
class ModusPonens:
    """Cites line ``minor`` (proving A) and line ``major`` (proving A -> B); 1-based."""

    minor: int
    major: int


@dataclass(frozen=True)
class HilbertIPCProof:
    premises: Tuple[Formula, ...]
    lines: Tuple[Tuple[Formula, object], ...]

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1][0]

    def __len__(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    line: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "ok" if self.ok else f"line {self.line}: {self.reason}"


def _check_mp(lines, n: int, j) -> Optional[str]:
    if not (1 <= j.minor < n and 1 <= j.major < n):
        return f"MP cites line outside 1..{n - 1}"
    a = lines[j.minor - 1][0]
    ab = lines[j.major - 1][0]
    if not (isinstance(ab, Imp) and ab.left == a and ab.right == lines[n - 1][0]):
        return f"lines {j.minor} and {j.major} do not yield this formula by MP"
    return None


def check_hilbert_ipc(proof: HilbertIPCProof, premises: Sequence[Formula], goal: Formula) -> CheckResult:
    """Check every line of an A1-A9 + MP derivation of ``goal`` from ``premises``."""
    lines = proof.lines
    if not lines:
        return CheckResult(False, 0, "empty proof")
    for n, (f, j) in enumerate(lines, start=1):
        if not is_propositional(f):
            return CheckResult(False, n, "formula contains a box")
        if isinstance(j, IpcAxiom):
            entry = IPC_SCHEMES.get(j.scheme)
            if entry is None or len(j.instantiation) != entry[1]:
                return CheckResult(False, n, f"unknown scheme {j.scheme}")
            if entry[0](*j.instantiation) != f:
                return CheckResult(False, n, f"not an instance of {j.scheme}")
        elif isinstance(j, Hypothesis):
            if not (0 <= j.index < len(premises)) or premises[j.index] != f:
                return CheckResult(False, n, f"hypothesis {j.index} does not match")
        elif isinstance(j, ModusPonens):
            err = _check_mp(lines, n, j)
            if err:
                return CheckResult(False, n, err)
        else:
            return CheckResult(False, n, f"unknown justification {j!r}")
    if lines[-1][0] != goal:
        return CheckResult(False, len(lines), "last line is not the goal")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# Kripke models

@dataclass(frozen=True)
class KripkeModel:
    """Finite rooted intuitionistic Kripke model on worlds ``0..n-1``.

    ``up[w]`` is the set of worlds above ``w`` (reflexive, transitive);
    ``valuation[w]`` the set of variable indices true at ``w``.
    """

    up: Tuple[FrozenSet[int], ...]
    valuation: Tuple[FrozenSet[int], ...]
    root: int = 0

    @property
    def size(self) -> int:
        return len(self.up)

    def leq(self, w: int, v: int) -> bool:
        return v in self.up[w]

    def validate(self) -> Optional[str]:
        n = self.size
        if len(self.valuation) != n or not (0 <= self.root < n):
            return "shape mismatch"
        for w in range(n):
            if w not in self.up[w]:
                return f"order not reflexive at {w}"
            for v in self.up[w]:
                if not self.up[v] <= self.up[w]:
                    return f"order not transitive at {w}<={v}"
                if v != w and w in self.up[v]:
                    return f"order not antisymmetric at {w},{v}"
                if not self.valuation[w] <= self.valuation[v]:
                    return f"valuation not monotone at {w}<={v}"
        if len(self.up[self.root]) != n:
            return "root is not below every world"
        return None


def forcing_set(K: KripkeModel, f: Formula, _memo=None) -> FrozenSet[int]:
    """Set of worlds forcing the propositional formula ``f``."""
    memo = {} if _memo is None else _memo
    r = memo.get(f)
    if r is not None:
        return r
    n = K.size
    if isinstance(f, Bot):
        r = frozenset()
    elif isinstance(f, Atom):
        r = frozenset(w for w in range(n) if f.index in K.valuation[w])
    elif isinstance(f, And):
        r = forcing_set(K, f.left, memo) & forcing_set(K, f.right, memo)
    elif isinstance(f, Or):
        r = forcing_set(K, f.left, memo) | forcing_set(K, f.right, memo)
    elif isinstance(f, Imp):
        a = forcing_set(K, f.left, memo)
        b = forcing_set(K, f.right, memo)
        r = frozenset(w for w in range(n) if all(v not in a or v in b for v in K.up[w]))
    else:
        raise ValueError("Kripke forcing is defined for propositional formulas only")
    memo[f] = r
    return r


def kripke_eval(K: KripkeModel, w: int, f: Formula) -> bool:
    return w in forcing_set(K, f)


@dataclass(frozen=True)
class _CTree:
    atoms: FrozenSet[int]
    children: Tuple["_CTree", ...] = ()


def _flatten(tree: _CTree) -> KripkeModel:
    vals: List[FrozenSet[int]] = []
    ups: List[set] = []

    def go(t: _CTree) -> List[int]:
        w = len(vals)
        vals.append(t.atoms)
        ups.append({w})
        below = [w]
        for c in t.children:
            sub = go(c)
            ups[w].update(sub)
            below.extend(sub)
        return below

    go(tree)
    return KripkeModel(tuple(frozenset(u) for u in ups), tuple(vals), 0)


# ---------------------------------------------------------------------------
# proof terms

class Term:
    """Typed natural-deduction proof term; ``type`` is the proved formula."""

    __slots__ = ("type", "fv")


NDTerm = Term  # natural-deduction proof terms


class TVar(Term):
    __slots__ = ("ident",)

    def __init__(self, ident: int, type_: Formula):
        self.ident, self.type, self.fv = ident, type_, frozenset((ident,))

    def __repr__(self):
        return f"v{self.ident}"


class THyp(Term):
    """Reference to premise number ``index``."""

    __slots__ = ("index",)

    def __init__(self, index: int, type_: Formula):
        self.index, self.type, self.fv = index, type_, frozenset()

    def __repr__(self):
        return f"h{self.index}"


class Lam(Term):
    __slots__ = ("var", "body")

    def __init__(self, var: TVar, body: Term):
        self.var, self.body = var, body
        self.type = Imp(var.type, body.type)
        self.fv = body.fv - var.fv

    def __repr__(self):
        return f"(\\{self.var!r}. {self.body!r})"


class App(Term):
    __slots__ = ("fn", "arg")

    def __init__(self, fn: Term, arg: Term):
        if not (isinstance(fn.type, Imp) and fn.type.left == arg.type):
            raise TypeError(f"cannot apply {to_text(fn.type)} to {to_text(arg.type)}")
        self.fn, self.arg = fn, arg
        self.type = fn.type.right
        self.fv = fn.fv | arg.fv

    def __repr__(self):
        return f"({self.fn!r} {self.arg!r})"


class Pair(Term):
    __slots__ = ("a", "b")

    def __init__(self, a: Term, b: Term):
        self.a, self.b = a, b
        self.type = And(a.type, b.type)
        self.fv = a.fv | b.fv


class Fst(Term):
    __slots__ = ("t",)

    def __init__(self, t: Term):
        if not isinstance(t.type, And):
            raise TypeError("fst of a non-conjunction")
        self.t, self.type, self.fv = t, t.type.left, t.fv


class Snd(Term):
    __slots__ = ("t",)

    def __init__(self, t: Term):
        if not isinstance(t.type, And):
            raise TypeError("snd of a non-conjunction")
        self.t, self.type, self.fv = t, t.type.right, t.fv


class Inl(Term):
    __slots__ = ("t",)

    def __init__(self, t: Term, other: Formula):
        self.t, self.type, self.fv = t, Or(t.type, other), t.fv


class Inr(Term):
    __slots__ = ("t",)

    def __init__(self, other: Formula, t: Term):
        self.t, self.type, self.fv = t, Or(other, t.type), t.fv


class Case(Term):
    __slots__ = ("t", "x", "left", "y", "right")

    def __init__(self, t: Term, x: TVar, left: Term, y: TVar, right: Term):
        if not (isinstance(t.type, Or) and t.type.left == x.type and t.type.right == y.type):
            raise TypeError("case scrutinee does not match binders")
        if left.type != right.type:
            raise TypeError("case branches disagree")
        self.t, self.x, self.left, self.y, self.right = t, x, left, y, right
        self.type = left.type
        self.fv = t.fv | (left.fv - x.fv) | (right.fv - y.fv)


class Abort(Term):
    __slots__ = ("t",)

    def __init__(self, t: Term, goal: Formula):
        if not isinstance(t.type, Bot):
            raise TypeError("abort of a non-falsum")
        self.t, self.type, self.fv = t, goal, t.fv


# ---------------------------------------------------------------------------
# G4ip search

class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class _Deriv:
    rule: str
    principal: Optional[Formula] = None
    subs: Tuple["_Deriv", ...] = ()


_Result = Union[_Deriv, _CTree]

# sequent -> (result, steps a memo-free search of it takes)
_MEMO: Dict[Tuple[FrozenSet[Formula], Formula], Tuple[_Result, int]] = {}
_MEMO_LIMIT = 2_000_000


def _search(gamma: FrozenSet[Formula], goal: Formula, budget: List[int]) -> _Result:
    # cached sequents are charged their original cost, so whether the budget
    # runs out never depends on what was searched before
    key = (gamma, goal)
    hit = _MEMO.get(key)
    if hit is not None:
        budget[0] -= hit[1]
        if budget[0] < 0:
            raise ResourceLimitError("proof search step budget exhausted")
        return hit[0]
    start = budget[0]
    budget[0] -= 1
    if budget[0] < 0:
        raise ResourceLimitError("proof search step budget exhausted")
    res = _search_step(gamma, goal, budget)
    if len(_MEMO) >= _MEMO_LIMIT:
        _MEMO.clear()
    _MEMO[key] = (res, start - budget[0])
    return res


def _search_step(gamma: FrozenSet[Formula], goal: Formula, budget) -> _Result:
    if BOT in gamma:
        return _Deriv("botL")
    if goal in gamma:
        return _Deriv("ax")
    if isinstance(goal, Imp):
        sub = _search(gamma | {goal.left}, goal.right, budget)
        return _Deriv("impR", None, (sub,)) if isinstance(sub, _Deriv) else sub
    if isinstance(goal, And):
        s1 = _search(gamma, goal.left, budget)
        if not isinstance(s1, _Deriv):
            return s1
        s2 = _search(gamma, goal.right, budget)
        if not isinstance(s2, _Deriv):
            return s2
        return _Deriv("andR", None, (s1, s2))

    ordered = sorted(gamma, key=sort_key)
    for f in ordered:
        if isinstance(f, And):
            sub = _search(gamma - {f} | {f.left, f.right}, goal, budget)
            return _Deriv("andL", f, (sub,)) if isinstance(sub, _Deriv) else sub
        if isinstance(f, Or):
            rest = gamma - {f}
            s1 = _search(rest | {f.left}, goal, budget)
            if not isinstance(s1, _Deriv):
                return s1
            s2 = _search(rest | {f.right}, goal, budget)
            if not isinstance(s2, _Deriv):
                return s2
            return _Deriv("orL", f, (s1, s2))
        if isinstance(f, Imp):
            a = f.left
            if isinstance(a, Bot):
                sub = _search(gamma - {f}, goal, budget)
                return _Deriv("dropL", f, (sub,)) if isinstance(sub, _Deriv) else sub
            if isinstance(a, Atom) and a in gamma:
                sub = _search(gamma - {f} | {f.right}, goal, budget)
                return _Deriv("atomImpL", f, (sub,)) if isinstance(sub, _Deriv) else sub
            if isinstance(a, And):
                sub = _search(gamma - {f} | {Imp(a.left, Imp(a.right, f.right))}, goal, budget)
                return _Deriv("andImpL", f, (sub,)) if isinstance(sub, _Deriv) else sub
            if isinstance(a, Or):
                sub = _search(gamma - {f} | {Imp(a.left, f.right), Imp(a.right, f.right)}, goal, budget)
                return _Deriv("orImpL", f, (sub,)) if isinstance(sub, _Deriv) else sub
        elif isinstance(f, Box):
            raise ValueError("ipc_prove accepts propositional formulas only")
    if isinstance(goal, Box):
        raise ValueError("ipc_prove accepts propositional formulas only")

    # irreducible sequent: only non-invertible choices remain
    children: List[_CTree] = []
    if isinstance(goal, Or):
        s1 = _search(gamma, goal.left, budget)
        if isinstance(s1, _Deriv):
            return _Deriv("orR1", None, (s1,))
        s2 = _search(gamma, goal.right, budget)
        if isinstance(s2, _Deriv):
            return _Deriv("orR2", None, (s2,))
        children.extend((s1, s2))
    for f in ordered:
        if isinstance(f, Imp) and isinstance(f.left, Imp):
            c, d, b = f.left.left, f.left.right, f.right
            rest = gamma - {f}
            left = _search(rest | {c, Imp(d, b)}, d, budget)
            if isinstance(left, _Deriv):
                right = _search(rest | {b}, goal, budget)
                if isinstance(right, _Deriv):
                    return _Deriv("impImpL", f, (left, right))
                # a countermodel of the right premise refutes this sequent too
                return right
            children.append(left)
    here = frozenset(f.index for f in gamma if isinstance(f, Atom))
    return _CTree(here, tuple(children))


class _TermBuilder:
    def __init__(self):
        self.counter = itertools.count()

    def fresh(self, ty: Formula) -> TVar:
        return TVar(next(self.counter), ty)

    def build(self, d: _Deriv, ctx: Dict[Formula, Term], goal: Formula) -> Term:
        r = d.rule
        if r == "ax":
            return ctx[goal]
        if r == "botL":
            return Abort(ctx[BOT], goal)
        if r == "impR":
            x = self.fresh(goal.left)
            ctx2 = ctx if goal.left in ctx else {**ctx, goal.left: x}
            return Lam(x, self.build(d.subs[0], ctx2, goal.right))
        if r == "andR":
            return Pair(self.build(d.subs[0], ctx, goal.left), self.build(d.subs[1], ctx, goal.right))
        if r == "orR1":
            return Inl(self.build(d.subs[0], ctx, goal.left), goal.right)
        if r == "orR2":
            return Inr(goal.left, self.build(d.subs[0], ctx, goal.right))

        f = d.principal
        t = ctx[f]
        rest = {k: v for k, v in ctx.items() if k != f}

        def extend(base, items):
            out = dict(base)
            for k, v in items:
                out.setdefault(k, v)
            return out

        if r == "andL":
            return self.build(d.subs[0], extend(rest, [(f.left, Fst(t)), (f.right, Snd(t))]), goal)
        if r == "orL":
            x, y = self.fresh(f.left), self.fresh(f.right)
            left = self.build(d.subs[0], extend(rest, [(f.left, x)]), goal)
            right = self.build(d.subs[1], extend(rest, [(f.right, y)]), goal)
            return Case(t, x, left, y, right)
        if r == "dropL":
            return self.build(d.subs[0], rest, goal)
        if r == "atomImpL":
            return self.build(d.subs[0], extend(rest, [(f.right, App(t, ctx[f.left]))]), goal)
        if r == "andImpL":
            c, e = f.left.left, f.left.right
            xc, xe = self.fresh(c), self.fresh(e)
            curried = Lam(xc, Lam(xe, App(t, Pair(xc, xe))))
            return self.build(d.subs[0], extend(rest, [(curried.type, curried)]), goal)
        if r == "orImpL":
            c, e = f.left.left, f.left.right
            xc, xe = self.fresh(c), self.fresh(e)
            g1 = Lam(xc, App(t, Inl(xc, e)))
            g2 = Lam(xe, App(t, Inr(c, xe)))
            return self.build(d.subs[0], extend(rest, [(g1.type, g1), (g2.type, g2)]), goal)
        if r == "impImpL":
            c, e, b = f.left.left, f.left.right, f.right
            xc, xe, xc2 = self.fresh(c), self.fresh(e), self.fresh(c)
            e_to_b = Lam(xe, App(t, Lam(xc2, xe)))
            s = self.build(d.subs[0], extend(rest, [(c, xc), (e_to_b.type, e_to_b)]), e)
            fn = Lam(xc, s)
            return self.build(d.subs[1], extend(rest, [(b, App(t, fn))]), goal)
        raise AssertionError(r)


# ---------------------------------------------------------------------------
# bracket abstraction

class _C:
    """Combinator expression node: axiom, hypothesis, variable or application."""

    __slots__ = ("kind", "formula", "fv", "data", "fn", "arg")

    def __init__(self, kind, formula, fv=frozenset(), data=None, fn=None, arg=None):
        self.kind, self.formula, self.fv = kind, formula, fv
        self.data, self.fn, self.arg = data, fn, arg


def _ax(name: str, *inst: Formula) -> _C:
    return _C("ax", IPC_SCHEMES[name][0](*inst), data=(name, inst))


def _app(fn: _C, arg: _C) -> _C:
    ft = fn.formula
    assert isinstance(ft, Imp) and ft.left == arg.formula, "ill-typed application"
    return _C("app", ft.right, fn.fv | arg.fv, fn=fn, arg=arg)


def _identity(a: Formula) -> _C:
    aa = Imp(a, a)
    return _app(_app(_ax("A2", a, aa, a), _ax("A1", a, aa)), _ax("A1", a, a))


def _abstract(x: TVar, e: _C, memo: Dict) -> _C:
    key = (x.ident, id(e))
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    a = x.type
    if x.ident not in e.fv:
        out = _app(_ax("A1", e.formula, a), e)
    elif e.kind == "var":
        out = _identity(a)
    else:
        fn, arg = e.fn, e.arg
        if arg.kind == "var" and arg.data == x.ident and x.ident not in fn.fv:
            out = fn
        else:
            c, b = fn.formula.left, fn.formula.right
            out = _app(_app(_ax("A2", a, c, b), _abstract(x, fn, memo)), _abstract(x, arg, memo))
    memo[key] = (e, out)  # keep e alive so id() stays unique
    return out


def _to_comb(t: Term, memo: Dict) -> _C:
    if isinstance(t, TVar):
        return _C("var", t.type, t.fv, data=t.ident)
    if isinstance(t, THyp):
        return _C("hyp", t.type, data=t.index)
    if isinstance(t, Lam):
        return _abstract(t.var, _to_comb(t.body, memo), memo)
    if isinstance(t, App):
        return _app(_to_comb(t.fn, memo), _to_comb(t.arg, memo))
    if isinstance(t, Pair):
        return _app(_app(_ax("A5", t.a.type, t.b.type), _to_comb(t.a, memo)), _to_comb(t.b, memo))
    if isinstance(t, Fst):
        ty = t.t.type
        return _app(_ax("A3", ty.left, ty.right), _to_comb(t.t, memo))
    if isinstance(t, Snd):
        ty = t.t.type
        return _app(_ax("A4", ty.left, ty.right), _to_comb(t.t, memo))
    if isinstance(t, Inl):
        return _app(_ax("A6", t.type.left, t.type.right), _to_comb(t.t, memo))
    if isinstance(t, Inr):
        return _app(_ax("A7", t.type.left, t.type.right), _to_comb(t.t, memo))
    if isinstance(t, Case):
        ty = t.t.type
        l = _abstract(t.x, _to_comb(t.left, memo), memo)
        r = _abstract(t.y, _to_comb(t.right, memo), memo)
        return _app(_app(_app(_ax("A8", ty.left, ty.right, t.type), l), r), _to_comb(t.t, memo))
    if isinstance(t, Abort):
        return _app(_ax("A9", t.type), _to_comb(t.t, memo))
    raise TypeError(f"not a proof term: {t!r}")


def compile_to_hilbert(term: Term, premises: Sequence[Formula] = ()) -> HilbertIPCProof:
    """Translate a closed-up-to-premises proof term into an A1-A9 + MP derivation."""
    if term.fv:
        raise ValueError("term has free variables")
    root = _to_comb(term, {})
    lines: List[Tuple[Formula, object]] = []
    line_of: Dict[Formula, int] = {}
    stack = [(root, False)]
    while stack:
        e, expanded = stack.pop()
        if e.formula in line_of:
            continue
        if e.kind == "app" and not expanded:
            stack.append((e, True))
            stack.append((e.fn, False))
            stack.append((e.arg, False))
            continue
        if e.kind == "ax":
            j = IpcAxiom(*e.data)
        elif e.kind == "hyp":
            j = Hypothesis(e.data)
        elif e.kind == "app":
            j = ModusPonens(line_of[e.arg.formula], line_of[e.fn.formula])
        else:
            raise ValueError("free variable survived abstraction")
        lines.append((e.formula, j))
        line_of[e.formula] = len(lines)
    if lines[-1][0] != root.formula:
        # the conclusion was already proved as an intermediate step; repeat it
        lines.append(lines[line_of[root.formula] - 1])
    return HilbertIPCProof(tuple(premises), tuple(lines))


# ---------------------------------------------------------------------------
# public decision procedure

@dataclass(frozen=True)
class Sequent:
    premises: Tuple[Formula, ...]
    goal: Formula


@dataclass(frozen=True)
class Provable:
    proof: HilbertIPCProof
    term: Term = field(repr=False, compare=False)


@dataclass(frozen=True)
class Refutable:
    model: KripkeModel


DEFAULT_BUDGET = 200_000


def _check_input(premises, goal):
    for f in (*premises, goal):
        if not is_propositional(f):
            raise ValueError(f"not propositional: {to_text(f)}")


def ipc_provable(premises: Sequence[Formula], goal: Formula, budget: int = DEFAULT_BUDGET) -> bool:
    """Decision only, without building evidence."""
    _check_input(premises, goal)
    return isinstance(_search(frozenset(premises), goal, [budget]), _Deriv)


def ipc_prove(premises: Sequence[Formula], goal: Formula, budget: int = DEFAULT_BUDGET):
    """Decide ``premises |-IPC goal``.

    Returns :class:`Provable` with a Hilbert derivation, or :class:`Refutable`
    with a rooted Kripke model whose root forces every premise and not the goal.
    Raises :class:`ResourceLimitError` when the search exceeds ``budget`` steps.
    """
    premises = tuple(premises)
    _check_input(premises, goal)
    res = _search(frozenset(premises), goal, [budget])
    if isinstance(res, _CTree):
        return Refutable(_flatten(res))
    ctx: Dict[Formula, Term] = {}
    for i, f in enumerate(premises):
        ctx.setdefault(f, THyp(i, f))
    term = _TermBuilder().build(res, ctx, goal)
    return Provable(compile_to_hilbert(term, premises), term)


# ---------------------------------------------------------------------------
# classical logic

def _truth_mask(f: Formula, env: Dict[int, int], full: int) -> int:
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Atom):
        return env[f.index]
    if isinstance(f, Box):
        raise ValueError("truth tables are defined for propositional formulas only")
    a = _truth_mask(f.left, env, full)
    b = _truth_mask(f.right, env, full)
    if isinstance(f, And):
        return a & b
    if isinstance(f, Or):
        return a | b
    return (full & ~a) | b


def _table(f: Formula):
    vs = sorted(atoms(f))
    rows = 1 << len(vs)
    full = (1 << rows) - 1
    env = {}
    for k, v in enumerate(vs):
        # row r assigns variable k the bit k of r
        env[v] = sum(1 << r for r in range(rows) if (r >> k) & 1)
    return vs, rows, _truth_mask(f, env, full)


def cpc_valid(f: Formula) -> bool:
    """True iff ``f`` holds under every two-valued assignment of its variables."""
    vs, rows, mask = _table(f)
    return mask == (1 << rows) - 1


def falsifying_valuation(f: Formula) -> Optional[Dict[int, bool]]:
    """The first row (in binary counting order) making ``f`` false, if any."""
    vs, rows, mask = _table(f)
    for r in range(rows):
        if not (mask >> r) & 1:
            return {v: bool((r >> k) & 1) for k, v in enumerate(vs)}
    return None


def atom_em_reduction(f: Formula) -> Formula:
    """``(x1 \\/ ~x1) /\\ ... -> f`` over the variables of a classical tautology ``f``."""
    if not cpc_valid(f):
        raise ValueError(f"not a classical tautology: {to_text(f)}")
    ems = [Or(Atom(i), Neg(Atom(i))) for i in sorted(atoms(f))]
    return Imp(conj(ems), f)
