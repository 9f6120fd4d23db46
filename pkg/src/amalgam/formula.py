"""Formulas of the modal language and its box-free fragment.

Only six constructors exist: ``Bot``, ``Atom``, ``Imp``, ``Or``, ``And`` and
``Box``.  Negation, verum, the biconditional and strict equivalence are
abbreviations that expand into those constructors as soon as they are built.

Text syntax (ASCII)::

    p, q, r, x0, x1, ...    atoms (p, q, r are x0, x1, x2)
    bot                     falsum
    ~A   []A                negation, box (tightest)
    A /\\ B                  conjunction
    A \\/ B                  disjunction
    A -> B                  implication
    A <-> B   A == B        biconditional, strict equivalence (loosest)

All binary connectives associate to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple, Union

__all__ = [
    "Formula", "Bot", "Atom", "Imp", "Or", "And", "Box", "BOT", "TOP",
    "Neg", "Iff", "Equiv", "P", "Q", "R", "var",
    "ParseError", "parse", "to_text", "substitute", "substitute_many",
    "Skeleton", "skeleton", "is_propositional", "as_propositional",
    "atoms", "size", "subformulas", "enumerate_formulas", "conj", "max_index",
]

# constructor tags; kept as ints so hashes do not depend on PYTHONHASHSEED
_BOT, _ATOM, _IMP, _OR, _AND, _BOX = range(6)


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()
    tag: int

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"<{to_text(self)}>"

    def __lt__(self, other: "Formula") -> bool:
        return sort_key(self) < sort_key(other)


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class Bot(Formula):
    tag = _BOT

    def __hash__(self) -> int:
        return 0x5EED

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Bot)


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class Atom(Formula):
    """A propositional variable ``x_index``."""

    index: int
    tag = _ATOM

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("variable index must be non-negative")

    def __hash__(self) -> int:
        return hash((_ATOM, self.index))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Atom) and other.index == self.index


class _Binary(Formula):
    __slots__ = ()
    left: Formula
    right: Formula
    _hash: int

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            type(other) is type(self)
            and other._hash == self._hash
            and other.left == self.left
            and other.right == self.right
        )

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.tag, hash(self.left), hash(self.right))))


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class Imp(_Binary):
    left: Formula
    right: Formula
    _hash: int = field(init=False, compare=False)
    tag = _IMP


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class Or(_Binary):
    left: Formula
    right: Formula
    _hash: int = field(init=False, compare=False)
    tag = _OR


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class And(_Binary):
    left: Formula
    right: Formula
    _hash: int = field(init=False, compare=False)
    tag = _AND


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class Box(Formula):
    body: Formula
    _hash: int = field(init=False, compare=False)
    tag = _BOX

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((_BOX, hash(self.body))))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Box) and other._hash == self._hash and other.body == self.body


BOT = Bot()
P, Q, R = Atom(0), Atom(1), Atom(2)

# a variable is an atom; a propositional formula is a Formula without Box
Var = Atom
PropositionalFormula = Formula


def var(i: int) -> Atom:
    return Atom(i)


def Neg(a: Formula) -> Formula:
    return Imp(a, BOT)


TOP = Imp(BOT, BOT)


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


def Equiv(a: Formula, b: Formula) -> Formula:
    """Strict equivalence, the identity connective: [](a->b) /\\ [](b->a)."""
    return And(Box(Imp(a, b)), Box(Imp(b, a)))


def conj(items: Sequence[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is verum."""
    if not items:
        return TOP
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


# ---------------------------------------------------------------------------
# printing

_PREC = {_IMP: 1, _OR: 2, _AND: 3}
_SYM = {_IMP: "->", _OR: "\\/", _AND: "/\\"}


def atom_name(index: int) -> str:
    return "pqr"[index] if index < 3 else f"x{index}"


@lru_cache(maxsize=1 << 18)
def to_text(f: Formula) -> str:
    """Render ``f`` with the fewest parentheses that still parse back to ``f``."""
    t = f.tag
    if t == _BOT:
        return "bot"
    if t == _ATOM:
        return atom_name(f.index)
    if t == _BOX:
        return "[]" + _wrap(f.body, 4)
    p = _PREC[t]
    # right associative: the left operand needs parens at equal precedence
    return f"{_wrap(f.left, p + 1)} {_SYM[t]} {_wrap(f.right, p)}"


def _wrap(f: Formula, ctx: int) -> str:
    s = to_text(f)
    p = _PREC.get(f.tag)
    return f"({s})" if p is not None and p < ctx else s


@lru_cache(maxsize=1 << 18)
def sort_key(f: Formula) -> Tuple[int, str]:
    return (size(f), to_text(f))


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(<->|->|==|/\\|\\/|\[\]|~|\(|\))|(bot)\b|(x\d+|[pqr])\b)")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else (m.start(2) if m.group(2) else m.start(3))
        if m.group(1):
            out.append(("op", m.group(1), start))
        elif m.group(2):
            out.append(("bot", "bot", start))
        else:
            out.append(("atom", m.group(3), start))
        pos = m.end()
    out.append(("eof", "", n))
    return out


class _Parser:
    # precedence climbing, all binary levels right associative
    _LEVELS = [("<->", "=="), ("->",), ("\\/",), ("/\\",)]

    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def level(self, k: int) -> Formula:
        if k == len(self._LEVELS):
            return self.unary()
        left = self.level(k + 1)
        kind, val, _ = self.peek()
        if kind == "op" and val in self._LEVELS[k]:
            self.take()
            right = self.level(k)
            return _combine(val, left, right)
        return left

    def unary(self) -> Formula:
        kind, val, pos = self.take()
        if kind == "op" and val == "~":
            return Neg(self.unary())
        if kind == "op" and val == "[]":
            return Box(self.unary())
        if kind == "op" and val == "(":
            inner = self.level(0)
            k2, v2, p2 = self.take()
            if v2 != ")":
                raise ParseError("expected ')'", p2)
            return inner
        if kind == "bot":
            return BOT
        if kind == "atom":
            return Atom(("pqr".index(val)) if val in "pqr" else int(val[1:]))
        raise ParseError("expected a formula" if kind == "eof" else f"unexpected {val!r}", pos)


def _combine(op: str, a: Formula, b: Formula) -> Formula:
    if op == "->":
        return Imp(a, b)
    if op == "\\/":
        return Or(a, b)
    if op == "/\\":
        return And(a, b)
    if op == "<->":
        return Iff(a, b)
    return Equiv(a, b)


def parse(text: str) -> Formula:
    """Parse ``text``; raises :class:`ParseError` with a character offset."""
    p = _Parser(text)
    f = p.level(0)
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {val!r}", pos)
    return f


# ---------------------------------------------------------------------------
# structure

def size(f: Formula) -> int:
    """Node count, with ``A -> bot`` counted as a single negation node."""
    t = f.tag
    if t <= _ATOM:
        return 1
    if t == _BOX:
        return 1 + size(f.body)
    if t == _IMP and f.right.tag == _BOT:
        return 1 + size(f.left)
    return 1 + size(f.left) + size(f.right)


def atoms(f: Formula) -> frozenset:
    """Set of variable indices occurring in ``f``."""
    return _atoms(f)


@lru_cache(maxsize=1 << 16)
def _atoms(f: Formula) -> frozenset:
    t = f.tag
    if t == _BOT:
        return frozenset()
    if t == _ATOM:
        return frozenset((f.index,))
    if t == _BOX:
        return _atoms(f.body)
    return _atoms(f.left) | _atoms(f.right)


def max_index(fs: Iterable[Formula]) -> int:
    return max((i for f in fs for i in atoms(f)), default=-1)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    t = f.tag
    if t == _BOX:
        yield from subformulas(f.body)
    elif t > _ATOM:
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def is_propositional(f: Formula) -> bool:
    """True iff ``f`` contains no box."""
    return _box_free(f)


@lru_cache(maxsize=1 << 16)
def _box_free(f: Formula) -> bool:
    t = f.tag
    if t <= _ATOM:
        return True
    if t == _BOX:
        return False
    return _box_free(f.left) and _box_free(f.right)


def as_propositional(f: Formula) -> Formula:
    if not is_propositional(f):
        raise ValueError(f"not a propositional formula: {to_text(f)}")
    return f


def substitute(f: Formula, x: Union[Atom, int], g: Formula) -> Formula:
    """``f[x:=g]``."""
    i = x.index if isinstance(x, Atom) else x
    return substitute_many(f, {i: g})


def substitute_many(f: Formula, mapping: Dict[int, Formula]) -> Formula:
    """Simultaneous substitution of variable indices by formulas."""
    memo: Dict[Formula, Formula] = {}

    def go(h: Formula) -> Formula:
        t = h.tag
        if t == _BOT:
            return h
        if t == _ATOM:
            return mapping.get(h.index, h)
        r = memo.get(h)
        if r is not None:
            return r
        if t == _BOX:
            body = go(h.body)
            r = h if body is h.body else Box(body)
        else:
            a, b = go(h.left), go(h.right)
            r = h if (a is h.left and b is h.right) else type(h)(a, b)
        memo[h] = r
        return r

    return go(f)


# ---------------------------------------------------------------------------
# skeletons

@dataclass(frozen=True)
class Skeleton:
    """Box-free body plus the map from fresh atoms to the boxes they replace."""

    body: Formula
    abstraction: Tuple[Tuple[Atom, Formula], ...]

    def resubstitute(self) -> Formula:
        return substitute_many(self.body, {a.index: g for a, g in self.abstraction})


def skeleton(f: Formula) -> Skeleton:
    """Abstract every maximal boxed subformula by a fresh atom.

    Fresh atoms are numbered from one past the largest index in ``f``, in
    left-to-right order of first occurrence, so the body is canonical.
    """
    return _skeleton(f)


@lru_cache(maxsize=1 << 16)
def _skeleton(f: Formula) -> Skeleton:
    nxt = [max_index((f,)) + 1]
    table: Dict[Formula, Atom] = {}

    def go(h: Formula) -> Formula:
        t = h.tag
        if t <= _ATOM:
            return h
        if t == _BOX:
            a = table.get(h)
            if a is None:
                a = table[h] = Atom(nxt[0])
                nxt[0] += 1
            return a
        a, b = go(h.left), go(h.right)
        return h if (a is h.left and b is h.right) else type(h)(a, b)

    body = go(f)
    return Skeleton(body, tuple((a, g) for g, a in table.items()))


# ---------------------------------------------------------------------------
# enumeration

def enumerate_formulas(
    variables: Sequence[Formula],
    max_size: int,
    modal: bool = False,
    with_bot: bool = True,
) -> List[Formula]:
    """Every formula of size <= ``max_size`` over ``variables``, without duplicates.

    Leaves are the variables (and ``bot``); unary nodes are negation (and box
    when ``modal``); binary nodes are ->, \\/ and /\\.  An implication whose
    consequent is ``bot`` is produced only as a negation.  Output order is
    deterministic: by size, then by construction order.
    """
    by_size: List[List[Formula]] = [[]]
    leaves = list(variables) + ([BOT] if with_bot else [])
    for n in range(1, max_size + 1):
        level: List[Formula] = []
        if n == 1:
            level.extend(leaves)
        else:
            for a in by_size[n - 1]:
                level.append(Neg(a))
                if modal:
                    level.append(Box(a))
            for i in range(1, n - 1):
                j = n - 1 - i
                for a in by_size[i]:
                    for b in by_size[j]:
                        if b.tag != _BOT:
                            level.append(Imp(a, b))
                        level.append(Or(a, b))
                        level.append(And(a, b))
        by_size.append(level)
    return [f for level in by_size for f in level]
