"""Finite Heyting algebras and the modal models built on them.

Algebras are represented by operation tables over the carrier ``0..n-1``.
Every finite Heyting algebra is the lattice of downsets of a finite poset, so
enumeration runs over posets and isomorphism is decided on the poset side.

A model adds an ultrafilter ``true`` (the true propositions) and a box table
satisfying, for all m, m', m'':

    (i)   box(m) <= m
    (ii)  box(m -> m') <= box(m' -> m'') -> box(m -> m'')
    (iii) box(m \\/ m') <= box(m) \\/ box(m')
    (iv)  box(m) in true  iff  m is top
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .formula import And, Atom, Bot, Box, Formula, Imp

__all__ = [
    "FinitePoset", "FiniteHeytingAlgebra", "Filter", "LModel", "ModelCheck",
    "heyting_from_poset", "enumerate_posets", "enumerate_heyting", "boolean_algebra",
    "chain", "is_filter", "is_prime_filter", "enumerate_filters", "enumerate_ultrafilters",
    "has_disjunction_property", "is_boolean", "trivial_box", "check_model_conditions",
    "enumerate_modal_ops", "enumerate_models", "eval_formula", "eval_vector",
    "satisfies", "two_element_model_of", "all_assignments",
]

MAX_ALGEBRA_SIZE = 8
MAX_MODAL_OP_SIZE = 6


@dataclass(frozen=True)
class FinitePoset:
    """Partial order on ``0..size-1``; ``leq[i][j]`` means i <= j."""

    size: int
    leq: Tuple[Tuple[bool, ...], ...]

    def validate(self) -> Optional[str]:
        n, le = self.size, self.leq
        if len(le) != n or any(len(row) != n for row in le):
            return "table shape"
        for i in range(n):
            if not le[i][i]:
                return f"not reflexive at {i}"
            for j in range(n):
                if i != j and le[i][j] and le[j][i]:
                    return f"not antisymmetric at {i},{j}"
                for k in range(n):
                    if le[i][j] and le[j][k] and not le[i][k]:
                        return f"not transitive at {i},{j},{k}"
        return None

    def downsets(self) -> List[int]:
        """All downsets as bitmasks, ordered by size then value."""
        n = self.size
        below = [sum(1 << j for j in range(n) if self.leq[j][i]) for i in range(n)]
        out = [m for m in range(1 << n) if all(below[i] & ~m == 0 for i in range(n) if m >> i & 1)]
        return sorted(out, key=lambda m: (bin(m).count("1"), m))


class FiniteHeytingAlgebra:
    """Carrier ``0..n-1`` with meet, join and implication tables.

    ``labels`` optionally names each element (e.g. the downset it stands for).
    The order is recovered from the meet table.
    """

    def __init__(self, meet, join, imp, bot: int, top: int, labels: Optional[Sequence] = None):
        self.meet = np.asarray(meet, dtype=np.int64)
        self.join = np.asarray(join, dtype=np.int64)
        self.imp = np.asarray(imp, dtype=np.int64)
        self.n = int(self.meet.shape[0])
        self.bot, self.top = int(bot), int(top)
        self.labels = tuple(labels) if labels is not None else None
        idx = np.arange(self.n)
        self.leq = self.meet == idx[:, None]
        self.neg = self.imp[:, self.bot].copy()
        # plain-list copies for fast scalar lookups
        self._meet = self.meet.tolist()
        self._join = self.join.tolist()
        self._imp = self.imp.tolist()

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"FiniteHeytingAlgebra(n={self.n})"

    def le(self, a: int, b: int) -> bool:
        return self._meet[a][b] == a

    def validate(self) -> Optional[str]:
        """Check bounded-lattice laws and residuation exhaustively."""
        n, M, J, I, le = self.n, self.meet, self.join, self.imp, self.leq
        e = np.arange(n)
        a, b = e[:, None], e[None, :]
        if not (M == M.T).all() or not (J == J.T).all():
            return "meet/join not commutative"
        if not (M[e, e] == e).all() or not (J[e, e] == e).all():
            return "meet/join not idempotent"
        if not (M[a, J[a, b]] == a).all() or not (J[a, M[a, b]] == a).all():
            return "absorption fails"
        x, y, z = e[:, None, None], e[None, :, None], e[None, None, :]
        if not (M[M[x, y], z] == M[x, M[y, z]]).all() or not (J[J[x, y], z] == J[x, J[y, z]]).all():
            return "meet/join not associative"
        if not (M[self.bot] == self.bot).all() or not (J[self.top] == self.top).all():
            return "bounds wrong"
        # meet(x, z) <= y  iff  z <= imp(x, y)
        if not (le[M[x, z], y] == le[z, I[x, y]]).all():
            return "residuation fails"
        return None


def heyting_from_poset(P: FinitePoset) -> FiniteHeytingAlgebra:
    """Lattice of downsets of ``P`` under inclusion."""
    downs = P.downsets()
    index = {m: i for i, m in enumerate(downs)}
    full = (1 << P.size) - 1
    below = [sum(1 << j for j in range(P.size) if P.leq[j][i]) for i in range(P.size)]

    def interior(s: int) -> int:
        return sum(1 << i for i in range(P.size) if below[i] & ~s == 0)

    meet = [[index[a & b] for b in downs] for a in downs]
    join = [[index[a | b] for b in downs] for a in downs]
    imp = [[index[interior((full & ~a) | b)] for b in downs] for a in downs]
    labels = [frozenset(i for i in range(P.size) if m >> i & 1) for m in downs]
    return FiniteHeytingAlgebra(meet, join, imp, index[0], index[full], labels)


def _canonical(n: int, rel: FrozenSet[Tuple[int, int]]) -> Tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted((perm[i], perm[j]) for i, j in rel))
        if best is None or key < best:
            best = key
    return (n, best)


def _poset_from_rel(n: int, rel) -> FinitePoset:
    return FinitePoset(n, tuple(tuple(i == j or (i, j) in rel for j in range(n)) for i in range(n)))


def enumerate_posets(max_downsets: int) -> List[FinitePoset]:
    """Non-isomorphic posets with at most ``max_downsets`` downsets.

    Posets grow by adding a new maximal element above a downset; the downset
    count never drops, which bounds the search.
    """
    seen = {}
    frontier = [(0, frozenset())]
    seen[_canonical(0, frozenset())] = (0, frozenset())
    while frontier:
        nxt = []
        for n, rel in frontier:
            P = _poset_from_rel(n, rel)
            for d in P.downsets():
                new = set(rel)
                new.update((i, n) for i in range(n) if d >> i & 1)
                new_rel = frozenset(new)
                Q = _poset_from_rel(n + 1, new_rel)
                if len(Q.downsets()) > max_downsets:
                    continue
                key = _canonical(n + 1, new_rel)
                if key not in seen:
                    seen[key] = (n + 1, new_rel)
                    nxt.append((n + 1, new_rel))
        frontier = nxt
    out = [_poset_from_rel(n, rel) for key, (n, rel) in sorted(seen.items())]
    return out


def enumerate_heyting(max_size: int, bound: int = MAX_ALGEBRA_SIZE) -> List[FiniteHeytingAlgebra]:
    """All Heyting algebras with at most ``max_size`` elements, up to isomorphism."""
    if max_size > bound:
        raise ValueError(f"algebra size {max_size} exceeds the configured bound {bound}")
    algs = [heyting_from_poset(P) for P in enumerate_posets(max_size)]
    return sorted(algs, key=lambda H: H.n)


def chain(n: int) -> FiniteHeytingAlgebra:
    """The ``n``-element chain (downsets of an ``n-1``-element chain)."""
    k = n - 1
    return heyting_from_poset(FinitePoset(k, tuple(tuple(i <= j for j in range(k)) for i in range(k))))


def boolean_algebra(k: int) -> FiniteHeytingAlgebra:
    """Powerset of a ``k``-element set (downsets of an antichain)."""
    return heyting_from_poset(FinitePoset(k, tuple(tuple(i == j for j in range(k)) for i in range(k))))


# ---------------------------------------------------------------------------
# filters

@dataclass(frozen=True)
class Filter:
    members: FrozenSet[int]
    prime: bool = False
    ultra: bool = False

    def __contains__(self, m: int) -> bool:
        return m in self.members


def is_filter(H: FiniteHeytingAlgebra, s) -> bool:
    s = frozenset(s)
    if not s or H.bot in s:
        return False
    for a in s:
        for b in range(H.n):
            if H.le(a, b) and b not in s:
                return False
        for b in s:
            if H._meet[a][b] not in s:
                return False
    return True


def is_prime_filter(H: FiniteHeytingAlgebra, s) -> bool:
    s = frozenset(s)
    return is_filter(H, s) and all(
        a in s or b in s for a in range(H.n) for b in range(H.n) if H._join[a][b] in s
    )


def enumerate_filters(H: FiniteHeytingAlgebra) -> List[FrozenSet[int]]:
    """All filters; in a finite lattice each is the principal filter of its meet."""
    out = []
    for a in range(H.n):
        if a != H.bot:
            out.append(frozenset(b for b in range(H.n) if H.le(a, b)))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def enumerate_ultrafilters(H: FiniteHeytingAlgebra) -> List[Filter]:
    """Maximal filters, each flagged prime and ultra."""
    fs = enumerate_filters(H)
    maximal = [f for f in fs if not any(f < g for g in fs)]
    return [Filter(f, prime=True, ultra=True) for f in maximal]


def has_disjunction_property(H: FiniteHeytingAlgebra) -> bool:
    """Is ``{top}`` a prime filter, i.e. a join is top only if a joinand is?"""
    t = H.top
    return all(a == t or b == t for a in range(H.n) for b in range(H.n) if H._join[a][b] == t)


def is_boolean(H: FiniteHeytingAlgebra) -> bool:
    e = np.arange(H.n)
    return bool((H.imp == H.join[H.neg[:, None], e[None, :]]).all())


# ---------------------------------------------------------------------------
# modal operations and models

def trivial_box(H: FiniteHeytingAlgebra) -> Tuple[int, ...]:
    """Box that sends top to top and everything else to bottom."""
    return tuple(H.top if m == H.top else H.bot for m in range(H.n))


@dataclass(frozen=True)
class ModelCheck:
    ok: bool
    condition: str = ""
    witness: Tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def check_model_conditions(H: FiniteHeytingAlgebra, true, box: Sequence[int]) -> ModelCheck:
    """Verify the ultrafilter and conditions (i)-(iv), reporting the first failure."""
    true = frozenset(true)
    n = H.n
    if len(box) != n or any(not 0 <= v < n for v in box):
        return ModelCheck(False, "box table shape")
    if not is_filter(H, true):
        return ModelCheck(False, "TRUE is not a filter")
    if any(true < f for f in enumerate_filters(H)):
        return ModelCheck(False, "TRUE is not maximal")
    f = np.asarray(box, dtype=np.int64)
    le, I, J = H.leq, H.imp, H.join
    for m in range(n):
        if not le[f[m], m]:
            return ModelCheck(False, "(i)", (m,))
    X = f[I]  # X[a, b] = box(a -> b)
    lhs = X[:, :, None]                       # box(m -> m') over (m, m', m'')
    rhs = I[X[None, :, :], X[:, None, :]]     # box(m' -> m'') -> box(m -> m'')
    bad = np.argwhere(~le[np.broadcast_to(lhs, rhs.shape), rhs])
    if len(bad):
        return ModelCheck(False, "(ii)", tuple(int(v) for v in bad[0]))
    bad = np.argwhere(~le[f[J], J[f[:, None], f[None, :]]])
    if len(bad):
        return ModelCheck(False, "(iii)", tuple(int(v) for v in bad[0]))
    for m in range(n):
        if (int(f[m]) in true) != (m == H.top):
            return ModelCheck(False, "(iv)", (m,))
    return ModelCheck(True)


def enumerate_modal_ops(
    H: FiniteHeytingAlgebra, true, bound: int = MAX_MODAL_OP_SIZE
) -> List[Tuple[int, ...]]:
    """Every box table on ``H`` satisfying (i)-(iv) for the ultrafilter ``true``.

    Conditions (i) and (iv) are pointwise, so they cut each entry's range
    before the product is formed; (ii) and (iii) are then tested on all
    remaining tables at once.  Tables come out in lexicographic order.
    """
    if H.n > bound:
        raise ValueError(f"algebra size {H.n} exceeds the modal-operation bound {bound}")
    true = frozenset(true)
    domains = []
    for m in range(H.n):
        want_true = m == H.top
        domains.append([v for v in range(H.n) if H.le(v, m) and (v in true) == want_true])
    if any(not d for d in domains):
        return []
    C = np.array(list(itertools.product(*domains)), dtype=np.int64).reshape(-1, H.n)
    le, I, J = H.leq, H.imp, H.join
    # (iii): box(m \/ m') <= box(m) \/ box(m')
    ok = le[C[:, J], J[C[:, :, None], C[:, None, :]]].all(axis=(1, 2))
    C = C[ok]
    # (ii), vectorized over (table, m, m', m'')
    X = C[:, I]
    rhs = I[X[:, None, :, :], X[:, :, None, :]]
    ok = le[np.broadcast_to(X[:, :, :, None], rhs.shape), rhs].all(axis=(1, 2, 3))
    return [tuple(int(v) for v in row) for row in C[ok]]


Assignment = Dict[int, int]  # variable index -> element


@dataclass(frozen=True, eq=False)
class LModel:
    algebra: FiniteHeytingAlgebra
    true: FrozenSet[int]
    box: Tuple[int, ...]
    _true_mask: np.ndarray = field(init=False, repr=False)
    _box_arr: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mask = np.zeros(self.algebra.n, dtype=bool)
        mask[list(self.true)] = True
        object.__setattr__(self, "_true_mask", mask)
        object.__setattr__(self, "_box_arr", np.asarray(self.box, dtype=np.int64))

    @property
    def size(self) -> int:
        return self.algebra.n

    def validate(self) -> ModelCheck:
        return check_model_conditions(self.algebra, self.true, self.box)


def enumerate_models(max_size: int) -> List[LModel]:
    """Every model whose algebra has at most ``max_size`` elements."""
    out = []
    for H in enumerate_heyting(max_size):
        for U in enumerate_ultrafilters(H):
            for box in enumerate_modal_ops(H, U.members):
                out.append(LModel(H, U.members, box))
    return out


# ---------------------------------------------------------------------------
# evaluation

def eval_formula(model: LModel, gamma: Mapping[int, int], f: Formula) -> int:
    """Value of ``f`` under the assignment ``gamma`` (variable index -> element)."""
    H = model.algebra
    memo: Dict[Formula, int] = {}

    def go(g: Formula) -> int:
        r = memo.get(g)
        if r is not None:
            return r
        if isinstance(g, Bot):
            r = H.bot
        elif isinstance(g, Atom):
            if g.index not in gamma:
                raise KeyError(f"variable x{g.index} is unassigned")
            r = gamma[g.index]
        elif isinstance(g, Box):
            r = model.box[go(g.body)]
        elif isinstance(g, Imp):
            r = H._imp[go(g.left)][go(g.right)]
        elif isinstance(g, And):
            r = H._meet[go(g.left)][go(g.right)]
        else:
            r = H._join[go(g.left)][go(g.right)]
        memo[g] = r
        return r

    return go(f)


def satisfies(model: LModel, gamma: Mapping[int, int], f: Formula) -> bool:
    return eval_formula(model, gamma, f) in model.true


def all_assignments(model: LModel, variables: Sequence[int]) -> Dict[int, np.ndarray]:
    """Columns enumerating every assignment of ``variables`` (one row per assignment)."""
    k = len(variables)
    n = model.algebra.n
    grid = np.indices((n,) * k).reshape(k, -1) if k else np.zeros((0, 1), dtype=np.int64)
    return {v: grid[i].astype(np.int64) for i, v in enumerate(variables)}


def eval_vector(model: LModel, env: Mapping[int, np.ndarray], f: Formula, memo=None) -> np.ndarray:
    """Vectorized evaluation: ``env`` maps variables to equal-length element arrays."""
    memo = {} if memo is None else memo
    r = memo.get(f)
    if r is not None:
        return r
    H = model.algebra
    if isinstance(f, Bot):
        length = len(next(iter(env.values()))) if env else 1
        r = np.full(length, H.bot, dtype=np.int64)
    elif isinstance(f, Atom):
        r = env[f.index]
    elif isinstance(f, Box):
        r = model._box_arr[eval_vector(model, env, f.body, memo)]
    else:
        a = eval_vector(model, env, f.left, memo)
        b = eval_vector(model, env, f.right, memo)
        table = H.imp if isinstance(f, Imp) else H.meet if isinstance(f, And) else H.join
        a, b = np.broadcast_arrays(a, b)
        r = table[a, b]
    memo[f] = r
    return r


def two_element_model_of(valuation: Mapping[int, bool]) -> Tuple[LModel, Dict[int, int]]:
    """Two-element Boolean model (identity box) with the matching assignment."""
    H = boolean_algebra(1)
    model = LModel(H, frozenset({H.top}), (H.bot, H.top))
    return model, {v: (H.top if b else H.bot) for v, b in valuation.items()}
