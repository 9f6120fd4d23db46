import itertools
from collections import Counter

import pytest

from amalgam.algebra import (
    FinitePoset, LModel, boolean_algebra, chain, check_model_conditions, enumerate_filters,
    enumerate_heyting, enumerate_models, enumerate_modal_ops, enumerate_ultrafilters,
    eval_formula, has_disjunction_property, heyting_from_poset, is_boolean, is_filter,
    is_prime_filter, satisfies, trivial_box, two_element_model_of,
)
from amalgam.formula import Box, Imp, Or, P, Q, parse


def test_sizes_match_count_of_distributive_lattices():
    counts = Counter(H.n for H in enumerate_heyting(8))
    # number of distributive lattices with n elements, n = 1..8
    assert [counts[n] for n in range(1, 9)] == [1, 1, 1, 2, 3, 5, 8, 15]


def _lattice_canon(H):
    n = H.n
    best = None
    for perm in itertools.permutations(range(n)):
        rel = tuple(sorted((perm[a], perm[b]) for a in range(n) for b in range(n) if H.le(a, b)))
        best = rel if best is None or rel < best else best
    return best


def test_small_counts_against_brute_force_posets():
    # all partial orders on up to 4 points, downset lattices up to lattice isomorphism
    seen = {}
    for k in range(0, 5):
        pairs = [(a, b) for a in range(k) for b in range(k) if a != b]
        for bits in itertools.product((0, 1), repeat=len(pairs)):
            rel = {p for p, bit in zip(pairs, bits) if bit}
            if any((b, a) in rel for a, b in rel):
                continue
            if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2 and a != c):
                continue
            leq = tuple(tuple(a == b or (a, b) in rel for b in range(k)) for a in range(k))
            H = heyting_from_poset(FinitePoset(k, leq))
            if H.n <= 5:
                seen.setdefault(H.n, set()).add(_lattice_canon(H))
    ours = Counter(H.n for H in enumerate_heyting(5))
    assert {n: len(s) for n, s in seen.items()} == dict(ours)


def test_all_enumerated_algebras_validate():
    for H in enumerate_heyting(8):
        assert H.validate() is None


def test_bound_guard():
    with pytest.raises(ValueError):
        enumerate_heyting(9)


def test_boolean_algebras_and_disjunction_property():
    for k, dp in [(0, True), (1, True), (2, False), (3, False)]:
        B = boolean_algebra(k)
        assert B.n == 2 ** k and is_boolean(B)
        assert has_disjunction_property(B) == dp
    assert not is_boolean(chain(3))
    assert has_disjunction_property(chain(3))


def test_implication_is_residual():
    for H in enumerate_heyting(6):
        for a, b, c in itertools.product(range(H.n), repeat=3):
            assert H.le(H.meet[a, c], b) == H.le(c, H.imp[a, b])


def _filters_by_brute_force(H):
    out = []
    for mask in range(1, 1 << H.n):
        s = {i for i in range(H.n) if mask >> i & 1}
        if H.bot in s and H.n > 1:
            continue
        up = all(b in s for a in s for b in range(H.n) if H.le(a, b))
        meets = all(H.meet[a, b] in s for a in s for b in s)
        if up and meets and (H.bot not in s or H.n == 1):
            out.append(frozenset(s))
    return out


def test_filters_against_subset_oracle():
    for H in enumerate_heyting(6):
        if H.n == 1:
            continue
        brute = _filters_by_brute_force(H)
        assert set(enumerate_filters(H)) == set(brute)
        assert all(is_filter(H, f) for f in brute)
        maximal = {f for f in brute if not any(f < g for g in brute)}
        assert {U.members for U in enumerate_ultrafilters(H)} == maximal


def test_chain_filters():
    H = chain(3)
    ufs = enumerate_ultrafilters(H)
    assert [sorted(U.members) for U in ufs] == [[1, 2]]
    assert is_prime_filter(H, {1, 2})
    assert trivial_box(H) == (0, 0, 2)
    assert enumerate_modal_ops(H, ufs[0].members) == [(0, 0, 1), (0, 0, 2)]


def test_modal_ops_against_full_table_search():
    for H in enumerate_heyting(5):
        for U in enumerate_ultrafilters(H):
            brute = [box for box in itertools.product(range(H.n), repeat=H.n)
                     if check_model_conditions(H, U.members, box)]
            assert sorted(enumerate_modal_ops(H, U.members)) == sorted(brute)


def test_modal_ops_exist_exactly_with_disjunction_property():
    for H in enumerate_heyting(6):
        for U in enumerate_ultrafilters(H):
            ops = enumerate_modal_ops(H, U.members)
            if has_disjunction_property(H):
                assert trivial_box(H) in ops
            else:
                assert ops == []


def test_condition_diagnostics():
    B = boolean_algebra(2)
    U = enumerate_ultrafilters(B)[0]
    res = check_model_conditions(B, U.members, trivial_box(B))
    assert not res and res.condition == "(iii)"


def test_models_validate():
    ms = enumerate_models(6)
    assert len(ms) == 64
    assert all(m.validate() for m in ms)
    assert Counter(m.size for m in ms) == {2: 1, 3: 2, 4: 3, 5: 18, 6: 40}


def test_evaluation():
    H = chain(3)
    m = LModel(H, frozenset({1, 2}), trivial_box(H))
    g = {0: 1}
    assert eval_formula(m, g, P) == 1
    assert eval_formula(m, g, Box(P)) == 0
    assert eval_formula(m, g, Or(P, Imp(P, parse("bot")))) == 1
    assert satisfies(m, g, Or(P, Imp(P, parse("bot"))))
    assert not satisfies(m, g, Box(Or(P, Imp(P, parse("bot")))))
    with pytest.raises(KeyError):
        eval_formula(m, g, Q)


def test_two_element_model():
    m, g = two_element_model_of({0: True, 1: False})
    assert m.size == 2 and m.validate()
    assert satisfies(m, g, P) and not satisfies(m, g, Q)
    assert satisfies(m, g, Box(P)) and not satisfies(m, g, Box(Q))


def test_order_through_implication():
    for H in enumerate_heyting(8):
        for a, b in itertools.product(range(H.n), repeat=2):
            assert H.le(a, b) == (H.imp[a, b] == H.top)
