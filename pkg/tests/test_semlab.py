import pytest

from conftest import random_formula
from amalgam.algebra import has_disjunction_property, satisfies, trivial_box
from amalgam.formula import BOT, Box, Imp, Neg, Or, P, Q, R, enumerate_formulas, parse, to_text
from amalgam.ipc import KripkeModel, cpc_valid, ipc_prove, kripke_eval
from amalgam.lkernel import check_lproof
from amalgam.semlab import (
    bounded_prime_theory, check_identity_theorem, check_sp_validity, conservativity_check,
    countermodel_search, identity_theorem_table, kripke_to_lmodel, sweep, verify_main_theorem,
    _models_upto,
)

EM = Or(P, Neg(P))
PEIRCE = parse("((p -> q) -> p) -> p")


def test_transfer_of_excluded_middle_countermodel():
    K = ipc_prove([], EM).model
    model, gamma = kripke_to_lmodel(K)
    assert model.validate()
    assert has_disjunction_property(model.algebra)
    assert model.box == trivial_box(model.algebra)
    assert satisfies(model, gamma, EM)
    assert not satisfies(model, gamma, Box(EM))


def test_transfer_agrees_with_root_forcing():
    for f in (EM, PEIRCE, parse("~~p -> p"), parse("(p -> q) \\/ (q -> p)")):
        K = ipc_prove([], f).model
        model, gamma = kripke_to_lmodel(K, {0, 1})
        for psi in enumerate_formulas([P, Q], 5):
            assert kripke_eval(K, K.root, psi) == satisfies(model, gamma, Box(psi))


def test_transfer_rejects_unrooted():
    K = KripkeModel((frozenset({0}), frozenset({1})), (frozenset(), frozenset()))
    with pytest.raises(ValueError):
        kripke_to_lmodel(K)


def test_verify_main_theorem_provable():
    v = verify_main_theorem([], parse("~~~p -> ~p"))
    assert v.ipc_status == "Provable"
    assert check_lproof(v.proof, Box(parse("~~~p -> ~p")))


def test_verify_main_theorem_refutable():
    for f in (EM, PEIRCE, parse("~~p -> p")):
        v = verify_main_theorem([], f)
        assert v.ipc_status == "Refutable"
        assert v.model.validate()
        assert not satisfies(v.model, v.assignment, Box(f))


def test_verify_main_theorem_with_premises():
    v = verify_main_theorem([P, Imp(P, Q)], Q)
    assert v.proof.premises == (Box(P), Box(Imp(P, Q)))
    v = verify_main_theorem([Or(P, Q)], P)
    assert v.ipc_status == "Refutable"
    assert satisfies(v.model, v.assignment, Box(Or(P, Q)))
    assert not satisfies(v.model, v.assignment, Box(P))


def test_countermodel_search():
    res = countermodel_search([], Box(EM), 4)
    assert res.found and res.model.validate()
    assert not satisfies(res.model, res.assignment, Box(EM))
    res = countermodel_search([], parse("[]p -> p"), 4)
    assert not res.found and "at most 4" in res.reason
    res = countermodel_search([], P, 4)
    assert res.found and res.model.size == 2
    res = countermodel_search([Box(P)], Box(Q), 3)
    assert res.found and satisfies(res.model, res.assignment, Box(P))


def test_identity_theorem_examples(rng):
    for model in _models_upto(4):
        for _ in range(20):
            a = random_formula(rng, 2, 3)
            b = random_formula(rng, 2, 3)
            for g0 in range(model.size):
                gamma = {0: g0, 1: (g0 + 1) % model.size}
                assert check_identity_theorem(model, gamma, a, b)
                assert check_identity_theorem(model, gamma, a, a)


def test_identity_table_small():
    fs = enumerate_formulas([P], 4, modal=True)
    for model in _models_upto(5):
        assert identity_theorem_table(model, fs, [0]) == 0


def test_sp_validity(rng):
    for model in _models_upto(5):
        for _ in range(3):
            a, b, ctx = (random_formula(rng, 2, 3) for _ in range(3))
            gamma = {0: rng.randrange(model.size), 1: rng.randrange(model.size),
                     2: rng.randrange(model.size)}
            assert check_sp_validity(model, gamma, a, b, Imp(ctx, R), 2)
            assert check_sp_validity(model, gamma, a, b, R, 2)
            assert check_sp_validity(model, gamma, a, b, Box(R), 2)


def test_bounded_prime_theory_two_element():
    from amalgam.algebra import two_element_model_of
    model, gamma = two_element_model_of({0: True, 1: False})
    th = bounded_prime_theory(model, gamma, 5, [0, 1])
    assert th.ok
    assert P in th and Neg(Neg(P)) in th and Or(P, Q) in th
    assert BOT not in th and Q not in th


def test_bounded_prime_theory_excluded_middle_model():
    K = ipc_prove([], EM).model
    model, gamma = kripke_to_lmodel(K)
    th = bounded_prime_theory(model, gamma, 5, [0])
    assert th.ok
    assert P not in th and Neg(P) not in th and EM not in th
    assert Imp(P, P) in th


@pytest.mark.parametrize("text,classical", [("p \\/ ~p", True), ("p", False), ("~~p -> p", True), ("p -> q", False)])
def test_conservativity(text, classical):
    res = conservativity_check(parse(text))
    assert res.ok and res.classical == classical
    if classical:
        assert check_lproof(res.proof, parse(text))
    else:
        assert res.model.size == 2


def test_sweep_one_variable():
    rep = sweep(1, 5)
    cat = {to_text(r.formula): r.category for r in rep.records}
    assert cat["p -> p"] == "ipc"
    assert cat[to_text(parse("~~p -> p"))] == "cpc-only"
    assert cat["p"] == "neither"
    assert all(cpc_valid(r.formula) for r in rep.records if r.category == "ipc")
    assert rep.evidence_failures == 0
    assert rep.identity_failures == 0 and rep.transfer_failures == 0
    assert to_text(EM) in rep.non_normal_witnesses
    texts = [to_text(r.formula) for r in rep.records]
    assert texts == sorted(texts)


def test_sweep_sample_is_seeded():
    a = sweep(2, 5, sample=40, seed=3)
    b = sweep(2, 5, sample=40, seed=3)
    c = sweep(2, 5, sample=40, seed=4)
    key = lambda rep: [to_text(r.formula) for r in rep.records]
    assert key(a) == key(b) != key(c)
