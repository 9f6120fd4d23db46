import random

import pytest

from amalgam.formula import BOT, And, Atom, Box, Imp, Neg, Or

ACCEPTANCE_LINES = []


def random_formula(rng: random.Random, nvars: int = 2, depth: int = 3, modal: bool = True):
    """Random formula of bounded depth over the first ``nvars`` variables."""
    if depth == 0 or rng.random() < 0.25:
        k = rng.randrange(nvars + 1)
        return BOT if k == nvars else Atom(k)
    r = rng.random()
    if modal and r < 0.2:
        return Box(random_formula(rng, nvars, depth - 1, modal))
    if r < 0.3:
        return Neg(random_formula(rng, nvars, depth - 1, modal))
    ctor = rng.choice([Imp, Or, And])
    return ctor(random_formula(rng, nvars, depth - 1, modal), random_formula(rng, nvars, depth - 1, modal))


@pytest.fixture
def rng():
    return random.Random(20240617)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_lproof(rng: random.Random, nvars: int = 2, steps: int = 12):
    """Random checked L proof from two premises, mixing axioms, AN and MP."""
    from amalgam.formula import Imp as _Imp
    from amalgam.lkernel import ProofBuilder

    h1 = random_formula(rng, nvars, 2)
    h2 = _Imp(h1, random_formula(rng, nvars, 2))
    pb = ProofBuilder([h1, h2])
    lines = [pb.hyp(0), pb.hyp(1), pb.mp(1, 2)]
    for _ in range(steps):
        r = rng.random()
        a, b, c = (random_formula(rng, nvars, 2) for _ in range(3))
        if r < 0.2:
            make = rng.choice([
                lambda: pb.ax2(a), lambda: pb.ax3(a, b, c), lambda: pb.ax4(a, b),
                lambda: pb.axiom_i(_Imp(a, _Imp(b, a))),
            ])
            lines.append(pb.an(make()))
        elif r < 0.55:
            k = rng.choice(lines)
            f = pb.lines[k - 1][0]
            lines.append(pb.mp(k, pb.axiom_i(_Imp(f, _Imp(a, f)))))
        elif r < 0.8:
            k = rng.choice(lines)
            f = pb.lines[k - 1][0]
            lines.append(pb.mp(k, pb.axiom_i(_Imp(f, Or(f, a)))))
        else:
            lines.append(pb.em(a))
    return pb.build(pb.lines[rng.choice(lines) - 1][0]), h1
