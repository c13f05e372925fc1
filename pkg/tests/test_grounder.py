import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsdecide.errors import ExplosionGuard
from bsdecide.generate import random_segment
from bsdecide.grounder import (
    AtomTable,
    HerbrandUniverse,
    WitnessPolicy,
    ground,
    herbrand_universe,
    pi,
    pi_translate,
    rho,
    skolemize,
)
from bsdecide.logic import Atom, Constant, classify, desugar
from bsdecide.prop import PNot, POr, PVar
from bsdecide.syntax import parse, pretty_print


def expression(text):
    return classify(*parse(text)).expression


class TestUniverse:
    def test_no_constants_adds_a0(self):
        u = herbrand_universe(expression("forall y . P(y)"))
        assert u.members == ("a0",) and u.auto_added_a0

    def test_source_constants_sorted(self):
        u = herbrand_universe(expression("forall y . R(y,b) | P(a)"))
        assert u.members == ("a", "b")

    def test_skolem_constants_follow(self):
        u = herbrand_universe(expression("exists x . forall y . R(x,y) | P(a)"))
        assert u.members == ("a", "_sk1")

    def test_paper_literal_has_no_skolem(self):
        u = herbrand_universe(expression("exists x . P(x) & ~P(a)"), WitnessPolicy.PAPER_LITERAL)
        assert u.members == ("a",)

    def test_never_empty(self):
        with pytest.raises(ValueError):
            HerbrandUniverse(())


class TestSkolemize:
    def test_existential_becomes_constant(self):
        seg = skolemize(expression("exists x . forall y . R(x,y)"))
        assert pretty_print(seg.to_formula()) == "forall y . R(_sk1,y)"
        assert "_sk1" in seg.symbols.constants

    def test_two_witnesses(self):
        seg = skolemize(expression("exists x1 x2 . P(x1) & ~P(x2)"))
        assert pretty_print(seg.matrix) == "P(_sk1) & ~P(_sk2)"
        assert seg.t == 0


class TestGround:
    def test_lexicographic_order(self):
        seg = expression("forall y1 y2 . R(y1,y2) | P(a) | P(b)")
        gis = ground(seg, herbrand_universe(seg))
        assert [values for values, _ in gis.instances] == [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
        first = gis.formulas[1]
        assert first.left.left == Atom("R", (Constant("a"), Constant("b")))

    def test_count(self):
        seg = expression("forall y1 y2 y3 . R(y1,y2) | P(y3) | P(a) | P(b) | P(c)")
        assert len(ground(seg, herbrand_universe(seg))) == 27

    def test_zero_variables(self):
        seg = expression("P(a) & ~P(a)")
        assert len(ground(seg, herbrand_universe(seg))) == 1

    def test_cap(self):
        seg = expression("forall y1 y2 y3 . R(y1,y2) | P(y3) | P(a) | P(b)")
        with pytest.raises(ExplosionGuard) as info:
            ground(seg, herbrand_universe(seg), cap=7)
        assert info.value.required == 8

    def test_deterministic(self):
        seg = random_segment(random.Random(3), 2, 3)
        one = ground(seg, herbrand_universe(seg))
        two = ground(seg, herbrand_universe(seg))
        assert one == two


class TestPi:
    def test_first_occurrence_numbering(self):
        f = parse("R(a,b) | ~R(b,a) | R(a,b)")[0]
        atoms = AtomTable()
        p = pi(f, atoms)
        assert p == POr(POr(PVar(1), PNot(PVar(2))), PVar(1))
        assert atoms.atom(2) == Atom("R", (Constant("b"), Constant("a")))

    def test_conjunction_desugars(self):
        p = pi(parse("P(a) & Q(a)")[0], AtomTable())
        assert p == PNot(POr(PNot(PVar(1)), PNot(PVar(2))))

    def test_shared_table(self):
        props, atoms = pi_translate([parse("P(a)")[0], parse("P(b) | P(a)")[0]])
        assert props[1] == POr(PVar(2), PVar(1))
        assert len(atoms) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10**6))
def test_ground_count_is_power(m, t, seed):
    seg = random_segment(random.Random(seed), m, t, depth=3)
    assert len(ground(seg, herbrand_universe(seg))) == m**t


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 10**6))
def test_rho_inverts_pi(m, t, seed):
    seg = random_segment(random.Random(seed), m, t, {"P": 1, "R": 2, "S": 3}, depth=5)
    gis = ground(seg, herbrand_universe(seg))
    props, atoms = pi_translate(gis)
    for f, p in zip(gis.formulas, props):
        assert rho(p, atoms) == desugar(f)
