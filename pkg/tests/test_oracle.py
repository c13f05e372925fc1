import itertools
import random

import pytest

from bsdecide.errors import EnumerationGuard, UnassignedFreeVariable
from bsdecide.generate import random_bs, random_segment, random_signature
from bsdecide.logic import And, Atom, Equal, Exists, Forall, Iff, Implies, Not, Or, classify
from bsdecide.oracle import (
    FiniteStructure,
    decide_by_bound,
    find_model,
    fo_evaluate,
    interpretation_count,
    model_bound,
)
from bsdecide.syntax import parse


def sentence(text):
    f, symbols = parse(text)
    return f, symbols


# -- an independent reference: naive semantics over explicit dictionaries ------


def naive_truth(f, domain, consts, rels, env):
    def val(t):
        return env[t.name] if t.name in env else consts[t.name]

    if isinstance(f, Atom):
        return tuple(val(t) for t in f.args) in rels[f.relation]
    if isinstance(f, Equal):
        return val(f.left) == val(f.right)
    if isinstance(f, Not):
        return not naive_truth(f.body, domain, consts, rels, env)
    if isinstance(f, (Forall, Exists)):
        results = (naive_truth(f.body, domain, consts, rels, {**env, f.var: e}) for e in domain)
        return all(results) if isinstance(f, Forall) else any(results)
    left = naive_truth(f.left, domain, consts, rels, env)
    right = naive_truth(f.right, domain, consts, rels, env)
    return {And: left and right, Or: left or right, Implies: (not left) or right, Iff: left == right}[type(f)]


def naive_satisfiable(f, arities, constants, max_size):
    for d in range(1, max_size + 1):
        domain = range(d)
        cells = [(r, tup) for r in sorted(arities) for tup in itertools.product(domain, repeat=arities[r])]
        for den in itertools.product(domain, repeat=len(constants)):
            consts = dict(zip(constants, den))
            for bits in itertools.product([False, True], repeat=len(cells)):
                rels = {r: set() for r in arities}
                for (r, tup), on in zip(cells, bits):
                    if on:
                        rels[r].add(tup)
                if naive_truth(f, domain, consts, rels, {}):
                    return True
    return False


# ---------------------------------------------------------------------------


class TestEvaluate:
    def test_forall(self):
        s = FiniteStructure(2, {"P": frozenset({(0,), (1,)})}, {}, {"P": 1})
        assert fo_evaluate(s, {}, parse("forall y . P(y)")[0])

    def test_exists_fails(self):
        s = FiniteStructure(2, {"P": frozenset()}, {}, {"P": 1})
        assert not fo_evaluate(s, {}, parse("exists x . P(x)")[0])

    def test_constant(self):
        s = FiniteStructure(2, {"P": frozenset({(1,)})}, {"a": 1}, {"P": 1})
        assert fo_evaluate(s, {}, parse("P(a)")[0])

    def test_free_variable_needs_assignment(self):
        s = FiniteStructure(1, {"P": frozenset()}, {}, {"P": 1})
        with pytest.raises(UnassignedFreeVariable):
            fo_evaluate(s, {}, Atom("P", (parse("forall y . P(y)")[0].body.args[0],)))

    def test_rejects_out_of_range_constant(self):
        with pytest.raises(ValueError):
            FiniteStructure(1, {}, {"a": 3}, {})


class TestFindModel:
    def test_divergence_formula_model(self):
        f, symbols = sentence("exists x . P(x) & ~P(a)")
        result = find_model(f, 2, symbols=symbols)
        assert result.sat
        s = result.structure
        assert s.domain_size == 2 and s.constants == {"a": 0}
        assert s.relations["P"] == frozenset({(1,)})

    def test_first_model_is_empty_relation(self):
        f, symbols = sentence("forall y1 y2 . R(y1,y2) | ~R(y2,y1)")
        result = find_model(f, 1, symbols=symbols)
        assert result.structure.domain_size == 1
        assert result.structure.relations["R"] == frozenset()

    def test_unsat(self):
        f, symbols = sentence("forall y . P(y) & ~P(a)")
        result = find_model(f, 3, symbols=symbols)
        assert not result.sat and str(result) == "UNSAT_UP_TO(3)"

    def test_needs_two_elements(self):
        f, symbols = sentence("P(a) & ~P(b)")
        assert find_model(f, 2, symbols=symbols).structure.domain_size == 2
        assert not find_model(f, 1, symbols=symbols).sat

    def test_guard(self):
        f, symbols = sentence("forall y1 y2 . R(y1,y2) & S(y2,y1) | T(y1,y2) | P(a) | P(b) | P(c)")
        with pytest.raises(EnumerationGuard) as info:
            find_model(f, 3, guard=1000, symbols=symbols)
        assert info.value.required == interpretation_count({"R": 2, "S": 2, "T": 2, "P": 1}, 3, 3)

    def test_open_formula_rejected(self):
        with pytest.raises(UnassignedFreeVariable):
            find_model(parse("forall y . P(y)")[0].body, 1)

    def test_agrees_with_naive_enumerator(self):
        rng = random.Random(8)
        for _ in range(150):
            rels = random_signature(rng, max_relations=2, max_arity=2)
            m, t = rng.randint(1, 2), rng.randint(1, 2)
            seg = random_segment(rng, m, t, rels, depth=4)
            f = seg.to_formula()
            constants = sorted(seg.symbols.constants)
            expected = naive_satisfiable(f, rels, constants, m)
            result = find_model(f, m, symbols=seg.symbols)
            assert result.sat == expected
            if result.sat:
                assert naive_truth(
                    f,
                    range(result.structure.domain_size),
                    result.structure.constants,
                    {r: set(v) for r, v in result.structure.relations.items()},
                    {},
                )


def test_vectorized_matches_scalar():
    rng = random.Random(21)
    for _ in range(120):
        rels = random_signature(rng, max_relations=2, max_arity=2)
        seg = random_segment(rng, rng.randint(1, 2), rng.randint(1, 3), rels, depth=4)
        fast = decide_by_bound(seg)
        slow = decide_by_bound(seg, vectorized=False)
        assert fast == slow


def test_isomorphic_copy_is_also_a_model():
    rng = random.Random(4)
    checked = 0
    while checked < 40:
        seg = random_segment(rng, 3, 2, {"P": 1, "R": 2}, depth=4)
        result = decide_by_bound(seg)
        if not result.sat or result.structure.domain_size < 2:
            continue
        d = result.structure.domain_size
        perm = list(range(d))
        rng.shuffle(perm)
        assert fo_evaluate(result.structure.permuted(perm), {}, seg.to_formula())
        checked += 1


class TestBound:
    def test_segment_bound_is_m(self):
        seg = classify(*parse("forall y . R(y,a) | P(b)")).expression
        assert model_bound(seg) == 2

    def test_bs_bound_adds_s(self):
        bs = classify(*parse("exists x1 x2 . forall y . R(x1,y) | R(y,x2) | P(a)")).expression
        assert model_bound(bs) == 3

    def test_bound_never_zero(self):
        seg = classify(*parse("forall y . P(y)")).expression
        assert model_bound(seg) == 1

    def test_bs_random_agrees_with_naive(self):
        rng = random.Random(13)
        for _ in range(40):
            bs = random_bs(rng, 1, rng.randint(1, 2), 1, {"P": 1, "R": 2}, depth=3)
            expected = naive_satisfiable(bs.to_formula(), {"P": 1, "R": 2}, list(bs.symbols.constants), model_bound(bs))
            assert decide_by_bound(bs).sat == expected


def test_model_json_shape():
    f, symbols = sentence("exists x . P(x) & ~P(a)")
    data = find_model(f, 2, symbols=symbols).structure.to_json()
    assert data["domain_size"] == 2
    assert data["constants"] == {"a": 0}
    assert data["relations"]["P"] == [[1]]
