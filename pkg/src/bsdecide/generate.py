"""Seeded random instances: BS segments, BS expressions, propositional lists."""

from __future__ import annotations

import random
from typing import Mapping

from .logic import (
    And,
    Atom,
    BSExpression,
    Constant,
    Formula,
    Implies,
    Not,
    Or,
    SBSegment,
    SymbolTable,
    Variable,
    con_of,
    free_of,
)
from .prop import PNot, POr, PropFormula, PVar, p_and

DEFAULT_RELATIONS = {"P": 1, "R": 2}
MAX_TRIES = 10_000


def constant_names(m: int) -> list[str]:
    return [f"c{i}" for i in range(1, m + 1)]


def _random_tree(rng: random.Random, depth: int, leaf) -> Formula:
    if depth <= 1 or rng.random() < 0.25:
        return leaf()
    op = rng.choice(("not", "or", "and", "implies"))
    if op == "not":
        return Not(_random_tree(rng, depth - 1, leaf))
    node = {"or": Or, "and": And, "implies": Implies}[op]
    return node(_random_tree(rng, depth - 1, leaf), _random_tree(rng, depth - 1, leaf))


def random_matrix(
    rng: random.Random,
    variables: list[str],
    constants: list[str],
    relations: Mapping[str, int],
    depth: int,
) -> Formula:
    """A quantifier-free matrix mentioning every variable and every constant.

    Trees are drawn uniformly over not/or/and/implies and rejected until the
    exact-variable and exact-constant conditions hold.
    """
    terms = [Variable(v) for v in variables] + [Constant(c) for c in constants]
    if not terms:
        raise ValueError("need at least one variable or constant")
    names = sorted(relations)

    def leaf():
        r = rng.choice(names)
        return Atom(r, tuple(rng.choice(terms) for _ in range(relations[r])))

    slots = sum(relations.values()) or 1
    depth = max(depth, 1)
    for attempt in range(MAX_TRIES):
        # Widen the tree if the requested depth keeps failing.
        d = depth + attempt // 200
        f = _random_tree(rng, d, leaf)
        if free_of(f) == set(variables) and con_of(f) == set(constants):
            return f
    raise RuntimeError(
        f"could not place {len(variables)} variables and {len(constants)} constants "
        f"in a depth-{depth} tree over {slots} argument slots"
    )


def random_segment(
    rng: random.Random,
    m: int,
    t: int,
    relations: Mapping[str, int] = DEFAULT_RELATIONS,
    depth: int = 4,
    var_names: list[str] | None = None,
    const_names: list[str] | None = None,
) -> SBSegment:
    """Random segment over exactly ``m`` constants (m = 0 means none) and t variables."""
    variables = (var_names or [f"y{i}" for i in range(1, t + 1)])[:t]
    constants = (const_names or constant_names(m))[:m]
    matrix = random_matrix(rng, variables, constants, relations, depth)
    symbols = SymbolTable(dict(relations), tuple(sorted(constants)), {}, frozenset(variables))
    return SBSegment(tuple(variables), matrix, symbols)


def random_bs(
    rng: random.Random,
    m: int,
    s: int,
    t: int,
    relations: Mapping[str, int] = DEFAULT_RELATIONS,
    depth: int = 4,
) -> BSExpression:
    exist = [f"x{i}" for i in range(1, s + 1)]
    univ = [f"y{i}" for i in range(1, t + 1)]
    constants = constant_names(m)
    matrix = random_matrix(rng, exist + univ, constants, relations, depth)
    symbols = SymbolTable(dict(relations), tuple(sorted(constants)), {}, frozenset(exist + univ))
    return BSExpression(tuple(exist), tuple(univ), matrix, symbols)


def random_signature(
    rng: random.Random, max_relations: int = 3, max_arity: int = 2
) -> dict[str, int]:
    count = rng.randint(1, max_relations)
    names = ["P", "Q", "R"][:count] if count <= 3 else [f"R{i}" for i in range(count)]
    return {name: rng.randint(1, max_arity) for name in names}


def random_prop(rng: random.Random, num_vars: int, depth: int) -> PropFormula:
    if depth <= 1 or rng.random() < 0.2:
        return PVar(rng.randint(1, num_vars))
    roll = rng.random()
    if roll < 0.25:
        return PNot(random_prop(rng, num_vars, depth - 1))
    if roll < 0.45:
        return p_and(random_prop(rng, num_vars, depth - 1), random_prop(rng, num_vars, depth - 1))
    return POr(random_prop(rng, num_vars, depth - 1), random_prop(rng, num_vars, depth - 1))
