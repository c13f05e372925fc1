"""Finite structures, first-order satisfaction, and brute-force model search.

``find_model`` walks every structure of size 1..max_size in a fixed order:

* domain sizes ascending;
* constant denotations as an odometer over the constants in name order
  (last constant changes fastest);
* relation tables as one counter per relation, relations in name order, the
  last relation changing fastest.  Bit ``i`` of a relation's counter says
  whether the ``i``-th tuple of ``itertools.product(range(d), repeat=n)`` is in
  the table.

The default search evaluates the formula on all relation tables of one
constant denotation at once, with each table packed as a bit of a uint64
word.  ``vectorized=False`` walks the same order one structure at a time
through ``fo_evaluate``; both return the same first model.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import EnumerationGuard, UnassignedFreeVariable, UndeclaredSymbol
from .logic import (
    And,
    Atom,
    BSExpression,
    Constant,
    Equal,
    Exists,
    Forall,
    Formula,
    FunctionApp,
    Iff,
    Implies,
    Not,
    Or,
    SBSegment,
    SymbolTable,
    Term,
    con_of,
    free_of,
)

DEFAULT_GUARD = 10**7
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


@dataclass(frozen=True)
class FiniteStructure:
    domain_size: int
    relations: Mapping[str, frozenset[tuple[int, ...]]]
    constants: Mapping[str, int] = field(default_factory=dict)
    arities: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.domain_size < 1:
            raise ValueError("domain must be non-empty")
        rels = {name: frozenset(tuple(t) for t in table) for name, table in self.relations.items()}
        arities = dict(self.arities)
        for name, table in rels.items():
            for tup in table:
                arities.setdefault(name, len(tup))
                if len(tup) != arities[name] or not all(0 <= e < self.domain_size for e in tup):
                    raise ValueError(f"tuple {tup} invalid for {name}")
        for name in arities:
            rels.setdefault(name, frozenset())
        for name, e in self.constants.items():
            if not 0 <= e < self.domain_size:
                raise ValueError(f"constant {name} denotes {e}, outside the domain")
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "arities", arities)
        object.__setattr__(self, "constants", dict(self.constants))

    def to_json(self) -> dict:
        return {
            "domain_size": self.domain_size,
            "constants": dict(sorted(self.constants.items())),
            "relations": {
                name: [list(t) for t in sorted(self.relations[name])] for name in sorted(self.relations)
            },
        }

    def permuted(self, perm: list[int]) -> "FiniteStructure":
        """The isomorphic copy obtained by renaming element i to perm[i]."""
        return FiniteStructure(
            self.domain_size,
            {n: frozenset(tuple(perm[e] for e in t) for t in tab) for n, tab in self.relations.items()},
            {c: perm[e] for c, e in self.constants.items()},
            self.arities,
        )


def _term_value(s: FiniteStructure, beta: Mapping[str, int], t: Term) -> int:
    if isinstance(t, Constant):
        if t.name not in s.constants:
            raise UndeclaredSymbol(f"constant {t.name} has no denotation")
        return s.constants[t.name]
    if isinstance(t, FunctionApp):
        raise UndeclaredSymbol(f"function {t.name} has no interpretation")
    if t.name not in beta:
        raise UnassignedFreeVariable(f"variable {t.name} is not assigned")
    return beta[t.name]


def fo_evaluate(s: FiniteStructure, beta: Mapping[str, int], f: Formula) -> bool:
    """Whether (s, beta) satisfies f; quantifiers range over 0..d-1."""
    if isinstance(f, Atom):
        if f.relation not in s.relations:
            raise UndeclaredSymbol(f"relation {f.relation} has no interpretation")
        if s.arities[f.relation] != len(f.args):
            raise UndeclaredSymbol(f"relation {f.relation} used with the wrong arity")
        return tuple(_term_value(s, beta, t) for t in f.args) in s.relations[f.relation]
    if isinstance(f, Equal):
        return _term_value(s, beta, f.left) == _term_value(s, beta, f.right)
    if isinstance(f, Not):
        return not fo_evaluate(s, beta, f.body)
    if isinstance(f, And):
        return fo_evaluate(s, beta, f.left) and fo_evaluate(s, beta, f.right)
    if isinstance(f, Or):
        return fo_evaluate(s, beta, f.left) or fo_evaluate(s, beta, f.right)
    if isinstance(f, Implies):
        return not fo_evaluate(s, beta, f.left) or fo_evaluate(s, beta, f.right)
    if isinstance(f, Iff):
        return fo_evaluate(s, beta, f.left) == fo_evaluate(s, beta, f.right)
    check = all if isinstance(f, Forall) else any
    return check(fo_evaluate(s, {**beta, f.var: e}, f.body) for e in range(s.domain_size))


# ---------------------------------------------------------------------------
# Search


@dataclass(frozen=True)
class ModelResult:
    sat: bool
    max_size: int
    structure: FiniteStructure | None = None

    def __str__(self) -> str:
        return "SAT" if self.sat else f"UNSAT_UP_TO({self.max_size})"


def interpretation_count(arities: Mapping[str, int], n_constants: int, max_size: int) -> int:
    total = 0
    for d in range(1, max_size + 1):
        total += d**n_constants * 2 ** sum(d**n for n in arities.values())
    return total


@dataclass
class _Layout:
    """Bit positions of every relation table entry inside a configuration index."""

    d: int
    names: list[str]
    arities: dict[str, int]

    def __post_init__(self):
        self.tuples = {r: list(itertools.product(range(self.d), repeat=self.arities[r])) for r in self.names}
        self.offset = {}
        pos = 0
        for r in reversed(self.names):
            self.offset[r] = pos
            pos += len(self.tuples[r])
        self.bits = pos
        self.index = {r: {t: i for i, t in enumerate(self.tuples[r])} for r in self.names}

    def decode(self, config: int, den: dict[str, int]) -> FiniteStructure:
        rels = {}
        for r in self.names:
            base = self.offset[r]
            rels[r] = frozenset(t for i, t in enumerate(self.tuples[r]) if config >> (base + i) & 1)
        return FiniteStructure(self.d, rels, den, self.arities)


class _BitEvaluator:
    """Evaluates a formula over every configuration of a layout at once."""

    def __init__(self, layout: _Layout):
        self.layout = layout
        self.count = 1 << layout.bits
        self.words = max(1, self.count // 64)
        self.ones = np.full(self.words, _ALL, dtype=np.uint64)
        self.zeros = np.zeros(self.words, dtype=np.uint64)
        self._bit_cache: dict[int, np.ndarray] = {}
        word_idx = np.arange(self.words, dtype=np.uint64)
        self._word_idx = word_idx

    def bit_pattern(self, j: int) -> np.ndarray:
        cached = self._bit_cache.get(j)
        if cached is not None:
            return cached
        if j < 6:
            word = sum(1 << c for c in range(64) if (c >> j) & 1)
            arr = np.full(self.words, np.uint64(word), dtype=np.uint64)
        else:
            on = (self._word_idx >> np.uint64(j - 6)) & np.uint64(1)
            arr = np.where(on.astype(bool), _ALL, np.uint64(0)).astype(np.uint64)
        self._bit_cache[j] = arr
        return arr

    def term(self, t: Term, beta, den) -> int:
        if isinstance(t, Constant):
            if t.name not in den:
                raise UndeclaredSymbol(f"constant {t.name} has no denotation")
            return den[t.name]
        if isinstance(t, FunctionApp):
            raise UndeclaredSymbol(f"function {t.name} has no interpretation")
        if t.name not in beta:
            raise UnassignedFreeVariable(f"variable {t.name} is not assigned")
        return beta[t.name]

    def eval(self, f: Formula, beta: dict, den: dict) -> np.ndarray:
        lay = self.layout
        if isinstance(f, Atom):
            if f.relation not in lay.index:
                raise UndeclaredSymbol(f"relation {f.relation} has no interpretation")
            tup = tuple(self.term(t, beta, den) for t in f.args)
            return self.bit_pattern(lay.offset[f.relation] + lay.index[f.relation][tup])
        if isinstance(f, Equal):
            same = self.term(f.left, beta, den) == self.term(f.right, beta, den)
            return self.ones if same else self.zeros
        if isinstance(f, Not):
            return ~self.eval(f.body, beta, den)
        if isinstance(f, And):
            left = self.eval(f.left, beta, den)
            if not left.any():
                return left
            return left & self.eval(f.right, beta, den)
        if isinstance(f, Or):
            return self.eval(f.left, beta, den) | self.eval(f.right, beta, den)
        if isinstance(f, Implies):
            return ~self.eval(f.left, beta, den) | self.eval(f.right, beta, den)
        if isinstance(f, Iff):
            return ~(self.eval(f.left, beta, den) ^ self.eval(f.right, beta, den))
        if isinstance(f, Forall):
            acc = self.ones
            for e in range(lay.d):
                acc = acc & self.eval(f.body, {**beta, f.var: e}, den)
                if not acc.any():
                    break
            return acc
        acc = self.zeros
        for e in range(lay.d):
            acc = acc | self.eval(f.body, {**beta, f.var: e}, den)
        return acc

    def first(self, values: np.ndarray) -> int | None:
        if self.count < 64:
            values = values & np.uint64((1 << self.count) - 1)
        hits = np.flatnonzero(values)
        if hits.size == 0:
            return None
        w = int(hits[0])
        word = int(values[w])
        return w * 64 + ((word & -word).bit_length() - 1)


def _signature(f: Formula, symbols: SymbolTable | None) -> tuple[dict[str, int], list[str]]:
    inferred = SymbolTable.infer(f)
    arities = dict(inferred.relations)
    constants = set(con_of(f))
    if symbols is not None:
        arities.update(symbols.relations)
        constants |= set(symbols.constants)
    return arities, sorted(constants)


def find_model(
    f: Formula,
    max_size: int,
    guard: int = DEFAULT_GUARD,
    symbols: SymbolTable | None = None,
    vectorized: bool = True,
) -> ModelResult:
    """First model of the sentence ``f`` with at most ``max_size`` elements."""
    if max_size < 1:
        raise ValueError("max_size must be positive")
    free = free_of(f)
    if free:
        raise UnassignedFreeVariable(f"find_model needs a sentence; free: {sorted(free)}")
    arities, constants = _signature(f, symbols)
    required = interpretation_count(arities, len(constants), max_size)
    if required > guard:
        raise EnumerationGuard(required, guard)
    names = sorted(arities)
    for d in range(1, max_size + 1):
        layout = _Layout(d, names, arities)
        evaluator = _BitEvaluator(layout) if vectorized else None
        for values in itertools.product(range(d), repeat=len(constants)):
            den = dict(zip(constants, values))
            if evaluator is not None:
                config = evaluator.first(evaluator.eval(f, {}, den))
                if config is not None:
                    return ModelResult(True, max_size, layout.decode(config, den))
                continue
            for config in range(1 << layout.bits):
                s = layout.decode(config, den)
                if fo_evaluate(s, {}, f):
                    return ModelResult(True, max_size, s)
    return ModelResult(False, max_size)


def model_bound(expr: SBSegment | BSExpression) -> int:
    """Domain-size bound: m for segments, m + s for BS expressions (m >= 1)."""
    if isinstance(expr, BSExpression):
        return expr.m + expr.s
    return expr.m


def decide_by_bound(
    expr: SBSegment | BSExpression, guard: int = DEFAULT_GUARD, vectorized: bool = True
) -> ModelResult:
    """Satisfiability by exhaustive search up to the finite-model bound.

    Failing to find a model within the bound is a definitive UNSAT.
    """
    return find_model(expr.to_formula(), model_bound(expr), guard, expr.symbols, vectorized)
