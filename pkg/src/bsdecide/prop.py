"""Propositional formulas over negation and disjunction, clause form, a DPLL
solver and the truth-table reference solver used to check it."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import FormulaSyntaxError, TooManyVariables, UnassignedVariable

TRUTH_TABLE_LIMIT = 24


@dataclass(frozen=True)
class PVar:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("propositional variables are numbered from 1")


@dataclass(frozen=True)
class PNot:
    body: "PropFormula"


@dataclass(frozen=True)
class POr:
    left: "PropFormula"
    right: "PropFormula"


PropFormula = Union[PVar, PNot, POr]


def p_and(a: PropFormula, b: PropFormula) -> PropFormula:
    return PNot(POr(PNot(a), PNot(b)))


def pvars(f: PropFormula) -> set[int]:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, PVar):
            out.add(g.index)
        elif isinstance(g, PNot):
            stack.append(g.body)
        else:
            stack.append(g.left)
            stack.append(g.right)
    return out


def evaluate(f: PropFormula, b: Mapping[int, bool]) -> bool:
    if isinstance(f, PVar):
        try:
            return bool(b[f.index])
        except KeyError:
            raise UnassignedVariable(f"p{f.index} has no truth value") from None
    if isinstance(f, PNot):
        return not evaluate(f.body, b)
    return evaluate(f.left, b) or evaluate(f.right, b)


def format_prop(f: PropFormula) -> str:
    if isinstance(f, PVar):
        return f"p{f.index}"
    if isinstance(f, PNot):
        return "~" + format_prop(f.body)
    return f"({format_prop(f.left)} | {format_prop(f.right)})"


# ---------------------------------------------------------------------------
# Clause form


@dataclass(frozen=True)
class CNF:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        kept = []
        for clause in self.clauses:
            lits = tuple(dict.fromkeys(int(lit) for lit in clause))
            for lit in lits:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")
            if any(-lit in lits for lit in lits):
                continue
            kept.append(lits)
        object.__setattr__(self, "clauses", tuple(kept))

    def satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return all(
            any(assignment.get(abs(lit)) == (lit > 0) for lit in clause) for clause in self.clauses
        )


def _clause_literals(f: PropFormula) -> list[int] | None:
    """Literals of ``f`` if it is a disjunction of literals, else None."""
    if isinstance(f, PVar):
        return [f.index]
    if isinstance(f, PNot) and isinstance(f.body, PVar):
        return [-f.body.index]
    if isinstance(f, POr):
        left, right = _clause_literals(f.left), _clause_literals(f.right)
        if left is None or right is None:
            return None
        return left + right
    return None


def _disjuncts(f: PropFormula) -> list[PropFormula]:
    out, stack = [], [f]
    while stack:
        g = stack.pop()
        if isinstance(g, POr):
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


def to_cnf(fs: Iterable[PropFormula], num_vars: int | None = None) -> CNF:
    """Equisatisfiable clause form for the conjunction of ``fs``.

    Formulas that already are clauses are copied as they are; anything else gets
    one auxiliary variable per distinct disjunction node, numbered above the
    input variables.
    """
    fs = list(fs)
    top = max((max(pvars(f)) for f in fs), default=0)
    if num_vars is not None:
        top = max(top, num_vars)
    next_var = top
    clauses: list[list[int]] = []
    names: dict[PropFormula, int] = {}

    def lit(g: PropFormula) -> int:
        nonlocal next_var
        if isinstance(g, PVar):
            return g.index
        if isinstance(g, PNot):
            return -lit(g.body)
        if g in names:
            return names[g]
        parts = [lit(d) for d in _disjuncts(g)]
        next_var += 1
        aux = names[g] = next_var
        clauses.append([-aux, *parts])
        clauses.extend([aux, -p] for p in parts)
        return aux

    for f in fs:
        flat = _clause_literals(f)
        if flat is None:
            flat = [lit(d) for d in _disjuncts(f)]
        clauses.append(flat)
    return CNF(next_var, tuple(tuple(c) for c in clauses))


def read_dimacs(text: str) -> CNF:
    """Parse DIMACS CNF; comment lines are skipped."""
    header = None
    lits: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormulaSyntaxError(f"bad DIMACS header on line {lineno}", 0)
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise FormulaSyntaxError(f"clause before header on line {lineno}", 0)
        lits.extend(int(tok) for tok in line.split())
    if header is None:
        raise FormulaSyntaxError("missing DIMACS header", 0)
    clauses, current = [], []
    for x in lits:
        if x == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(x)
    if current:
        clauses.append(tuple(current))
    if len(clauses) != header[1]:
        raise FormulaSyntaxError(
            f"header announces {header[1]} clauses, found {len(clauses)}", 0
        )
    return CNF(header[0], tuple(clauses))


# ---------------------------------------------------------------------------
# Solvers


@dataclass(frozen=True)
class Verdict:
    sat: bool
    assignment: dict[int, bool] = field(default_factory=dict)

    def __str__(self) -> str:
        return "SAT" if self.sat else "UNSAT"


UNSAT = Verdict(False)


def dpll_solve(cnf: CNF) -> Verdict:
    """Complete DPLL search with unit propagation and pure-literal elimination.

    Decisions pick the smallest unassigned variable that still occurs in an
    open clause and try True first, so verdicts and models are deterministic.
    Variables left unconstrained come back False.
    """
    clauses = cnf.clauses
    if any(len(c) == 0 for c in clauses):
        return UNSAT
    occurs: dict[int, list[int]] = {}
    for ci, clause in enumerate(clauses):
        for lit in clause:
            occurs.setdefault(lit, []).append(ci)

    value: dict[int, bool] = {}
    trail: list[int] = []
    # (trail length before the decision, variable, whether False was tried)
    decisions: list[tuple[int, int, bool]] = []

    def is_true(lit: int) -> bool:
        return value.get(abs(lit)) == (lit > 0)

    def assign(lit: int):
        value[abs(lit)] = lit > 0
        trail.append(abs(lit))

    def propagate(pending: list[int]) -> bool:
        while True:
            while pending:
                lit = pending.pop()
                for ci in occurs.get(-lit, ()):
                    free = None
                    n_free = 0
                    for other in clauses[ci]:
                        v = value.get(abs(other))
                        if v is None:
                            free = other
                            n_free += 1
                        elif v == (other > 0):
                            break
                    else:
                        if n_free == 0:
                            return False
                        if n_free == 1:
                            assign(free)
                            pending.append(free)
            pure = _pure_literals(clauses, value)
            if not pure:
                return True
            for lit in pure:
                assign(lit)

    def undo(to: int):
        while len(trail) > to:
            del value[trail.pop()]

    pending = []
    for clause in clauses:
        if len(clause) != 1 or is_true(clause[0]):
            continue
        if is_true(-clause[0]):
            return UNSAT
        assign(clause[0])
        pending.append(clause[0])
    ok = propagate(pending)

    while True:
        if ok:
            var = _next_decision(clauses, value)
            if var is None:
                model = {v: value.get(v, False) for v in range(1, cnf.num_vars + 1)}
                return Verdict(True, model)
            decisions.append((len(trail), var, False))
            assign(var)
            ok = propagate([var])
            continue
        while decisions and decisions[-1][2]:
            decisions.pop()
        if not decisions:
            return UNSAT
        mark, var, _ = decisions.pop()
        undo(mark)
        decisions.append((mark, var, True))
        assign(-var)
        ok = propagate([-var])


def _open_clauses(clauses, value):
    for clause in clauses:
        if not any(value.get(abs(lit)) == (lit > 0) for lit in clause):
            yield clause


def _pure_literals(clauses, value) -> list[int]:
    seen: set[int] = set()
    for clause in _open_clauses(clauses, value):
        for lit in clause:
            if abs(lit) not in value:
                seen.add(lit)
    return sorted((lit for lit in seen if -lit not in seen), key=abs)


def _next_decision(clauses, value) -> int | None:
    best = None
    for clause in _open_clauses(clauses, value):
        for lit in clause:
            v = abs(lit)
            if v not in value and (best is None or v < best):
                best = v
    return best


def truth_table_solve(fs: Sequence[PropFormula]) -> Verdict:
    """Exhaustive check of every assignment; the reference the DPLL path is tested against."""
    variables = sorted(set().union(*(pvars(f) for f in fs))) if fs else []
    if len(variables) > TRUTH_TABLE_LIMIT:
        raise TooManyVariables(f"{len(variables)} variables, limit is {TRUTH_TABLE_LIMIT}")
    for values in itertools.product((False, True), repeat=len(variables)):
        b = dict(zip(variables, values))
        if all(evaluate(f, b) for f in fs):
            return Verdict(True, b)
    return UNSAT
