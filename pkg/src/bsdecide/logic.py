"""First-order syntax, the var/free/con functions, ground substitution and the
fragment recognizers for Bernays-Schoenfinkel expressions and their universal
segments.

All AST nodes are frozen dataclasses, so formulas compare structurally and can
be used as dictionary keys.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .errors import NotQuantifierFree, UnmappedFreeVariable

PSEUDO_BLANK = "#"
AUTO_CONSTANT = "a0"


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    name: str


@dataclass(frozen=True)
class FunctionApp:
    name: str
    args: tuple["Term", ...]


Term = Union[Variable, Constant, FunctionApp]


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Equal:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Equal, Not, And, Or, Implies, Iff, Forall, Exists]
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists)


# ---------------------------------------------------------------------------
# Symbol table


@dataclass(frozen=True)
class SymbolTable:
    relations: Mapping[str, int]
    constants: tuple[str, ...] = ()
    functions: Mapping[str, int] = field(default_factory=dict)
    variables: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "relations", dict(self.relations))
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "constants", tuple(self.constants))
        object.__setattr__(self, "variables", frozenset(self.variables))
        for name, arity in {**self.relations, **self.functions}.items():
            if arity < 1:
                raise ValueError(f"symbol {name} has arity {arity}; arities must be >= 1")
        if list(self.constants) != sorted(set(self.constants)):
            raise ValueError("constants must be duplicate-free and sorted")
        groups = [set(self.relations), set(self.constants), set(self.functions), set(self.variables)]
        seen: set[str] = set()
        for group in groups:
            if seen & group:
                raise ValueError(f"identifier(s) used in two roles: {sorted(seen & group)}")
            seen |= group
        if any(PSEUDO_BLANK in name for name in seen):
            raise ValueError("identifiers may not contain the pseudo-blank byte")

    def with_constants(self, extra) -> "SymbolTable":
        return SymbolTable(
            self.relations,
            tuple(sorted(set(self.constants) | set(extra))),
            self.functions,
            self.variables,
        )

    @classmethod
    def infer(cls, f: Formula) -> "SymbolTable":
        """Collect the symbols of ``f``; raises ValueError on inconsistent use."""
        relations: dict[str, int] = {}
        functions: dict[str, int] = {}
        constants: set[str] = set()
        variables: set[str] = set()

        def term(t):
            if isinstance(t, Variable):
                variables.add(t.name)
            elif isinstance(t, Constant):
                constants.add(t.name)
            else:
                if functions.setdefault(t.name, len(t.args)) != len(t.args):
                    raise ValueError(f"function {t.name} used with two arities")
                for a in t.args:
                    term(a)

        for node in subformulas(f):
            if isinstance(node, Atom):
                if relations.setdefault(node.relation, len(node.args)) != len(node.args):
                    raise ValueError(f"relation {node.relation} used with two arities")
                for a in node.args:
                    term(a)
            elif isinstance(node, Equal):
                term(node.left)
                term(node.right)
            elif isinstance(node, QUANTIFIERS):
                variables.add(node.var)
        return cls(relations, tuple(sorted(constants)), functions, frozenset(variables))


# ---------------------------------------------------------------------------
# Inductive functions


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, BINARY):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, (Not, Forall, Exists)):
            stack.append(node.body)


def vars_of(t: Term) -> set[str]:
    if isinstance(t, Variable):
        return {t.name}
    if isinstance(t, Constant):
        return set()
    out: set[str] = set()
    for a in t.args:
        out |= vars_of(a)
    return out


def _terms_con(t: Term) -> set[str]:
    if isinstance(t, Constant):
        return {t.name}
    if isinstance(t, Variable):
        return set()
    out: set[str] = set()
    for a in t.args:
        out |= _terms_con(a)
    return out


def free_of(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        out: set[str] = set()
        for t in f.args:
            out |= vars_of(t)
        return out
    if isinstance(f, Equal):
        return vars_of(f.left) | vars_of(f.right)
    if isinstance(f, Not):
        return free_of(f.body)
    if isinstance(f, BINARY):
        return free_of(f.left) | free_of(f.right)
    return free_of(f.body) - {f.var}


def con_of(f: Formula) -> set[str]:
    out: set[str] = set()
    for node in subformulas(f):
        if isinstance(node, Atom):
            for t in node.args:
                out |= _terms_con(t)
        elif isinstance(node, Equal):
            out |= _terms_con(node.left) | _terms_con(node.right)
    return out


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(n, QUANTIFIERS) for n in subformulas(f))


def _subst_term(t: Term, sub: Mapping[str, str]) -> Term:
    if isinstance(t, Variable):
        if t.name not in sub:
            raise UnmappedFreeVariable(f"no constant given for free variable {t.name}")
        return Constant(sub[t.name])
    if isinstance(t, Constant):
        return t
    return FunctionApp(t.name, tuple(_subst_term(a, sub) for a in t.args))


def substitute_ground(f: Formula, sub: Mapping[str, str]) -> Formula:
    """Replace every variable of the quantifier-free formula ``f`` by its constant."""
    if not is_quantifier_free(f):
        raise NotQuantifierFree("substitute_ground needs a quantifier-free formula")
    return _subst(f, sub)


def _subst(f: Formula, sub: Mapping[str, str]) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.relation, tuple(_subst_term(t, sub) for t in f.args))
    if isinstance(f, Equal):
        return Equal(_subst_term(f.left, sub), _subst_term(f.right, sub))
    if isinstance(f, Not):
        return Not(_subst(f.body, sub))
    return type(f)(_subst(f.left, sub), _subst(f.right, sub))


def replace_variables(f: Formula, sub: Mapping[str, str]) -> Formula:
    """Substitute constants for *some* variables of a quantifier-free formula."""
    if not is_quantifier_free(f):
        raise NotQuantifierFree("replace_variables needs a quantifier-free formula")
    partial = dict(sub)

    def term(t):
        if isinstance(t, Variable):
            return Constant(partial[t.name]) if t.name in partial else t
        if isinstance(t, FunctionApp):
            return FunctionApp(t.name, tuple(term(a) for a in t.args))
        return t

    def walk(g):
        if isinstance(g, Atom):
            return Atom(g.relation, tuple(term(t) for t in g.args))
        if isinstance(g, Equal):
            return Equal(term(g.left), term(g.right))
        if isinstance(g, Not):
            return Not(walk(g.body))
        return type(g)(walk(g.left), walk(g.right))

    return walk(f)


def desugar(f: Formula) -> Formula:
    """Rewrite a quantifier-free formula into negation and disjunction only."""
    if isinstance(f, (Atom, Equal)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.body))
    a, b = desugar(f.left), desugar(f.right)
    if isinstance(f, Or):
        return Or(a, b)
    if isinstance(f, And):
        return Not(Or(Not(a), Not(b)))
    if isinstance(f, Implies):
        return Or(Not(a), b)
    if isinstance(f, Iff):
        return Or(Not(Or(a, b)), Not(Or(Not(a), Not(b))))
    raise NotQuantifierFree("desugar needs a quantifier-free formula")


# ---------------------------------------------------------------------------
# Fragments


class Fragment(str, enum.Enum):
    SBS = "SBS"
    BS = "BS"
    GENERAL = "general"


class Violation(str, enum.Enum):
    CONTAINS_EQUALITY = "ContainsEquality"
    CONTAINS_FUNCTION = "ContainsFunction"
    NOT_PRENEX_EA = "NotPrenexEA"
    REDUNDANT_QUANTIFIED_VARIABLE = "RedundantQuantifiedVariable"
    DUPLICATE_QUANTIFIED_VARIABLE = "DuplicateQuantifiedVariable"
    UNBOUND_VARIABLE = "UnboundVariable"
    UNDECLARED_SYMBOL = "UndeclaredSymbol"


def _check_matrix(matrix: Formula) -> list[Violation]:
    found = []
    nodes = list(subformulas(matrix))
    if any(isinstance(n, QUANTIFIERS) for n in nodes):
        found.append(Violation.NOT_PRENEX_EA)
    if any(isinstance(n, Equal) for n in nodes):
        found.append(Violation.CONTAINS_EQUALITY)

    def has_fn(t):
        return isinstance(t, FunctionApp)

    for n in nodes:
        terms = n.args if isinstance(n, Atom) else (n.left, n.right) if isinstance(n, Equal) else ()
        if any(has_fn(t) for t in terms):
            found.append(Violation.CONTAINS_FUNCTION)
            break
    return found


@dataclass(frozen=True)
class BSExpression:
    exist_vars: tuple[str, ...]
    univ_vars: tuple[str, ...]
    matrix: Formula
    symbols: SymbolTable

    def __post_init__(self):
        problems = _check_matrix(self.matrix)
        names = self.exist_vars + self.univ_vars
        if len(set(names)) != len(names):
            problems.append(Violation.DUPLICATE_QUANTIFIED_VARIABLE)
        if free_of(self.matrix) != set(names):
            problems.append(Violation.UNBOUND_VARIABLE)
        if problems:
            raise ValueError(f"not a BS expression: {[p.value for p in problems]}")

    @property
    def s(self) -> int:
        return len(self.exist_vars)

    @property
    def t(self) -> int:
        return len(self.univ_vars)

    @property
    def m(self) -> int:
        """Number of constants, counting the auto-added a0 when there are none."""
        return max(1, len(con_of(self.matrix)))

    def to_formula(self) -> Formula:
        f = self.matrix
        for v in reversed(self.univ_vars):
            f = Forall(v, f)
        for v in reversed(self.exist_vars):
            f = Exists(v, f)
        return f

    def segment(self) -> "SBSegment":
        if self.exist_vars:
            raise ValueError("only an existential-free expression is a segment")
        return SBSegment(self.univ_vars, self.matrix, self.symbols)


@dataclass(frozen=True)
class SBSegment:
    univ_vars: tuple[str, ...]
    matrix: Formula
    symbols: SymbolTable

    def __post_init__(self):
        problems = _check_matrix(self.matrix)
        if len(set(self.univ_vars)) != len(self.univ_vars):
            problems.append(Violation.DUPLICATE_QUANTIFIED_VARIABLE)
        if free_of(self.matrix) != set(self.univ_vars):
            problems.append(Violation.UNBOUND_VARIABLE)
        if problems:
            raise ValueError(f"not a BS segment: {[p.value for p in problems]}")

    @property
    def t(self) -> int:
        return len(self.univ_vars)

    @property
    def m(self) -> int:
        return max(1, len(con_of(self.matrix)))

    def to_formula(self) -> Formula:
        f = self.matrix
        for v in reversed(self.univ_vars):
            f = Forall(v, f)
        return f


@dataclass(frozen=True)
class Classification:
    fragment: Fragment
    violations: tuple[Violation, ...] = ()
    bs: BSExpression | None = None
    sbs: SBSegment | None = None

    @property
    def ok(self) -> bool:
        return self.fragment is not Fragment.GENERAL

    @property
    def expression(self) -> BSExpression | SBSegment | None:
        return self.sbs if self.sbs is not None else self.bs


def split_prefix(f: Formula) -> tuple[list[str], list[str], Formula, bool]:
    """Peel an exists*-forall* prefix; the flag reports a leftover quantifier."""
    exist, univ = [], []
    while isinstance(f, Exists):
        exist.append(f.var)
        f = f.body
    while isinstance(f, Forall):
        univ.append(f.var)
        f = f.body
    return exist, univ, f, not is_quantifier_free(f)


def classify(f: Formula, symbols: SymbolTable | None = None) -> Classification:
    """Decide whether ``f`` is an SBS segment, a BS expression, or neither.

    A quantifier-free ground formula is reported as the degenerate SBS case
    with t = 0.
    """
    if symbols is None:
        symbols = SymbolTable.infer(f)
    exist, univ, matrix, nested = split_prefix(f)
    violations = _check_matrix(matrix)
    names = exist + univ
    if len(set(names)) != len(names):
        violations.append(Violation.DUPLICATE_QUANTIFIED_VARIABLE)
    free = free_of(matrix)
    if not nested:
        if set(names) - free:
            violations.append(Violation.REDUNDANT_QUANTIFIED_VARIABLE)
        if free - set(names):
            violations.append(Violation.UNBOUND_VARIABLE)
    elif free_of(f):
        violations.append(Violation.UNBOUND_VARIABLE)
    undeclared = con_of(matrix) - set(symbols.constants)
    for node in subformulas(matrix):
        if isinstance(node, Atom) and symbols.relations.get(node.relation) != len(node.args):
            undeclared.add(node.relation)
    if undeclared:
        violations.append(Violation.UNDECLARED_SYMBOL)

    violations = tuple(dict.fromkeys(violations))
    if violations:
        return Classification(Fragment.GENERAL, violations)
    bs = BSExpression(tuple(exist), tuple(univ), matrix, symbols)
    if exist:
        return Classification(Fragment.BS, (), bs=bs)
    return Classification(Fragment.SBS, (), bs=bs, sbs=bs.segment())
