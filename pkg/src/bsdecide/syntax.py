"""Concrete text syntax: tokenizer, recursive-descent parser, pretty-printer,
and the on-disk formats (formula files, ground-set files, DIMACS).

Grammar, loosest binding first::

    formula  := ("forall" | "exists") ident+ "." formula | iff
    iff      := imp ("<->" iff)?
    imp      := disj ("->" imp)?
    disj     := conj ("|" conj)*
    conj     := unary ("&" unary)*
    unary    := "~" unary | quantified formula | primary
    primary  := "(" formula ")" | Upper "(" term ("," term)* ")" | term "=" term
    term     := lower | lower "(" term ("," term)* ")"

A lowercase identifier in term position is a variable when an enclosing
quantifier binds it and a constant otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

from .errors import ArityMismatch, FormulaSyntaxError, NameClash, ReservedByte
from .logic import (
    PSEUDO_BLANK,
    And,
    Atom,
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
    SymbolTable,
    Term,
    Variable,
)

if TYPE_CHECKING:
    from .grounder import AtomTable, GroundInstanceSet
    from .prop import CNF

KEYWORDS = {"forall", "exists"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op><->|->|[~&|().,=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "op" or "eof"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    hit = text.find(PSEUDO_BLANK)
    if hit >= 0:
        raise ReservedByte(hit)
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.bound: list[str] = []
        self.relations: dict[str, int] = {}
        self.functions: dict[str, int] = {}
        self.constants: set[str] = set()
        self.variables: set[str] = set()

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind == "eof":
            self.fail(f"expected {text!r}", (text,))
        return self.advance()

    def fail(self, message: str, expected: tuple[str, ...] = ()):
        found = self.tok.text or "end of input"
        raise FormulaSyntaxError(f"{message}, found {found!r}", self.tok.pos, expected)

    # -- formulas -------------------------------------------------------------

    def formula(self) -> Formula:
        return self.iff()

    def quantified(self) -> Formula:
        kind = self.advance().text
        names = []
        while self.tok.kind == "ident" and self.tok.text not in KEYWORDS:
            tok = self.advance()
            if not tok.text[0].islower():
                raise FormulaSyntaxError(
                    f"variable {tok.text!r} must start lowercase", tok.pos
                )
            names.append(tok.text)
        if not names:
            self.fail("expected a variable name", ("identifier",))
        self.expect(".")
        for name in names:
            self.variables.add(name)
        self.bound.extend(names)
        body = self.formula()
        del self.bound[len(self.bound) - len(names):]
        node = Forall if kind == "forall" else Exists
        for name in reversed(names):
            body = node(name, body)
        return body

    def iff(self) -> Formula:
        left = self.imp()
        if self.tok.text == "<->" and self.tok.kind == "op":
            self.advance()
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.tok.text == "->" and self.tok.kind == "op":
            self.advance()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.tok.text == "|" and self.tok.kind == "op":
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.tok.text == "&" and self.tok.kind == "op":
            self.advance()
            left = And(left, self.unary())
        return left

    def _at_quantifier(self) -> bool:
        return self.tok.kind == "ident" and self.tok.text in KEYWORDS

    def unary(self) -> Formula:
        if self.tok.text == "~" and self.tok.kind == "op":
            self.advance()
            return Not(self.unary())
        if self._at_quantifier():
            return self.quantified()
        return self.primary()

    def primary(self) -> Formula:
        tok = self.tok
        if tok.text == "(" and tok.kind == "op":
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind != "ident":
            self.fail("expected a formula", ("(", "~", "forall", "exists", "identifier"))
        if tok.text[0].isupper():
            self.advance()
            args = self.arguments(tok)
            self._declare(self.relations, tok.text, len(args))
            return Atom(tok.text, args)
        left = self.term()
        self.expect("=")
        return Equal(left, self.term())

    def arguments(self, head: Token) -> tuple[Term, ...]:
        if self.tok.text != "(":
            raise FormulaSyntaxError(
                f"{head.text} needs an argument list (nullary symbols are not supported)",
                self.tok.pos,
                ("(",),
            )
        self.advance()
        args = [self.term()]
        while self.tok.text == ",":
            self.advance()
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def term(self) -> Term:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.fail("expected a term", ("identifier",))
        if not tok.text[0].islower():
            raise FormulaSyntaxError(f"term {tok.text!r} must start lowercase", tok.pos)
        self.advance()
        if self.tok.text == "(":
            args = self.arguments(tok)
            self._declare(self.functions, tok.text, len(args))
            return FunctionApp(tok.text, args)
        if tok.text in self.bound:
            return Variable(tok.text)
        self.constants.add(tok.text)
        return Constant(tok.text)

    def _declare(self, table: dict[str, int], name: str, arity: int):
        if table.setdefault(name, arity) != arity:
            raise ArityMismatch(name, table[name], arity)

    def symbols(self) -> SymbolTable:
        roles = {
            "relation": set(self.relations),
            "function": set(self.functions),
            "constant": self.constants,
            "variable": self.variables,
        }
        names = list(roles)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                both = roles[a] & roles[b]
                if both:
                    raise NameClash(f"{sorted(both)} used both as {a} and {b}")
        return SymbolTable(
            self.relations, tuple(sorted(self.constants)), self.functions, frozenset(self.variables)
        )


def parse(text: str | bytes) -> tuple[Formula, SymbolTable]:
    """Parse one formula and infer its symbol table."""
    if isinstance(text, bytes):
        hit = text.find(PSEUDO_BLANK.encode())
        if hit >= 0:
            raise ReservedByte(hit)
        text = text.decode("utf-8")
    p = _Parser(text)
    if p.tok.kind == "eof":
        p.fail("empty input", ("formula",))
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input", ("end of input",))
    return f, p.symbols()


def strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def read_formula_file(path: str | Path) -> tuple[Formula, SymbolTable]:
    """Formula files hold one formula; ``#`` starts a comment."""
    return parse(strip_comments(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# Pretty-printing

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def _prec(f: Formula) -> int:
    if isinstance(f, (Forall, Exists)):
        return 0
    return _PREC.get(type(f), 6)


def format_term(t: Term) -> str:
    if isinstance(t, FunctionApp):
        return f"{t.name}({','.join(format_term(a) for a in t.args)})"
    return t.name


def _pp(f: Formula, need: int, gap: str) -> str:
    if isinstance(f, Atom):
        out = f"{f.relation}({','.join(format_term(a) for a in f.args)})"
    elif isinstance(f, Equal):
        out = f"{format_term(f.left)}{gap}={gap}{format_term(f.right)}"
    elif isinstance(f, Not):
        out = "~" + _pp(f.body, 5, gap)
    elif isinstance(f, (Forall, Exists)):
        kind = type(f)
        names = []
        while isinstance(f, kind):
            names.append(f.var)
            f = f.body
        word = "forall" if kind is Forall else "exists"
        out = f"{word} {' '.join(names)}{gap}.{gap}{_pp(f, 0, gap)}"
        return f"({out})" if need > 0 else out
    else:
        p = _PREC[type(f)]
        # Iff and Implies associate to the right, Or and And to the left.
        if isinstance(f, (Iff, Implies)):
            lhs, rhs = _pp(f.left, p + 1, gap), _pp(f.right, p, gap)
        else:
            lhs, rhs = _pp(f.left, p, gap), _pp(f.right, p + 1, gap)
        out = f"{lhs}{gap}{_OPS[type(f)]}{gap}{rhs}"
    return f"({out})" if _prec(f) < need else out


def pretty_print(f: Formula, compact: bool = False) -> str:
    """Canonical text with minimal parentheses.

    ``compact`` drops every optional space; the result still parses to ``f``.
    """
    return _pp(f, 0, "" if compact else " ")


# ---------------------------------------------------------------------------
# Output formats


def format_ground_set(gis: "GroundInstanceSet") -> str:
    return "".join(pretty_print(f) + "\n" for _, f in gis.instances)


def emit_dimacs(cnf: "CNF", atoms: "AtomTable | None" = None) -> str:
    """DIMACS CNF with ``c <index> <atom>`` comment lines for the atom mapping."""
    lines = []
    if atoms is not None:
        for index, atom in enumerate(atoms.backward, start=1):
            lines.append(f"c {index} {pretty_print(atom)}")
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for clause in cnf.clauses:
        lines.append(" ".join([*(str(lit) for lit in clause), "0"]))
    return "\n".join(lines) + "\n"
