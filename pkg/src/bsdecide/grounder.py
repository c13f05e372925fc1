"""Herbrand universes, existential witnesses, ground instances and the
translation of ground formulas into propositional ones."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from .errors import ExplosionGuard
from .logic import (
    AUTO_CONSTANT,
    And,
    Atom,
    BSExpression,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    SBSegment,
    con_of,
    replace_variables,
    substitute_ground,
)
from .prop import PNot, POr, PropFormula, PVar

DEFAULT_INSTANCE_CAP = 10**6
SKOLEM_PREFIX = "_sk"


class WitnessPolicy(str, enum.Enum):
    SKOLEM = "skolem"
    PAPER_LITERAL = "paper-literal"


@dataclass(frozen=True)
class HerbrandUniverse:
    constants: tuple[str, ...]
    auto_added_a0: bool = False
    skolem_constants: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.members:
            raise ValueError("a Herbrand universe is never empty")
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate constant in Herbrand universe")

    @property
    def members(self) -> tuple[str, ...]:
        """Enumeration order: source constants sorted, then Skolem constants."""
        return self.constants + self.skolem_constants

    def __len__(self) -> int:
        return len(self.members)


def skolem_names(s: int) -> tuple[str, ...]:
    return tuple(f"{SKOLEM_PREFIX}{i}" for i in range(1, s + 1))


def herbrand_universe(
    expr: SBSegment | BSExpression, policy: WitnessPolicy = WitnessPolicy.SKOLEM
) -> HerbrandUniverse:
    source = tuple(sorted(con_of(expr.matrix)))
    s = expr.s if isinstance(expr, BSExpression) else 0
    skolem = skolem_names(s) if policy is WitnessPolicy.SKOLEM else ()
    if not source and not skolem:
        return HerbrandUniverse((AUTO_CONSTANT,), auto_added_a0=True)
    return HerbrandUniverse(source, False, skolem)


def skolemize(bs: BSExpression) -> SBSegment:
    names = skolem_names(bs.s)
    matrix = replace_variables(bs.matrix, dict(zip(bs.exist_vars, names)))
    return SBSegment(bs.univ_vars, matrix, bs.symbols.with_constants(names))


def witness_segment(bs: BSExpression, witnesses: tuple[str, ...]) -> SBSegment:
    """The segment left after fixing each existential variable to a constant."""
    matrix = replace_variables(bs.matrix, dict(zip(bs.exist_vars, witnesses)))
    return SBSegment(bs.univ_vars, matrix, bs.symbols.with_constants(witnesses))


@dataclass(frozen=True)
class GroundInstanceSet:
    instances: tuple[tuple[tuple[str, ...], Formula], ...]
    source: SBSegment

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def formulas(self) -> list[Formula]:
        return [f for _, f in self.instances]


def ground(
    seg: SBSegment, universe: HerbrandUniverse, cap: int = DEFAULT_INSTANCE_CAP
) -> GroundInstanceSet:
    """All m**t ground instances, tuples in lexicographic universe order."""
    m, t = len(universe), seg.t
    count = m**t
    if count > cap:
        raise ExplosionGuard(count, cap)
    instances = []
    for values in itertools.product(universe.members, repeat=t):
        instances.append((values, substitute_ground(seg.matrix, dict(zip(seg.univ_vars, values)))))
    return GroundInstanceSet(tuple(instances), seg)


# ---------------------------------------------------------------------------
# Ground atoms <-> propositional variables


@dataclass
class AtomTable:
    forward: dict[Atom, int] = field(default_factory=dict)
    backward: list[Atom] = field(default_factory=list)

    def index(self, atom: Atom) -> int:
        if atom not in self.forward:
            self.backward.append(atom)
            self.forward[atom] = len(self.backward)
        return self.forward[atom]

    def atom(self, index: int) -> Atom:
        return self.backward[index - 1]

    def __len__(self) -> int:
        return len(self.backward)


def pi(f: Formula, atoms: AtomTable) -> PropFormula:
    if isinstance(f, Atom):
        return PVar(atoms.index(f))
    if isinstance(f, Not):
        return PNot(pi(f.body, atoms))
    if not isinstance(f, (And, Or, Implies, Iff)):
        raise TypeError(f"cannot translate {type(f).__name__}; ground instances are equality- and quantifier-free")
    a, b = pi(f.left, atoms), pi(f.right, atoms)
    if isinstance(f, Or):
        return POr(a, b)
    if isinstance(f, And):
        return PNot(POr(PNot(a), PNot(b)))
    if isinstance(f, Implies):
        return POr(PNot(a), b)
    return POr(PNot(POr(a, b)), PNot(POr(PNot(a), PNot(b))))


def pi_translate(
    gis: GroundInstanceSet | list[Formula], atoms: AtomTable | None = None
) -> tuple[list[PropFormula], AtomTable]:
    """Translate ground formulas, numbering atoms in first-occurrence order."""
    atoms = AtomTable() if atoms is None else atoms
    formulas = gis.formulas if isinstance(gis, GroundInstanceSet) else gis
    return [pi(f, atoms) for f in formulas], atoms


def rho(p: PropFormula, atoms: AtomTable) -> Formula:
    """Inverse of ``pi`` onto the negation/disjunction fragment."""
    if isinstance(p, PVar):
        return atoms.atom(p.index)
    if isinstance(p, PNot):
        return Not(rho(p.body, atoms))
    return Or(rho(p.left, atoms), rho(p.right, atoms))
