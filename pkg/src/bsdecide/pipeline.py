"""The end-to-end reduction: parse, classify, ground, translate, solve, and
optionally cross-check against the model oracle."""

from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .errors import NotInFragment, StageError
from .grounder import (
    DEFAULT_INSTANCE_CAP,
    AtomTable,
    GroundInstanceSet,
    HerbrandUniverse,
    WitnessPolicy,
    ground,
    herbrand_universe,
    pi_translate,
    skolemize,
    witness_segment,
)
from .logic import BSExpression, Classification, SBSegment, classify
from .oracle import DEFAULT_GUARD, ModelResult, decide_by_bound
from .padding import pad_to, unpad
from .prop import CNF, Verdict, dpll_solve, to_cnf
from .syntax import format_ground_set, parse, pretty_print, strip_comments


@dataclass
class Decision:
    """Outcome of deciding one BS expression through grounding."""

    sat: bool
    policy: WitnessPolicy
    universe: HerbrandUniverse
    ground_set: GroundInstanceSet
    atoms: AtomTable
    cnf: CNF
    verdict: Verdict
    witnesses: tuple[str, ...] = ()
    choices_tried: int = 1
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def ground_count(self) -> int:
        return len(self.ground_set)

    def atom_values(self) -> dict[str, bool]:
        """The model restricted to ground atoms, keyed by their printed form."""
        if not self.sat:
            return {}
        return {
            pretty_print(atom): self.verdict.assignment.get(i, False)
            for i, atom in enumerate(self.atoms.backward, start=1)
        }


class _Clock:
    def __init__(self):
        self.ms: dict[str, float] = {}

    def run(self, stage: str, fn, *args, **kwargs):
        start = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        except StageError:
            raise
        except Exception as exc:
            raise StageError(stage, exc) from exc
        finally:
            self.ms[stage] = self.ms.get(stage, 0.0) + (time.perf_counter() - start) * 1e3


def _solve_segment(seg: SBSegment, universe: HerbrandUniverse, cap: int, clock: _Clock):
    gis = clock.run("ground", ground, seg, universe, cap)
    props, atoms = clock.run("translate", pi_translate, gis)
    cnf = clock.run("translate", to_cnf, props, len(atoms))
    verdict = clock.run("solve", dpll_solve, cnf)
    return gis, atoms, cnf, verdict


def decide(
    expr: SBSegment | BSExpression,
    policy: WitnessPolicy = WitnessPolicy.SKOLEM,
    cap: int = DEFAULT_INSTANCE_CAP,
    clock: _Clock | None = None,
) -> Decision:
    """Decide satisfiability by grounding and DPLL.

    Skolem policy replaces existential variables by fresh constants.  The
    paper-literal policy tries every tuple of witnesses drawn from the
    formula's own constants and answers SAT as soon as one tuple works.
    """
    clock = clock or _Clock()
    policy = WitnessPolicy(policy)
    if isinstance(expr, BSExpression) and not expr.exist_vars:
        expr = expr.segment()
    universe = herbrand_universe(expr, policy)
    if isinstance(expr, SBSegment):
        gis, atoms, cnf, verdict = _solve_segment(expr, universe, cap, clock)
        return Decision(verdict.sat, policy, universe, gis, atoms, cnf, verdict, timings_ms=clock.ms)
    if policy is WitnessPolicy.SKOLEM:
        seg = skolemize(expr)
        gis, atoms, cnf, verdict = _solve_segment(seg, universe, cap, clock)
        return Decision(
            verdict.sat, policy, universe, gis, atoms, cnf, verdict,
            witnesses=universe.skolem_constants, timings_ms=clock.ms,
        )
    tried = 0
    for witnesses in itertools.product(universe.members, repeat=expr.s):
        tried += 1
        seg = witness_segment(expr, witnesses)
        gis, atoms, cnf, verdict = _solve_segment(seg, universe, cap, clock)
        if verdict.sat:
            break
    return Decision(
        verdict.sat, policy, universe, gis, atoms, cnf, verdict,
        witnesses=witnesses, choices_tried=tried, timings_ms=clock.ms,
    )


# ---------------------------------------------------------------------------
# Reports


@dataclass
class PipelineReport:
    input_class: str
    policy: str
    n: int
    s: int = 0
    t: int = 0
    m: int = 0
    universe_size: int = 0
    padded_length: int | None = None
    k: int | None = None
    ground_count: int = 0
    prop_var_count: int = 0
    cnf_var_count: int = 0
    clause_count: int = 0
    verdict: str = ""
    witness: dict[str, bool] | None = None
    existential_witnesses: list[str] = field(default_factory=list)
    choices_tried: int = 1
    oracle_verdict: str | None = None
    oracle_model: dict | None = None
    agreement: bool | None = None
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def ns_per_padded_byte(self) -> float | None:
        if not self.padded_length:
            return None
        return sum(self.timings_ms.values()) * 1e6 / self.padded_length

    def to_json(self) -> dict[str, Any]:
        out = asdict(self)
        out["class"] = out.pop("input_class")
        for stage in ("parse", "ground", "translate", "solve"):
            out["timings_ms"].setdefault(stage, 0.0)
        if self.witness is None:
            out.pop("witness")
        out["ns_per_padded_byte"] = self.ns_per_padded_byte
        return out


def run_pipeline(
    source: str | Path | bytes,
    policy: WitnessPolicy | str = WitnessPolicy.SKOLEM,
    padded: bool = False,
    k: int = 1,
    cap: int = DEFAULT_INSTANCE_CAP,
    oracle_check: bool = False,
    guard: int = DEFAULT_GUARD,
    ground_out: str | Path | None = None,
    witness: bool = True,
) -> PipelineReport:
    """Run every stage on a formula file (or raw bytes) and time each one.

    With ``padded`` the input must be a padded blob; it is unpadded first and,
    if ``ground_out`` is given, the ground-set file is padded to a multiple of
    the input's padded length.
    """
    clock = _Clock()
    policy = WitnessPolicy(policy)
    raw = source if isinstance(source, bytes) else clock.run("read", Path(source).read_bytes)
    padded_length = None
    if padded:
        payload = clock.run("unpad", unpad, raw, k)
        padded_length = len(raw)
        text = payload.decode("utf-8")
    else:
        payload = raw
        text = strip_comments(raw.decode("utf-8"))
    formula, symbols = clock.run("parse", parse, text)
    cls: Classification = clock.run("classify", classify, formula, symbols)
    if not cls.ok:
        raise StageError("classify", NotInFragment(v.value for v in cls.violations))
    expr = cls.expression
    decision = decide(expr, policy, cap, clock)

    report = PipelineReport(
        input_class=cls.fragment.value,
        policy=policy.value,
        n=len(payload),
        s=cls.bs.s,
        t=cls.bs.t,
        m=cls.bs.m,
        universe_size=len(decision.universe),
        padded_length=padded_length,
        k=k if padded else None,
        ground_count=decision.ground_count,
        prop_var_count=len(decision.atoms),
        cnf_var_count=decision.cnf.num_vars,
        clause_count=len(decision.cnf.clauses),
        verdict="SAT" if decision.sat else "UNSAT",
        witness=decision.atom_values() if witness and decision.sat else None,
        existential_witnesses=list(decision.witnesses),
        choices_tried=decision.choices_tried,
    )
    if ground_out is not None:
        text_out = format_ground_set(decision.ground_set).encode("utf-8")
        if padded_length:
            text_out = pad_to(text_out, padded_length)
        clock.run("write", Path(ground_out).write_bytes, text_out)
    if oracle_check:
        result: ModelResult = clock.run("oracle", decide_by_bound, cls.bs if cls.sbs is None else cls.sbs, guard)
        report.oracle_verdict = "SAT" if result.sat else "UNSAT"
        report.oracle_model = result.structure.to_json() if result.structure else None
        report.agreement = result.sat == decision.sat
    report.timings_ms = dict(clock.ms)
    return report
