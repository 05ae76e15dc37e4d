"""Questionnaire scoring, fixture tables, and the activation/shift metrics.

Dimension accuracy is the per-axis fraction of answers matching the
expected type letter.  From two accuracy tables the gain metric averages
the per-type difference (treated minus baseline) over the sixteen types,
and the agreement rate averages an equality indicator at an absolute
tolerance.  Activation accuracy is the fraction of episode steps that
reinforced the scenario's target function.  Shift accuracy compares each
run's final structural outcome against a generated expectation matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .adaptation import (
    EpisodeStep,
    ReflectionEvent,
    ScenarioQuestion,
    ShiftKind,
    StructureSnapshot,
    run_scenario_set,
)
from .oracle import Oracle, ScriptedOracle, answer_questionnaire_item
from .typology import (
    CANONICAL_ORDER,
    Dimension,
    MbtiType,
    PsychFunction,
    pair_for,
    same_attitude_opposite_function,
    valid_auxiliaries,
)
from .weights import DEFAULT_PARAMS, RangeParams, init_profile

DEFAULT_DAR_TOLERANCE = 1e-4
DEFAULT_SWEEP_SEED = 97
SWEEP_QUESTION_COUNT = 15


class UnknownItem(KeyError):
    """An answer references an item id absent from the item list."""


class EmptyDimension(ValueError):
    """A dimension has no items, so its accuracy is undefined."""


class MissingEntry(KeyError):
    """An accuracy table lacks a (type, dimension) cell."""


class MissingExpectation(ValueError):
    """A shift case has an expectation but no observed outcome."""


class ItemFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(message + where)


@dataclass(frozen=True)
class QuestionnaireItem:
    id: str
    text: str
    dimension: Dimension
    pole_a: str
    pole_b: str

    def __post_init__(self) -> None:
        if {self.pole_a, self.pole_b} != set(self.dimension.letters):
            raise ItemFormatError(
                f"item {self.id}: poles ({self.pole_a}, {self.pole_b}) do not cover "
                f"the {self.dimension.value} letters"
            )


def load_items(path: str | Path) -> list[QuestionnaireItem]:
    """Parse a JSON-lines item file; format errors carry the line number."""
    items: list[QuestionnaireItem] = []
    seen: set[str] = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            item = QuestionnaireItem(
                id=str(row["id"]),
                text=row["text"],
                dimension=Dimension(row["dimension"]),
                pole_a=row["pole_a"],
                pole_b=row["pole_b"],
            )
        except ItemFormatError as exc:
            raise ItemFormatError(str(exc), line=lineno) from None
        except (KeyError, ValueError, TypeError) as exc:
            raise ItemFormatError(f"bad item row: {exc}", line=lineno) from None
        if item.id in seen:
            raise ItemFormatError(f"duplicate item id {item.id}", line=lineno)
        seen.add(item.id)
        items.append(item)
    return items


def save_items(path: str | Path, items: Sequence[QuestionnaireItem]) -> None:
    lines = [
        json.dumps(
            {
                "id": it.id,
                "text": it.text,
                "dimension": it.dimension.value,
                "pole_a": it.pole_a,
                "pole_b": it.pole_b,
            }
        )
        for it in items
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


QUESTIONNAIRE_LAYOUTS: dict[str, dict[Dimension, int]] = {
    "mbti93": {Dimension.EI: 21, Dimension.SN: 26, Dimension.TF: 24, Dimension.JP: 22},
    "mbti70": {Dimension.EI: 10, Dimension.SN: 20, Dimension.TF: 20, Dimension.JP: 20},
}


def synthetic_questionnaire(layout: str) -> list[QuestionnaireItem]:
    """Placeholder items matching a published layout's per-dimension counts.

    Real item texts are user-supplied; these stand in for pipeline checks.
    """
    try:
        counts = QUESTIONNAIRE_LAYOUTS[layout]
    except KeyError:
        raise ValueError(f"unknown layout {layout!r}; options: {sorted(QUESTIONNAIRE_LAYOUTS)}") from None
    items: list[QuestionnaireItem] = []
    n = 0
    for dim in Dimension:
        first, second = dim.letters
        for k in range(counts[dim]):
            n += 1
            # alternate which pole sits on choice A so both orientations occur
            pole_a, pole_b = (first, second) if k % 2 == 0 else (second, first)
            items.append(
                QuestionnaireItem(
                    id=str(n),
                    text=f"Placeholder {dim.value} item {k + 1}",
                    dimension=dim,
                    pole_a=pole_a,
                    pole_b=pole_b,
                )
            )
    return items


def dimension_accuracy(
    answers: Mapping[str, str],
    items: Sequence[QuestionnaireItem],
    expected: MbtiType,
) -> dict[Dimension, float]:
    """Per-dimension fraction of answers whose pole matches the expected letter."""
    by_id = {it.id: it for it in items}
    for answer_id in answers:
        if answer_id not in by_id:
            raise UnknownItem(answer_id)
    totals = {dim: 0 for dim in Dimension}
    hits = {dim: 0 for dim in Dimension}
    for item in items:
        totals[item.dimension] += 1
        choice = answers.get(item.id)
        if choice is None:
            continue
        pole = item.pole_a if choice == "A" else item.pole_b
        if pole == expected.letter(item.dimension):
            hits[item.dimension] += 1
    for dim in Dimension:
        if totals[dim] == 0:
            raise EmptyDimension(f"no items for dimension {dim.value}")
    return {dim: hits[dim] / totals[dim] for dim in Dimension}


def run_questionnaire(
    profile, items: Sequence[QuestionnaireItem], oracle: Oracle
) -> dict[str, str]:
    """Answer every item; the profile is never mutated."""
    return {item.id: answer_questionnaire_item(profile, item, oracle) for item in items}


# --- accuracy fixtures -----------------------------------------------------

@dataclass(frozen=True)
class AccuracyTable:
    """Per-(type, dimension) accuracy fractions for one condition."""

    values: dict[tuple[MbtiType, Dimension], float]

    def get(self, mbti: MbtiType, dimension: Dimension) -> float:
        try:
            return self.values[(mbti, dimension)]
        except KeyError:
            raise MissingEntry(f"no entry for ({mbti.value}, {dimension.value})") from None


def fixtures_dir() -> Path:
    from importlib.resources import files

    return Path(str(files("jungtype").joinpath("fixtures")))


def load_accuracy_fixture(path: str | Path) -> dict:
    """Fixture file with both conditions; values stored as fractions."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    out = {"model": raw["model"], "questionnaire": raw["questionnaire"]}
    for condition in ("baseline", "weighted"):
        values: dict[tuple[MbtiType, Dimension], float] = {}
        for type_label, row in raw["values"].items():
            mbti = MbtiType.parse(type_label)
            for dim_label, pair in row.items():
                dim = Dimension(dim_label)
                values[(mbti, dim)] = pair[0 if condition == "baseline" else 1]
        out[condition] = AccuracyTable(values)
    return out


def load_activation_fixture(path: str | Path) -> dict:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    values = {
        (MbtiType.parse(t), PsychFunction.parse(fn)): v
        for t, row in raw["values"].items()
        for fn, v in row.items()
    }
    scenario_mean = {PsychFunction.parse(fn): v for fn, v in raw["scenario_mean"].items()}
    return {"model": raw["model"], "values": values, "scenario_mean": scenario_mean}


def dag(weighted: AccuracyTable, baseline: AccuracyTable, dimension: Dimension) -> float:
    """Mean per-type accuracy difference, treated minus baseline."""
    diffs = [weighted.get(m, dimension) - baseline.get(m, dimension) for m in MbtiType]
    return sum(diffs) / len(diffs)


def dar(
    weighted: AccuracyTable,
    baseline: AccuracyTable,
    dimension: Dimension,
    tolerance: float = DEFAULT_DAR_TOLERANCE,
) -> float:
    """Fraction of types whose two accuracies agree within the tolerance."""
    hits = [
        1 if abs(weighted.get(m, dimension) - baseline.get(m, dimension)) <= tolerance else 0
        for m in MbtiType
    ]
    return sum(hits) / len(hits)


def taa(steps: Sequence[EpisodeStep], target: PsychFunction) -> float:
    """Fraction of steps that reinforced the target function."""
    if not steps:
        raise ValueError("no steps to score")
    on_target = sum(1 for s in steps if s.boosted is target)
    return on_target / len(steps)


# --- structural shift expectations -----------------------------------------

@dataclass(frozen=True)
class ShiftOutcome:
    kind: ShiftKind
    dominant: PsychFunction
    auxiliary: PsychFunction


@dataclass(frozen=True)
class ExpectedShift:
    kind: ShiftKind
    dominant: PsychFunction
    allowed_auxiliaries: frozenset

    def matches(self, outcome: ShiftOutcome) -> bool:
        return (
            outcome.kind is self.kind
            and outcome.dominant is self.dominant
            and outcome.auxiliary in self.allowed_auxiliaries
        )


@dataclass(frozen=True)
class ShiftExpectation:
    """Acceptable final outcomes for one (profile, target) cell."""

    alternatives: tuple[ExpectedShift, ...]

    def matches(self, outcome: ShiftOutcome) -> bool:
        return any(alt.matches(outcome) for alt in self.alternatives)


def expected_shift(mbti: MbtiType, target: PsychFunction) -> ShiftExpectation:
    """Expected outcome of sustained reinforcement of `target` on `mbti`.

    Reinforcing the dominant changes nothing.  Reinforcing the auxiliary
    swaps the pair.  The dominant's same-attitude counterpart replaces the
    dominant; the auxiliary's replaces the auxiliary and, if reinforcement
    continues long enough, is promoted over the dominant as well.  Any
    other function reorganizes the structure around itself with either
    valid auxiliary.
    """
    dom, aux = pair_for(mbti)
    if target is dom:
        alts = (ExpectedShift(ShiftKind.NO_CHANGE, dom, frozenset({aux})),)
    elif target is aux:
        alts = (ExpectedShift(ShiftKind.ROLE_SWAP, aux, frozenset({dom})),)
    elif target is same_attitude_opposite_function(dom):
        alts = (ExpectedShift(ShiftKind.DOMINANT_REPLACEMENT, target, frozenset({aux})),)
    elif target is same_attitude_opposite_function(aux):
        alts = (
            ExpectedShift(ShiftKind.ROLE_SWAP, target, frozenset({dom})),
            ExpectedShift(ShiftKind.AUXILIARY_REPLACEMENT, dom, frozenset({target})),
        )
    else:
        alts = (
            ExpectedShift(
                ShiftKind.STRUCTURAL_REORGANIZATION, target, frozenset(valid_auxiliaries(target))
            ),
        )
    return ShiftExpectation(alts)


def expectation_matrix() -> dict[tuple[MbtiType, PsychFunction], ShiftExpectation]:
    return {
        (mbti, target): expected_shift(mbti, target)
        for mbti in MbtiType
        for target in CANONICAL_ORDER
    }


def summarize_shift(
    initial: StructureSnapshot, events: Sequence[ReflectionEvent]
) -> ShiftOutcome:
    """Reduce a run to its last structural change plus the final pairing."""
    kind = ShiftKind.NO_CHANGE
    structure = initial
    for event in events:
        if event.kind is not ShiftKind.NO_CHANGE:
            kind = event.kind
        structure = event.after
    return ShiftOutcome(kind, structure.dominant, structure.auxiliary)


def psa(cases: Sequence[tuple[ShiftExpectation, ShiftOutcome | None]]) -> float:
    """Fraction of cases whose outcome matches its expectation."""
    if not cases:
        raise MissingExpectation("no shift cases to score")
    hits = 0
    for expectation, outcome in cases:
        if outcome is None:
            raise MissingExpectation("expectation present without an observed outcome")
        if expectation.matches(outcome):
            hits += 1
    return hits / len(cases)


# --- scenario sets ----------------------------------------------------------

SCENARIO_PRINCIPLES: dict[PsychFunction, tuple[str, str, str]] = {
    PsychFunction.TE: (
        "goal-directed execution",
        "efficiency under structured planning",
        "objective external standards",
    ),
    PsychFunction.TI: (
        "internal logical consistency",
        "conceptual dissection of a problem",
        "independent analytical judgment",
    ),
    PsychFunction.FE: (
        "maintaining group harmony",
        "responsiveness to others' feelings",
        "upholding shared social values",
    ),
    PsychFunction.FI: (
        "alignment with inner values",
        "personal authenticity under pressure",
        "empathic moral concern",
    ),
    PsychFunction.SE: (
        "immediate sensory engagement",
        "acting in the present moment",
        "concrete environmental detail",
    ),
    PsychFunction.SI: (
        "drawing on past experience",
        "methodical routine and reliability",
        "detailed recall and comparison",
    ),
    PsychFunction.NE: (
        "divergent generation of possibilities",
        "novel cross-domain associations",
        "open-ended exploration",
    ),
    PsychFunction.NI: (
        "long-range pattern synthesis",
        "symbolic and thematic insight",
        "convergence on a future vision",
    ),
}

SCENARIOS_PER_SET = 3
QUESTIONS_PER_SCENARIO = 5


@dataclass(frozen=True)
class Scenario:
    title: str
    questions: tuple[tuple[str, tuple[str, ...]], ...]  # (text, tags) rows

    def __post_init__(self) -> None:
        if len(self.questions) != QUESTIONS_PER_SCENARIO:
            raise ValueError(
                f"scenario {self.title!r} has {len(self.questions)} questions, "
                f"expected {QUESTIONS_PER_SCENARIO}"
            )


@dataclass(frozen=True)
class ScenarioSet:
    target: PsychFunction
    scenarios: tuple[Scenario, ...]

    def __post_init__(self) -> None:
        if len(self.scenarios) != SCENARIOS_PER_SET:
            raise ValueError(
                f"scenario set has {len(self.scenarios)} scenarios, expected {SCENARIOS_PER_SET}"
            )

    def questions(self, start_index: int = 1) -> list[ScenarioQuestion]:
        out: list[ScenarioQuestion] = []
        idx = start_index
        for scenario in self.scenarios:
            for text, tags in scenario.questions:
                out.append(ScenarioQuestion(index=idx, text=text, target=self.target, tags=tags))
                idx += 1
        return out


def synthetic_scenario_set(target: PsychFunction) -> ScenarioSet:
    """Generated placeholder set: one scenario per design principle."""
    scenarios = []
    for s, principle in enumerate(SCENARIO_PRINCIPLES[target], start=1):
        rows = tuple(
            (
                f"[{target.value} scenario {s}] Question {q}: a situation calling for {principle}.",
                (principle,),
            )
            for q in range(1, QUESTIONS_PER_SCENARIO + 1)
        )
        scenarios.append(Scenario(title=f"{target.value} scenario {s}: {principle}", questions=rows))
    return ScenarioSet(target=target, scenarios=tuple(scenarios))


def load_scenario_set(path: str | Path) -> ScenarioSet:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    scenarios = tuple(
        Scenario(
            title=s.get("title", ""),
            questions=tuple((q["text"], tuple(q.get("tags", ()))) for q in s["questions"]),
        )
        for s in raw["scenarios"]
    )
    return ScenarioSet(target=PsychFunction.parse(raw["target"]), scenarios=scenarios)


def save_scenario_set(path: str | Path, scenario_set: ScenarioSet) -> None:
    payload = {
        "target": scenario_set.target.value,
        "scenarios": [
            {
                "title": s.title,
                "questions": [{"text": t, "tags": list(tags)} for t, tags in s.questions],
            }
            for s in scenario_set.scenarios
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def scripted_shift_sweep(
    base_seed: int = DEFAULT_SWEEP_SEED, params: RangeParams = DEFAULT_PARAMS
) -> dict:
    """Run all 16 profiles x 8 targets with the scripted oracle.

    Returns cell outcomes keyed by (mbti, target) plus the overall shift
    accuracy against the generated expectation matrix.  Deterministic for a
    given base seed: cell seeds are derived by enumeration order.
    """
    matrix = expectation_matrix()
    cells: dict[tuple[MbtiType, PsychFunction], dict] = {}
    cases: list[tuple[ShiftExpectation, ShiftOutcome | None]] = []
    for i, mbti in enumerate(MbtiType):
        for j, target in enumerate(CANONICAL_ORDER):
            seed = base_seed + 8 * i + j
            profile = init_profile(mbti, params, seed=seed)
            initial = StructureSnapshot(profile.dominant, profile.auxiliary)
            questions = synthetic_scenario_set(target).questions()
            final, steps = run_scenario_set(profile, questions, ScriptedOracle(target=target), params)
            events = [s.reflection for s in steps if s.reflection is not None]
            outcome = summarize_shift(initial, events)
            cells[(mbti, target)] = {
                "seed": seed,
                "outcome": outcome,
                "events": events,
                "final_mbti": final.mbti,
                "activation": taa(steps, target),
            }
            cases.append((matrix[(mbti, target)], outcome))
    return {"cells": cells, "psa": psa(cases), "expectations": matrix}
