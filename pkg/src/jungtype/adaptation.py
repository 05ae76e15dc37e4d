"""Episode engine: per-question reinforcement, compensation, and reflection.

Each scenario question is offered to the dominant/auxiliary pair.  When the
pair handles it, the handling function is reinforced.  When it cannot, the
oracle names a compensatory function outside the pair, and that function is
reinforced instead.  After every reinforcement the trigger state is
evaluated; a fired trigger is classified into exactly one structural rule
from the candidate's relationship to the current pair:

  - candidate is the auxiliary and reached the dominant's base: role swap.
  - candidate is the dominant's same-attitude counterpart and reached the
    dominant's base: dominant replacement (auxiliary untouched).
  - candidate is the auxiliary's same-attitude counterpart and reached the
    auxiliary's base: auxiliary replacement.
  - any other candidate that reached the dominant's base: structural
    reorganization, with a fresh auxiliary chosen for the new dominant.

The oracle reviews recent history and approves or declines the proposed
rewrite.  Approval rewrites the base layer and renormalizes; declination
decays the candidate's temporary weight and changes nothing else.  A
dominance-cap trigger renormalizes without any structural change.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .oracle import DEFAULT_MEMORY_WINDOW, Oracle, OracleRequest, RequestKind
from .typology import (
    MbtiType,
    PsychFunction,
    mbti_for,
    same_attitude_opposite_function,
    valid_auxiliaries,
)
from .weights import (
    CandidateTrigger,
    DominanceCapTrigger,
    RangeParams,
    Trigger,
    WeightProfile,
    boost,
    decay,
    renormalize,
    trigger_state,
)


class Outcome(Enum):
    SUCCESS = "success"
    FAILURE = "failure"


class ShiftKind(Enum):
    DOMINANT_REPLACEMENT = "dominant_replacement"
    AUXILIARY_REPLACEMENT = "auxiliary_replacement"
    ROLE_SWAP = "role_swap"
    STRUCTURAL_REORGANIZATION = "structural_reorganization"
    NO_CHANGE = "no_change"


@dataclass(frozen=True)
class StructureSnapshot:
    dominant: PsychFunction
    auxiliary: PsychFunction

    @property
    def mbti(self) -> MbtiType:
        return mbti_for(self.dominant, self.auxiliary)


@dataclass(frozen=True)
class ScenarioQuestion:
    index: int
    text: str
    target: PsychFunction
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ReflectionEvent:
    kind: ShiftKind
    before: StructureSnapshot
    after: StructureSnapshot
    approved: bool
    question_index: int


@dataclass(frozen=True)
class EpisodeStep:
    question_index: int
    handled_by: PsychFunction
    outcome: Outcome
    compensatory: PsychFunction | None
    trigger_fired: Trigger | None
    reflection: ReflectionEvent | None

    @property
    def boosted(self) -> PsychFunction:
        """The function actually reinforced this step."""
        if self.outcome is Outcome.SUCCESS:
            return self.handled_by
        assert self.compensatory is not None
        return self.compensatory


@dataclass
class MemoryLog:
    """Append-only episode history, ordered by question index."""

    steps: list[EpisodeStep] = field(default_factory=list)

    def append(self, step: EpisodeStep) -> None:
        if self.steps and step.question_index <= self.steps[-1].question_index:
            raise ValueError("question indices must increase")
        self.steps.append(step)

    def window(self, size: int = DEFAULT_MEMORY_WINDOW) -> tuple[EpisodeStep, ...]:
        return tuple(self.steps[-size:]) if size > 0 else ()


class InvalidCompensation(ValueError):
    """The oracle named the dominant or auxiliary as compensatory."""


class InvalidHandling(ValueError):
    """The oracle reported success by a function outside the pair."""


class InvalidAuxiliaryChoice(ValueError):
    """The oracle chose an auxiliary invalid for the new dominant."""


class UnclassifiableTrigger(ValueError):
    """A candidate trigger fits no structural rule (engine invariant breach)."""


def classify_trigger(profile: WeightProfile, candidate: PsychFunction) -> ShiftKind:
    """Map a fired candidate to its structural rule.  Mutually exclusive."""
    t = profile.temp[candidate]
    dom, aux = profile.dominant, profile.auxiliary
    if candidate is aux and t >= profile.base[dom]:
        return ShiftKind.ROLE_SWAP
    if t >= profile.base[dom] and candidate is same_attitude_opposite_function(dom):
        return ShiftKind.DOMINANT_REPLACEMENT
    if t >= profile.base[aux] and candidate is same_attitude_opposite_function(aux):
        return ShiftKind.AUXILIARY_REPLACEMENT
    excluded = {dom, aux, same_attitude_opposite_function(dom), same_attitude_opposite_function(aux)}
    if t >= profile.base[dom] and candidate not in excluded:
        return ShiftKind.STRUCTURAL_REORGANIZATION
    raise UnclassifiableTrigger(f"{candidate.value} fits no rule in its current elevation")


def post_rewrite_weights(
    profile: WeightProfile,
    kind: ShiftKind,
    new_dominant: PsychFunction,
    new_auxiliary: PsychFunction,
    params: RangeParams,
) -> WeightProfile:
    """Reassign base weights around the new pair, then renormalize.

    Assignments follow each function's role transition, with a 0.02 margin
    inside the ranges: a function entering the dominant role keeps its
    effective weight but at least high_cutoff + margin; one entering the
    auxiliary role lands at high_cutoff - margin; the old dominant or
    auxiliary dropping out of the pair falls to low_cutoff + margin or the
    low-range midpoint respectively.  Untouched functions keep their base.
    A reassigned function's temporary weight is consumed by its new base;
    remaining active functions fold in through the final renormalization.
    """
    mbti_for(new_dominant, new_auxiliary)  # reject invalid rows before mutating
    margin = 0.02
    old_dom, old_aux = profile.dominant, profile.auxiliary
    assignments: dict[PsychFunction, float] = {}
    if new_dominant is not old_dom:
        assignments[new_dominant] = max(profile.effective(new_dominant), params.high_cutoff + margin)
    if new_auxiliary is not old_aux:
        assignments[new_auxiliary] = params.high_cutoff - margin
    if old_dom not in (new_dominant, new_auxiliary):
        assignments[old_dom] = params.low_cutoff + margin
    if old_aux not in (new_dominant, new_auxiliary):
        assignments[old_aux] = (params.low_cutoff + params.high_cutoff) / 2.0
    out = profile.copy()
    for fn, value in assignments.items():
        out.base[fn] = value
        out.temp[fn] = 0.0
    out.dominant = new_dominant
    out.auxiliary = new_auxiliary
    return renormalize(out)


def reflect(
    profile: WeightProfile,
    trigger: Trigger,
    oracle: Oracle,
    params: RangeParams,
    log: MemoryLog,
    question_index: int = 0,
) -> tuple[WeightProfile, ReflectionEvent]:
    """Resolve a fired trigger into a rewrite, a declination, or a renormalization."""
    before = StructureSnapshot(profile.dominant, profile.auxiliary)
    if isinstance(trigger, DominanceCapTrigger):
        updated = renormalize(profile)
        event = ReflectionEvent(ShiftKind.NO_CHANGE, before, before, True, question_index)
        return updated, event

    candidate = trigger.candidate
    kind = classify_trigger(profile, candidate)
    if kind is ShiftKind.ROLE_SWAP:
        new_dom, new_aux = profile.auxiliary, profile.dominant
    elif kind is ShiftKind.DOMINANT_REPLACEMENT:
        new_dom, new_aux = candidate, profile.auxiliary
    elif kind is ShiftKind.AUXILIARY_REPLACEMENT:
        new_dom, new_aux = profile.dominant, candidate
    else:
        choices = valid_auxiliaries(candidate)
        resp = oracle.respond(
            OracleRequest(
                kind=RequestKind.CHOOSE_AUXILIARY,
                profile=profile,
                choices=choices,
                memory=log.window(),
            )
        )
        if resp.function not in choices:
            raise InvalidAuxiliaryChoice(
                f"{resp.function} is not a valid auxiliary for {candidate.value}"
            )
        new_dom, new_aux = candidate, resp.function

    after = StructureSnapshot(new_dom, new_aux)
    approval = oracle.respond(
        OracleRequest(
            kind=RequestKind.APPROVE_REWRITE,
            profile=profile,
            proposal=(kind, before, after),
            memory=log.window(),
        )
    )
    if approval.approved:
        updated = post_rewrite_weights(profile, kind, new_dom, new_aux, params)
        return updated, ReflectionEvent(kind, before, after, True, question_index)
    updated = decay(profile, candidate, params)
    return updated, ReflectionEvent(ShiftKind.NO_CHANGE, before, before, False, question_index)


def step(
    profile: WeightProfile,
    question: ScenarioQuestion,
    oracle: Oracle,
    params: RangeParams,
    log: MemoryLog,
) -> tuple[WeightProfile, EpisodeStep]:
    """Run one question: coordinate, reinforce, then reflect if triggered."""
    dom, aux = profile.dominant, profile.auxiliary
    handle = oracle.respond(
        OracleRequest(
            kind=RequestKind.HANDLE,
            profile=profile,
            text=question.text,
            memory=log.window(),
        )
    )
    if handle.success:
        handled = handle.handled_by
        if handled not in (dom, aux):
            raise InvalidHandling(f"success reported by non-pair function {handled}")
        outcome = Outcome.SUCCESS
        compensatory = None
        profile = boost(profile, handled, params)
    else:
        handled = handle.handled_by if handle.handled_by is not None else dom
        comp = oracle.respond(
            OracleRequest(
                kind=RequestKind.COMPENSATE,
                profile=profile,
                text=question.text,
                memory=log.window(),
            )
        )
        compensatory = comp.function
        if compensatory in (dom, aux):
            raise InvalidCompensation(
                f"compensatory function {compensatory.value} is already in the pair"
            )
        outcome = Outcome.FAILURE
        profile = boost(profile, compensatory, params)

    trigger = trigger_state(profile, params)
    reflection = None
    if trigger is not None:
        profile, reflection = reflect(profile, trigger, oracle, params, log, question.index)

    episode = EpisodeStep(question.index, handled, outcome, compensatory, trigger, reflection)
    log.append(episode)
    return profile, episode


def run_scenario_set(
    profile: WeightProfile,
    questions: list[ScenarioQuestion],
    oracle: Oracle,
    params: RangeParams = RangeParams(),
) -> tuple[WeightProfile, list[EpisodeStep]]:
    """Fold `step` over an ordered question list with a fresh memory log."""
    if not questions:
        raise ValueError("scenario set has no questions")
    log = MemoryLog()
    steps: list[EpisodeStep] = []
    for question in questions:
        profile, episode = step(profile, question, oracle, params, log)
        steps.append(episode)
    return profile, steps
