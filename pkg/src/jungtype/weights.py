"""Weighted differentiation state and the operators that move it.

A profile assigns each of the eight functions a base weight and a temporary
weight.  Base weights always sum to 1.  The dominant is drawn from the high
range (high_cutoff, 1), the auxiliary from the low range (low_cutoff,
high_cutoff], and the six others from the undifferentiated range
(0, low_cutoff]; the raw draws are then normalized to unit sum, which
preserves their ordering.

Cutoff feasibility: with eight functions the two cutoffs must satisfy

    0 < low_cutoff < 1/8
    low_cutoff < high_cutoff < (1 - 6 * low_cutoff) / 2

or the unit-sum budget admits assignments that break the
dominant > auxiliary > others hierarchy.

Reinforcement raises temporary weights in fixed steps: a dormant function
starts at base + boost_step, an active one gains boost_step.  Declination
decays an active temporary weight by decay_factor.  Renormalization folds
elevation back into the base layer:

    new_base(f) = max(base(f), temp(f)) / sum_g max(base(g), temp(g))

after which every temporary weight resets to zero.  A profile with no
active temporary weights renormalizes to itself.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .typology import (
    CANONICAL_ORDER,
    MbtiType,
    PsychFunction,
    mbti_for,
    pair_for,
    same_attitude_opposite_function,
)


@dataclass(frozen=True)
class RangeParams:
    """Cutoffs and step sizes governing the weight dynamics."""

    high_cutoff: float = 0.30  # floor of the high range, top of the low range
    low_cutoff: float = 0.06   # floor of the low range, top of the undifferentiated range
    boost_step: float = 0.06
    decay_factor: float = 0.2
    dominance_cap: float = 0.5


DEFAULT_PARAMS = RangeParams()


def check_range_params(params: RangeParams) -> list[str]:
    """Return the violated parameter constraints, empty when all hold."""
    violations: list[str] = []
    if not 0 < params.low_cutoff:
        violations.append("0 < low_cutoff")
    if not params.low_cutoff < 0.125:
        violations.append("low_cutoff < 1/8")
    if not params.low_cutoff < params.high_cutoff:
        violations.append("low_cutoff < high_cutoff")
    if not params.high_cutoff < (1.0 - 6.0 * params.low_cutoff) / 2.0:
        violations.append("high_cutoff < (1 - 6*low_cutoff)/2")
    if not params.boost_step > 0:
        violations.append("boost_step > 0")
    if not 0 <= params.decay_factor < 1:
        violations.append("0 <= decay_factor < 1")
    if not 0.5 <= params.dominance_cap < 1:
        violations.append("0.5 <= dominance_cap < 1")
    return violations


class BadParams(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("range parameter constraints violated: " + "; ".join(violations))


class InactiveFunction(ValueError):
    """Raised when decaying a function whose temporary weight is zero."""


@dataclass
class WeightProfile:
    """Eight base and temporary weights plus the named dominant/auxiliary roles."""

    base: dict[PsychFunction, float]
    temp: dict[PsychFunction, float]
    dominant: PsychFunction
    auxiliary: PsychFunction

    def __post_init__(self) -> None:
        mbti_for(self.dominant, self.auxiliary)  # raises InvalidPairing on a bad row

    @property
    def mbti(self) -> MbtiType:
        return mbti_for(self.dominant, self.auxiliary)

    def effective(self, fn: PsychFunction) -> float:
        """Current strength: the temporary weight while active, else the base."""
        t = self.temp[fn]
        return t if t > 0 else self.base[fn]

    def copy(self) -> "WeightProfile":
        return WeightProfile(dict(self.base), dict(self.temp), self.dominant, self.auxiliary)


def sample_raw_weights(
    mbti: MbtiType, params: RangeParams, rng: random.Random
) -> dict[PsychFunction, float]:
    """Pre-normalization draws, one per function in canonical order.

    dominant in (high_cutoff, 1), auxiliary in (low_cutoff, high_cutoff],
    others in (0, low_cutoff].
    """
    dominant, auxiliary = pair_for(mbti)
    raw: dict[PsychFunction, float] = {}
    for fn in CANONICAL_ORDER:
        u = rng.random()
        if fn is dominant:
            while u == 0.0:  # keep the draw strictly above the cutoff
                u = rng.random()
            raw[fn] = params.high_cutoff + (1.0 - params.high_cutoff) * u
        elif fn is auxiliary:
            raw[fn] = params.high_cutoff - (params.high_cutoff - params.low_cutoff) * u
        else:
            raw[fn] = params.low_cutoff * (1.0 - u)
    return raw


def init_profile(mbti: MbtiType, params: RangeParams = DEFAULT_PARAMS, seed: int = 0) -> WeightProfile:
    """Seeded random profile for `mbti`, base weights normalized to unit sum."""
    bad = check_range_params(params)
    if bad:
        raise BadParams(bad)
    rng = random.Random(seed)
    raw = sample_raw_weights(mbti, params, rng)
    total = sum(raw.values())
    dominant, auxiliary = pair_for(mbti)
    return WeightProfile(
        base={fn: raw[fn] / total for fn in CANONICAL_ORDER},
        temp={fn: 0.0 for fn in CANONICAL_ORDER},
        dominant=dominant,
        auxiliary=auxiliary,
    )


def boost(profile: WeightProfile, fn: PsychFunction, params: RangeParams = DEFAULT_PARAMS) -> WeightProfile:
    """Reinforce `fn`: seed a dormant temp at base + step, else add a step."""
    out = profile.copy()
    if out.temp[fn] == 0.0:
        out.temp[fn] = out.base[fn] + params.boost_step
    else:
        out.temp[fn] += params.boost_step
    return out


def decay(profile: WeightProfile, fn: PsychFunction, params: RangeParams = DEFAULT_PARAMS) -> WeightProfile:
    """Shrink an active temporary weight by decay_factor."""
    if profile.temp[fn] == 0.0:
        raise InactiveFunction(f"{fn.value} has no active temporary weight to decay")
    out = profile.copy()
    out.temp[fn] *= params.decay_factor
    return out


def renormalize(profile: WeightProfile) -> WeightProfile:
    """Fold active temporary weights into the base layer and reset them."""
    merged = {fn: max(profile.base[fn], profile.temp[fn]) for fn in CANONICAL_ORDER}
    total = sum(merged.values())
    return WeightProfile(
        base={fn: merged[fn] / total for fn in CANONICAL_ORDER},
        temp={fn: 0.0 for fn in CANONICAL_ORDER},
        dominant=profile.dominant,
        auxiliary=profile.auxiliary,
    )


class Role(Enum):
    DOMINANT = "dominant"
    AUXILIARY = "auxiliary"


@dataclass(frozen=True)
class CandidateTrigger:
    """Some function's temporary weight reached the named role's base weight."""

    candidate: PsychFunction
    versus: Role


@dataclass(frozen=True)
class DominanceCapTrigger:
    """The dominant's effective weight reached the dominance cap."""

    effective: float


Trigger = CandidateTrigger | DominanceCapTrigger


def trigger_state(profile: WeightProfile, params: RangeParams = DEFAULT_PARAMS) -> Trigger | None:
    """Highest-priority structural trigger, or None.

    Dominant-level elevation outranks auxiliary-level elevation, which
    outranks the dominance cap.  Among dominant-level candidates the
    auxiliary itself is checked first, then the dominant's same-attitude
    counterpart, then the auxiliary's, then the rest in canonical order.
    The dominant never appears as a candidate: its own elevation is the
    cap's business.  At auxiliary level only the auxiliary's same-attitude
    counterpart can displace it, so only that function is eligible.
    """
    dom, aux = profile.dominant, profile.auxiliary
    dom_base = profile.base[dom]
    ranked = [aux, same_attitude_opposite_function(dom), same_attitude_opposite_function(aux)]
    ranked += [fn for fn in CANONICAL_ORDER if fn is not dom and fn not in ranked]
    for fn in ranked:
        if profile.temp[fn] >= dom_base:
            return CandidateTrigger(fn, Role.DOMINANT)
    shadow = same_attitude_opposite_function(aux)
    if profile.temp[shadow] >= profile.base[aux]:
        return CandidateTrigger(shadow, Role.AUXILIARY)
    if profile.effective(dom) >= params.dominance_cap:
        return DominanceCapTrigger(profile.effective(dom))
    return None
