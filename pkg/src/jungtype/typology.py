"""Eight psychological functions, the sixteen type pairings, and structural rules.

Every function couples an attitude (extraverted or introverted) with one of
four base functions.  Thinking and Feeling are the judging pair, Sensation
and Intuition the perceiving pair; opposition swaps a function for its
same-kind counterpart (T with F, S with N).  Each of the sixteen types names
a dominant and an auxiliary function, and every valid pairing opposes both
the attitude and the kind of the dominant.
"""

from __future__ import annotations

from enum import Enum


class Attitude(Enum):
    EXTRAVERTED = "E"
    INTROVERTED = "I"

    @property
    def opposite(self) -> "Attitude":
        return Attitude.INTROVERTED if self is Attitude.EXTRAVERTED else Attitude.EXTRAVERTED


class FunctionKind(Enum):
    JUDGING = "judging"
    PERCEIVING = "perceiving"


class BaseFunction(Enum):
    THINKING = "T"
    FEELING = "F"
    SENSATION = "S"
    INTUITION = "N"

    @property
    def kind(self) -> FunctionKind:
        if self in (BaseFunction.THINKING, BaseFunction.FEELING):
            return FunctionKind.JUDGING
        return FunctionKind.PERCEIVING

    @property
    def opposite(self) -> "BaseFunction":
        # opposition stays within a kind: T<->F, S<->N
        return {
            BaseFunction.THINKING: BaseFunction.FEELING,
            BaseFunction.FEELING: BaseFunction.THINKING,
            BaseFunction.SENSATION: BaseFunction.INTUITION,
            BaseFunction.INTUITION: BaseFunction.SENSATION,
        }[self]


class PsychFunction(Enum):
    # Declaration order is the canonical iteration order used for every
    # deterministic tie-break in the engine.  Do not reorder.
    TI = "Ti"
    NE = "Ne"
    SI = "Si"
    FE = "Fe"
    TE = "Te"
    NI = "Ni"
    SE = "Se"
    FI = "Fi"

    @property
    def base_function(self) -> BaseFunction:
        return BaseFunction(self.value[0])

    @property
    def attitude(self) -> Attitude:
        return Attitude.EXTRAVERTED if self.value[1] == "e" else Attitude.INTROVERTED

    @property
    def kind(self) -> FunctionKind:
        return self.base_function.kind

    @classmethod
    def parse(cls, label: str) -> "PsychFunction":
        for fn in cls:
            if fn.value.lower() == label.strip().lower():
                return fn
        raise ValueError(f"unknown function label: {label!r}")


CANONICAL_ORDER: tuple[PsychFunction, ...] = tuple(PsychFunction)


class Dimension(Enum):
    """One preference axis of a four-letter type code."""

    EI = "EI"
    SN = "SN"
    TF = "TF"
    JP = "JP"

    @property
    def letters(self) -> tuple[str, str]:
        return (self.value[0], self.value[1])

    @property
    def position(self) -> int:
        return ("EI", "SN", "TF", "JP").index(self.value)


class MbtiType(Enum):
    INFJ = "INFJ"
    INTJ = "INTJ"
    ISFJ = "ISFJ"
    ISTJ = "ISTJ"
    INFP = "INFP"
    ISFP = "ISFP"
    INTP = "INTP"
    ISTP = "ISTP"
    ENFP = "ENFP"
    ENTP = "ENTP"
    ESFP = "ESFP"
    ESTP = "ESTP"
    ENFJ = "ENFJ"
    ESFJ = "ESFJ"
    ENTJ = "ENTJ"
    ESTJ = "ESTJ"

    @classmethod
    def parse(cls, label: str) -> "MbtiType":
        try:
            return cls(label.strip().upper())
        except ValueError:
            raise ValueError(f"unknown type label: {label!r}") from None

    def letter(self, dimension: Dimension) -> str:
        return self.value[dimension.position]


_F = PsychFunction

# Dominant and auxiliary per type.  The auxiliary always opposes the
# dominant in both attitude and kind.
PAIRING_TABLE: dict[MbtiType, tuple[PsychFunction, PsychFunction]] = {
    MbtiType.INFJ: (_F.NI, _F.FE),
    MbtiType.INTJ: (_F.NI, _F.TE),
    MbtiType.ISFJ: (_F.SI, _F.FE),
    MbtiType.ISTJ: (_F.SI, _F.TE),
    MbtiType.INFP: (_F.FI, _F.NE),
    MbtiType.ISFP: (_F.FI, _F.SE),
    MbtiType.INTP: (_F.TI, _F.NE),
    MbtiType.ISTP: (_F.TI, _F.SE),
    MbtiType.ENFP: (_F.NE, _F.FI),
    MbtiType.ENTP: (_F.NE, _F.TI),
    MbtiType.ESFP: (_F.SE, _F.FI),
    MbtiType.ESTP: (_F.SE, _F.TI),
    MbtiType.ENFJ: (_F.FE, _F.NI),
    MbtiType.ESFJ: (_F.FE, _F.SI),
    MbtiType.ENTJ: (_F.TE, _F.NI),
    MbtiType.ESTJ: (_F.TE, _F.SI),
}

_PAIR_TO_TYPE = {pair: mbti for mbti, pair in PAIRING_TABLE.items()}


class InvalidPairing(ValueError):
    """Raised for a dominant/auxiliary combination outside the sixteen rows."""


def pair_for(mbti: MbtiType) -> tuple[PsychFunction, PsychFunction]:
    return PAIRING_TABLE[mbti]


def mbti_for(dominant: PsychFunction, auxiliary: PsychFunction) -> MbtiType:
    try:
        return _PAIR_TO_TYPE[(dominant, auxiliary)]
    except KeyError:
        raise InvalidPairing(
            f"({dominant.value}, {auxiliary.value}) is not a valid dominant/auxiliary pairing"
        ) from None


def same_attitude_opposite_function(fn: PsychFunction) -> PsychFunction:
    """The unique function sharing `fn`'s attitude with the opposite base function."""
    target_base = fn.base_function.opposite
    for other in CANONICAL_ORDER:
        if other.attitude is fn.attitude and other.base_function is target_base:
            return other
    raise AssertionError("unreachable: opposition is total")


def valid_auxiliaries(dominant: PsychFunction) -> tuple[PsychFunction, PsychFunction]:
    """Both functions that may serve as auxiliary under `dominant`, canonical order.

    A valid auxiliary opposes the dominant in attitude and in kind, which
    leaves exactly two choices for every dominant.
    """
    out = tuple(
        fn
        for fn in CANONICAL_ORDER
        if fn.attitude is dominant.attitude.opposite and fn.kind is not dominant.kind
    )
    assert len(out) == 2
    return out  # type: ignore[return-value]
