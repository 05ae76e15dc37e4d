"""Function algebra and the sixteen-row pairing table."""

import pytest

from jungtype.typology import (
    CANONICAL_ORDER,
    PAIRING_TABLE,
    Attitude,
    BaseFunction,
    Dimension,
    FunctionKind,
    InvalidPairing,
    MbtiType,
    PsychFunction,
    mbti_for,
    pair_for,
    same_attitude_opposite_function,
    valid_auxiliaries,
)

F = PsychFunction


def test_canonical_order_is_frozen():
    assert CANONICAL_ORDER == (F.TI, F.NE, F.SI, F.FE, F.TE, F.NI, F.SE, F.FI)


def test_function_decomposition():
    assert F.TI.base_function is BaseFunction.THINKING
    assert F.TI.attitude is Attitude.INTROVERTED
    assert F.TI.kind is FunctionKind.JUDGING
    assert F.SE.base_function is BaseFunction.SENSATION
    assert F.SE.attitude is Attitude.EXTRAVERTED
    assert F.SE.kind is FunctionKind.PERCEIVING
    assert F.NE.kind is FunctionKind.PERCEIVING
    assert F.FI.kind is FunctionKind.JUDGING


def test_base_function_opposition_stays_within_kind():
    for base in BaseFunction:
        assert base.opposite is not base
        assert base.opposite.kind is base.kind
        assert base.opposite.opposite is base


def test_attitude_opposite_is_involutive():
    for att in Attitude:
        assert att.opposite is not att
        assert att.opposite.opposite is att


def test_function_parse_accepts_any_case():
    assert F.parse("Ti") is F.TI
    assert F.parse("ti") is F.TI
    assert F.parse(" NE ") is F.NE
    with pytest.raises(ValueError):
        F.parse("Tx")


def test_same_attitude_opposite_function_is_involutive():
    for fn in CANONICAL_ORDER:
        other = same_attitude_opposite_function(fn)
        assert other is not fn
        assert other.attitude is fn.attitude
        assert other.base_function is fn.base_function.opposite
        assert same_attitude_opposite_function(other) is fn


def test_same_attitude_opposite_function_examples():
    assert same_attitude_opposite_function(F.TI) is F.FI
    assert same_attitude_opposite_function(F.NE) is F.SE
    assert same_attitude_opposite_function(F.NI) is F.SI
    assert same_attitude_opposite_function(F.FE) is F.TE


def test_pairing_table_structure():
    assert len(PAIRING_TABLE) == 16
    pairs = set(PAIRING_TABLE.values())
    assert len(pairs) == 16  # bijective
    for mbti, (dom, aux) in PAIRING_TABLE.items():
        assert aux.attitude is dom.attitude.opposite
        assert aux.kind is not dom.kind
        assert mbti_for(dom, aux) is mbti
        assert pair_for(mbti) == (dom, aux)


def test_pairing_table_spot_rows():
    assert pair_for(MbtiType.INTP) == (F.TI, F.NE)
    assert pair_for(MbtiType.ESTP) == (F.SE, F.TI)
    assert pair_for(MbtiType.INFJ) == (F.NI, F.FE)
    assert pair_for(MbtiType.ESTJ) == (F.TE, F.SI)
    assert pair_for(MbtiType.INFP) == (F.FI, F.NE)


def test_mbti_for_rejects_invalid_rows():
    with pytest.raises(InvalidPairing):
        mbti_for(F.TI, F.TE)  # same kind
    with pytest.raises(InvalidPairing):
        mbti_for(F.TI, F.NI)  # same attitude
    with pytest.raises(InvalidPairing):
        mbti_for(F.TI, F.TI)


def test_valid_auxiliaries_cover_the_pairing_table():
    for dom in CANONICAL_ORDER:
        choices = valid_auxiliaries(dom)
        assert len(choices) == 2
        for aux in choices:
            assert aux.attitude is dom.attitude.opposite
            assert aux.kind is not dom.kind
            mbti_for(dom, aux)  # every choice is a real row
        # canonical order within the tuple
        assert CANONICAL_ORDER.index(choices[0]) < CANONICAL_ORDER.index(choices[1])


def test_valid_auxiliaries_examples():
    assert valid_auxiliaries(F.TI) == (F.NE, F.SE)
    assert valid_auxiliaries(F.FE) == (F.SI, F.NI)


def test_mbti_parse_and_letters():
    assert MbtiType.parse("intp") is MbtiType.INTP
    assert MbtiType.parse(" ESTJ ") is MbtiType.ESTJ
    with pytest.raises(ValueError):
        MbtiType.parse("ABCD")
    assert MbtiType.INTP.letter(Dimension.EI) == "I"
    assert MbtiType.INTP.letter(Dimension.SN) == "N"
    assert MbtiType.INTP.letter(Dimension.TF) == "T"
    assert MbtiType.INTP.letter(Dimension.JP) == "P"


def test_dimension_letters_and_position():
    assert Dimension.EI.letters == ("E", "I")
    assert Dimension.JP.letters == ("J", "P")
    assert [d.position for d in Dimension] == [0, 1, 2, 3]
