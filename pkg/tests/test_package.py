"""The package's public surface stays importable."""

import jungtype


def test_every_exported_name_resolves():
    assert jungtype.__version__ == "0.1.0"
    missing = [name for name in jungtype.__all__ if not hasattr(jungtype, name)]
    assert missing == []


def test_core_entry_points_are_reachable_from_the_top_level():
    profile = jungtype.init_profile(jungtype.MbtiType.INTP, jungtype.DEFAULT_PARAMS, seed=42)
    assert profile.dominant is jungtype.PsychFunction.TI
    oracle = jungtype.ScriptedOracle(target=jungtype.PsychFunction.NE)
    questions = jungtype.synthetic_scenario_set(jungtype.PsychFunction.NE).questions()
    final, steps = jungtype.run_scenario_set(profile, questions, oracle, jungtype.DEFAULT_PARAMS)
    assert final.mbti is jungtype.MbtiType.ENTP
    assert len(steps) == 15
