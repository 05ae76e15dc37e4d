"""Snapshot serialization, locking, and trace files."""

import json

import pytest
from hypothesis import given, strategies as st

from jungtype.adaptation import (
    MemoryLog,
    Outcome,
    EpisodeStep,
    ReflectionEvent,
    ShiftKind,
    StructureSnapshot,
    run_scenario_set,
    step as engine_step,
)
from jungtype.evaluation import synthetic_scenario_set
from jungtype.oracle import ScriptedOracle
from jungtype.persistence import (
    ORACLE_ERROR_OUTCOME,
    SNAPSHOT_SCHEMA_VERSION,
    TRACE_COLUMNS,
    AgentSnapshot,
    PersistenceError,
    SchemaVersionError,
    TraceRecord,
    format_weight,
    load_snapshot,
    read_trace_rows,
    reflection_payload,
    round_weight,
    save_snapshot,
    snapshot_bytes,
    snapshot_from_payload,
    snapshot_payload,
    trace_bytes,
    write_trace,
)
from jungtype.typology import CANONICAL_ORDER, MbtiType, PsychFunction
from jungtype.weights import (
    DEFAULT_PARAMS,
    CandidateTrigger,
    DominanceCapTrigger,
    RangeParams,
    Role,
    init_profile,
)

F = PsychFunction


def fresh_snapshot(mbti=MbtiType.INTP, seed=42):
    profile = init_profile(mbti, DEFAULT_PARAMS, seed=seed)
    return AgentSnapshot.from_profile(profile, DEFAULT_PARAMS, seed=seed)


# --- snapshots -----------------------------------------------------------------

def test_snapshot_bytes_are_stable_through_a_round_trip():
    snap = fresh_snapshot()
    data = snapshot_bytes(snap)
    reloaded = snapshot_from_payload(json.loads(data.decode("utf-8")))
    assert snapshot_bytes(reloaded) == data


def test_snapshot_restores_the_profile():
    snap = fresh_snapshot(MbtiType.ESFP, seed=7)
    profile = snap.to_profile()
    assert profile.mbti is MbtiType.ESFP
    assert profile.dominant is F.SE and profile.auxiliary is F.FI
    assert profile.base == snap.base and profile.base is not snap.base


def test_snapshot_payload_shape():
    payload = snapshot_payload(fresh_snapshot())
    assert payload["schema_version"] == SNAPSHOT_SCHEMA_VERSION == "agent-snapshot/1"
    assert list(payload["base"]) == [fn.value for fn in CANONICAL_ORDER]
    assert payload["params"]["dominance_cap"] == 0.5
    assert payload["step_count"] == 0 and payload["reflections"] == []


def test_unknown_schema_version_is_rejected():
    payload = snapshot_payload(fresh_snapshot())
    payload["schema_version"] = "agent-snapshot/2"
    with pytest.raises(SchemaVersionError):
        snapshot_from_payload(payload)
    payload.pop("schema_version")
    with pytest.raises(SchemaVersionError):
        snapshot_from_payload(payload)


def test_save_and_load_files(tmp_path):
    path = tmp_path / "agent.json"
    snap = fresh_snapshot()
    save_snapshot(path, snap)
    assert load_snapshot(path).base == pytest.approx(snap.base)
    assert (tmp_path / "agent.json.lock").exists()
    assert not list(tmp_path.glob("*.tmp"))  # atomic write leaves no droppings


def test_load_snapshot_wraps_io_and_json_errors(tmp_path):
    with pytest.raises(PersistenceError):
        load_snapshot(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(PersistenceError):
        load_snapshot(bad)


def test_custom_params_survive_the_round_trip(tmp_path):
    params = RangeParams(high_cutoff=0.28, low_cutoff=0.05, boost_step=0.04,
                         decay_factor=0.5, dominance_cap=0.6)
    profile = init_profile(MbtiType.ENFJ, params, seed=11)
    path = tmp_path / "agent.json"
    save_snapshot(path, AgentSnapshot.from_profile(profile, params, seed=11))
    assert load_snapshot(path).params == params


def test_run_metadata_round_trips(tmp_path):
    profile = init_profile(MbtiType.INTP, DEFAULT_PARAMS, seed=42)
    questions = synthetic_scenario_set(F.NE).questions()
    final, steps = run_scenario_set(profile, questions, ScriptedOracle(target=F.NE),
                                    DEFAULT_PARAMS)
    events = [reflection_payload(s.reflection) for s in steps if s.reflection is not None]
    snap = AgentSnapshot.from_profile(final, DEFAULT_PARAMS, seed=42,
                                      step_count=len(steps), reflections=events)
    path = tmp_path / "agent.json"
    save_snapshot(path, snap)
    loaded = load_snapshot(path)
    assert loaded.step_count == 15
    assert loaded.reflections == events
    assert any(r["kind"] == "role_swap" and r["approved"] for r in loaded.reflections)
    assert loaded.mbti is MbtiType.ENTP


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_weight_formatting_is_idempotent(value):
    once = round_weight(value)
    assert round_weight(once) == once
    assert format_weight(float(format_weight(value))) == format_weight(value)


# --- trace records ---------------------------------------------------------------

def make_record(**overrides):
    profile = init_profile(MbtiType.INTP, DEFAULT_PARAMS, seed=42)
    step = EpisodeStep(
        question_index=overrides.pop("question_index", 1),
        handled_by=overrides.pop("handled_by", F.TI),
        outcome=overrides.pop("outcome", Outcome.SUCCESS),
        compensatory=overrides.pop("compensatory", None),
        trigger_fired=overrides.pop("trigger_fired", None),
        reflection=overrides.pop("reflection", None),
    )
    assert not overrides
    return TraceRecord.from_step(step, profile, F.TI)


def test_trace_record_from_a_success_step():
    record = make_record()
    assert record.outcome == "success"
    assert record.boosted == "Ti"
    assert record.trigger == "" and record.reflection == ""
    assert record.mbti_after == "INTP"
    row = record.row()
    assert len(row) == len(TRACE_COLUMNS) == 24
    assert row[0] == "1" and row[-1] == "INTP"


def test_trace_record_from_a_compensated_failure():
    record = make_record(outcome=Outcome.FAILURE, compensatory=F.FI)
    assert record.outcome == "failure"
    assert record.boosted == "Fi"


def test_trigger_text_forms():
    record = make_record(trigger_fired=CandidateTrigger(F.FI, Role.DOMINANT))
    assert record.trigger == "Fi>=dominant_base"
    record = make_record(trigger_fired=CandidateTrigger(F.SE, Role.AUXILIARY))
    assert record.trigger == "Se>=auxiliary_base"
    record = make_record(trigger_fired=DominanceCapTrigger(effective=0.52))
    assert record.trigger == "dominance_cap"


def test_reflection_text_forms():
    before = StructureSnapshot(F.TI, F.NE)
    after = StructureSnapshot(F.NE, F.TI)
    declined = ReflectionEvent(ShiftKind.ROLE_SWAP, before, before, False, 4)
    assert make_record(reflection=declined).reflection == "declined"
    settled = ReflectionEvent(ShiftKind.NO_CHANGE, before, before, True, 5)
    assert make_record(reflection=settled).reflection == "no_change"
    swapped = ReflectionEvent(ShiftKind.ROLE_SWAP, before, after, True, 6)
    assert make_record(reflection=swapped).reflection == "role_swap->ENTP"


def test_oracle_error_records_keep_the_profile_visible():
    profile = init_profile(MbtiType.INTP, DEFAULT_PARAMS, seed=42)
    record = TraceRecord.oracle_error(3, profile, F.NE, "endpoint returned HTTP 500")
    assert record.outcome == ORACLE_ERROR_OUTCOME == "oracle-error"
    assert record.handled_by == "" and record.boosted == ""
    assert record.reflection == "endpoint returned HTTP 500"
    assert record.row()[1] == "Ne"


def test_trace_bytes_round_trip(tmp_path):
    records = [make_record(question_index=i) for i in (1, 2, 3)]
    data = trace_bytes(records)
    assert data.decode("utf-8").splitlines()[0] == ",".join(TRACE_COLUMNS)
    path = tmp_path / "trace.csv"
    write_trace(path, records)
    assert path.read_bytes() == data
    rows = read_trace_rows(path)
    assert [r["question_index"] for r in rows] == ["1", "2", "3"]
    assert rows[0]["base_Ti"] == format_weight(records[0].base[F.TI])


def test_read_trace_rejects_foreign_headers(tmp_path):
    path = tmp_path / "foreign.csv"
    path.write_text("a,b,c\n1,2,3\n", encoding="utf-8")
    with pytest.raises(PersistenceError):
        read_trace_rows(path)


def test_trace_bytes_identical_across_runs():
    profile = init_profile(MbtiType.INTP, DEFAULT_PARAMS, seed=42)
    questions = synthetic_scenario_set(F.NE).questions()

    def run():
        records = []
        log = MemoryLog()
        current = profile.copy()
        for q in questions:
            current, episode = engine_step(current, q, ScriptedOracle(target=F.NE),
                                           DEFAULT_PARAMS, log)
            records.append(TraceRecord.from_step(episode, current, F.NE))
        return trace_bytes(records)

    assert run() == run()
