"""Acceptance gate: the headline guarantees, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines.
Criterion 7's live half needs JUNGTYPE_SMOKE_ENDPOINT (and optionally
JUNGTYPE_SMOKE_MODEL) pointing at an OpenAI-compatible endpoint; it is
skipped otherwise.  Everything else runs offline.
"""

import os
import random
import time

import pytest

from jungtype.adaptation import ShiftKind, run_scenario_set
from jungtype.evaluation import (
    QUESTIONNAIRE_LAYOUTS,
    dag,
    dimension_accuracy,
    fixtures_dir,
    load_accuracy_fixture,
    run_questionnaire,
    scripted_shift_sweep,
    synthetic_questionnaire,
    synthetic_scenario_set,
)
from jungtype.oracle import (
    Directive,
    EndpointConfig,
    LlmOracle,
    OracleRequest,
    RequestKind,
    ScriptedOracle,
)
from jungtype.persistence import AgentSnapshot, TraceRecord, snapshot_bytes, trace_bytes
from jungtype.typology import CANONICAL_ORDER, Dimension, MbtiType, PsychFunction
from jungtype.weights import (
    DEFAULT_PARAMS,
    RangeParams,
    boost,
    check_range_params,
    decay,
    init_profile,
    renormalize,
)

F = PsychFunction


def verdict(n, text):
    print(f"\nPASS criterion {n}: {text}")


# --- 1. headline questionnaire gains reproduce from the bundled tables ----------

def test_criterion_1_headline_gains():
    started = time.perf_counter()
    expected = [
        ("gpt", Dimension.JP, 9.75),
        ("qwen", Dimension.JP, 13.38),
        ("gpt", Dimension.TF, -0.19),
        ("qwen", Dimension.TF, -0.44),
    ]
    seen = []
    for model, dim, expected_pp in expected:
        fixture = load_accuracy_fixture(fixtures_dir() / f"accuracy_{model}_mbti70.json")
        gain_pp = dag(fixture["weighted"], fixture["baseline"], dim) * 100
        assert abs(gain_pp - expected_pp) <= 0.01, (model, dim, gain_pp)
        seen.append(f"{model}/{dim.value} {gain_pp:+.2f}pp")
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    verdict(1, f"{', '.join(seen)} all within 0.01pp in {elapsed:.2f}s")


# --- 2. the parameter checker admits exactly the feasible region -----------------

def hierarchy_ok(profile, params):
    dom, aux = profile.dominant, profile.auxiliary
    others = [fn for fn in CANONICAL_ORDER if fn not in (dom, aux)]
    return (
        profile.base[dom] > params.high_cutoff
        and profile.base[dom] > profile.base[aux] > max(profile.base[o] for o in others)
        and all(profile.base[o] > 0 for o in others)
        and abs(sum(profile.base.values()) - 1.0) < 1e-9
    )


def test_criterion_2_parameter_feasibility():
    started = time.perf_counter()
    cases = [
        (RangeParams(low_cutoff=0.0), "0 < low_cutoff"),
        (RangeParams(low_cutoff=0.125), "low_cutoff < 1/8"),
        (RangeParams(high_cutoff=0.05), "low_cutoff < high_cutoff"),
        (RangeParams(high_cutoff=0.32), "high_cutoff < (1 - 6*low_cutoff)/2"),
        (RangeParams(boost_step=0.0), "boost_step > 0"),
        (RangeParams(decay_factor=1.0), "0 <= decay_factor < 1"),
        (RangeParams(dominance_cap=0.49), "0.5 <= dominance_cap < 1"),
    ]
    for params, expected in cases:
        assert expected in check_range_params(params), expected
    assert check_range_params(DEFAULT_PARAMS) == []

    # every accepted parameter set must admit a valid sampled hierarchy
    rng = random.Random(11)
    types = list(MbtiType)
    accepted = 0
    draws = 0
    while accepted < 300:
        draws += 1
        params = RangeParams(
            high_cutoff=rng.uniform(0.01, 0.6),
            low_cutoff=rng.uniform(0.0, 0.2),
            boost_step=rng.uniform(-0.05, 0.2),
            decay_factor=rng.uniform(-0.2, 1.2),
            dominance_cap=rng.uniform(0.3, 1.1),
        )
        if check_range_params(params):
            continue
        accepted += 1
        for seed in (0, 1, rng.randrange(10**6)):
            profile = init_profile(rng.choice(types), params, seed=seed)
            assert hierarchy_ok(profile, params), params
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    verdict(2, f"all 7 constraints named; 300 accepted parameter sets "
               f"(of {draws} draws) all yield valid hierarchies in {elapsed:.2f}s")


# --- 3. sustained reinforcement lands on the documented structures ---------------

INTP_ROW = {
    F.TI: (ShiftKind.NO_CHANGE, MbtiType.INTP),
    F.NE: (ShiftKind.ROLE_SWAP, MbtiType.ENTP),
    F.SI: (ShiftKind.STRUCTURAL_REORGANIZATION, MbtiType.ISFJ),
    F.FE: (ShiftKind.STRUCTURAL_REORGANIZATION, MbtiType.ESFJ),
    F.TE: (ShiftKind.STRUCTURAL_REORGANIZATION, MbtiType.ESTJ),
    F.NI: (ShiftKind.STRUCTURAL_REORGANIZATION, MbtiType.INFJ),
    F.SE: (ShiftKind.ROLE_SWAP, MbtiType.ESTP),
    F.FI: (ShiftKind.DOMINANT_REPLACEMENT, MbtiType.INFP),
}


def test_criterion_3_structural_shift_sweep():
    started = time.perf_counter()
    sweep = scripted_shift_sweep()
    for target, (kind, final_mbti) in INTP_ROW.items():
        cell = sweep["cells"][(MbtiType.INTP, target)]
        assert cell["outcome"].kind is kind, target
        assert cell["final_mbti"] is final_mbti, target
    assert sweep["psa"] == 1.0
    assert len(sweep["cells"]) == 128
    assert all(cell["activation"] == 1.0 for cell in sweep["cells"].values())
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"took {elapsed:.2f}s"
    verdict(3, f"INTP row matches all 8 documented outcomes; "
               f"shift accuracy 1.0 over 128 cells in {elapsed:.2f}s")


# --- 4. invariants hold under ten thousand random operation sequences ------------

def brute_force_renormalize(base, temp):
    merged = {fn: max(base[fn], temp[fn]) for fn in CANONICAL_ORDER}
    total = sum(merged.values())
    return {fn: merged[fn] / total for fn in CANONICAL_ORDER}


def test_criterion_4_random_operation_sequences():
    started = time.perf_counter()
    rng = random.Random(20240814)
    types = list(MbtiType)
    sequences = 10_000
    renormalize_checks = 0
    for case in range(sequences):
        profile = init_profile(rng.choice(types), DEFAULT_PARAMS, seed=rng.randrange(2**31))
        for _ in range(rng.randint(3, 8)):
            op = rng.random()
            fn = rng.choice(CANONICAL_ORDER)
            if op < 0.55:
                profile = boost(profile, fn, DEFAULT_PARAMS)
            elif op < 0.8:
                active = [f for f in CANONICAL_ORDER if profile.temp[f] > 0]
                if active:
                    profile = decay(profile, rng.choice(active), DEFAULT_PARAMS)
            else:
                expected = brute_force_renormalize(profile.base, profile.temp)
                profile = renormalize(profile)
                renormalize_checks += 1
                for f in CANONICAL_ORDER:
                    assert abs(profile.base[f] - expected[f]) <= 1e-12
            assert abs(sum(profile.base.values()) - 1.0) <= 1e-9
            assert all(v >= 0 for v in profile.base.values())
            assert all(v >= 0 for v in profile.temp.values())
            profile.mbti  # raises InvalidPairing if the pair left the table
    elapsed = time.perf_counter() - started
    verdict(4, f"{sequences} random sequences kept all invariants; "
               f"{renormalize_checks} renormalizations matched brute force to 1e-12 "
               f"({elapsed:.1f}s)")


# --- 5. reruns are byte-identical -------------------------------------------------

def test_criterion_5_byte_identical_replay():
    def run_once():
        profile = init_profile(MbtiType.INTP, DEFAULT_PARAMS, seed=42)
        questions = synthetic_scenario_set(F.NE).questions()
        final, steps = run_scenario_set(profile, questions, ScriptedOracle(target=F.NE),
                                        DEFAULT_PARAMS)
        records = []
        current = init_profile(MbtiType.INTP, DEFAULT_PARAMS, seed=42)
        # rebuild per-question records exactly as the CLI writes them
        from jungtype.adaptation import MemoryLog, step

        log = MemoryLog()
        for question in questions:
            current, episode = step(current, question, ScriptedOracle(target=F.NE),
                                    DEFAULT_PARAMS, log)
            records.append(TraceRecord.from_step(episode, current, F.NE))
        snap = AgentSnapshot.from_profile(final, DEFAULT_PARAMS, seed=42,
                                          step_count=len(steps))
        return trace_bytes(records), snapshot_bytes(snap)

    first_trace, first_snap = run_once()
    second_trace, second_snap = run_once()
    assert first_trace == second_trace
    assert first_snap == second_snap
    assert b"role_swap->ENTP" in first_trace
    verdict(5, f"two independent runs produced identical {len(first_trace)}-byte traces "
               f"and identical final snapshots")


# --- 6. questionnaire scoring is exact --------------------------------------------

def test_criterion_6_questionnaire_scoring():
    checked = 0
    for layout, counts in QUESTIONNAIRE_LAYOUTS.items():
        items = synthetic_questionnaire(layout)
        for mbti in MbtiType:
            profile = init_profile(mbti, DEFAULT_PARAMS, seed=checked)
            oracle = ScriptedOracle(target=profile.dominant)
            answers = run_questionnaire(profile, items, oracle)
            accuracy = dimension_accuracy(answers, items, mbti)
            assert accuracy == {dim: 1.0 for dim in Dimension}, (layout, mbti)
            checked += 1

        for dim in Dimension:
            n = counts[dim]
            for k in (1, 2, n):
                flips = frozenset(it.id for it in items if it.dimension is dim)
                flips = frozenset(sorted(flips)[:k])
                profile = init_profile(MbtiType.ENFJ, DEFAULT_PARAMS, seed=3)
                oracle = ScriptedOracle(target=profile.dominant, flip_items=flips)
                accuracy = dimension_accuracy(
                    run_questionnaire(profile, items, oracle), items, MbtiType.ENFJ
                )
                assert accuracy[dim] == (n - k) / n, (layout, dim, k)
                others = [d for d in Dimension if d is not dim]
                assert all(accuracy[d] == 1.0 for d in others)
    verdict(6, f"perfect responder scores 1.0 for all 32 type/layout pairs; "
               f"k flipped items score exactly (n-k)/n on both layouts")


# --- 7. the LLM exchange format, offline and (optionally) live --------------------

class RecordingTransport:
    def __init__(self, *replies):
        self.replies = list(replies)
        self.payloads = []

    def __call__(self, payload):
        self.payloads.append(payload)
        return {"choices": [{"message": {"content": self.replies.pop(0)}}]}


def test_criterion_7_offline_exchange_format():
    profile = init_profile(MbtiType.INTP, DEFAULT_PARAMS, seed=42)
    transport = RecordingTransport("Ti", "Approve")
    oracle = LlmOracle(EndpointConfig(base_url="http://endpoint.invalid/v1",
                                      model="smoke-model"),
                       transport=transport)

    handled = oracle.respond(OracleRequest(kind=RequestKind.HANDLE, profile=profile,
                                           text="A puzzle needs dissecting.",
                                           directive=Directive.BOTH))
    assert handled.success and handled.handled_by is F.TI

    payload = transport.payloads[0]
    assert payload["temperature"] == 0.6
    assert payload["model"] == "smoke-model"
    assert [m["role"] for m in payload["messages"]] == ["system", "user"]
    system = payload["messages"][0]["content"]
    assert "Ti" in system and "Ne" in system
    assert "dominant Ti and auxiliary Ne" in system
    verdict(7, "offline: request carries temperature 0.6 and a persona prompt "
               "naming the dominant/auxiliary pair")


@pytest.mark.skipif(
    not os.environ.get("JUNGTYPE_SMOKE_ENDPOINT"),
    reason="set JUNGTYPE_SMOKE_ENDPOINT to run the live smoke test",
)
def test_criterion_7_live_endpoint_smoke():
    config = EndpointConfig(
        base_url=os.environ["JUNGTYPE_SMOKE_ENDPOINT"],
        model=os.environ.get("JUNGTYPE_SMOKE_MODEL", "gpt-4o-mini"),
    )
    profile = init_profile(MbtiType.INTP, DEFAULT_PARAMS, seed=42)
    oracle = LlmOracle(config)
    response = oracle.respond(
        OracleRequest(kind=RequestKind.HANDLE, profile=profile,
                      text="A dense logical puzzle with no social stakes.")
    )
    assert response.success in (True, False)
    if response.success:
        assert response.handled_by in (profile.dominant, profile.auxiliary)
    verdict(7, f"live: endpoint answered with "
               f"{response.handled_by.value if response.handled_by else 'None'}")
