"""Deterministic weighted-function personality engine for conversational agents.

An agent's type is a weighted differentiation over eight psychological
functions.  Scenario questions reinforce functions, sustained reinforcement
triggers structural reflection, and every run is replayable from a seed.
"""

from .adaptation import (
    EpisodeStep,
    MemoryLog,
    Outcome,
    ReflectionEvent,
    ScenarioQuestion,
    ShiftKind,
    StructureSnapshot,
    classify_trigger,
    post_rewrite_weights,
    reflect,
    run_scenario_set,
    step,
)
from .evaluation import (
    AccuracyTable,
    QuestionnaireItem,
    ScenarioSet,
    ShiftExpectation,
    ShiftOutcome,
    dag,
    dar,
    dimension_accuracy,
    expectation_matrix,
    expected_shift,
    psa,
    run_questionnaire,
    scripted_shift_sweep,
    summarize_shift,
    synthetic_questionnaire,
    synthetic_scenario_set,
    taa,
)
from .oracle import (
    EndpointConfig,
    LlmOracle,
    Oracle,
    OracleError,
    OracleRequest,
    OracleResponse,
    ParseFailure,
    ScriptedOracle,
    TransportError,
)
from .persistence import (
    AgentSnapshot,
    TraceRecord,
    load_snapshot,
    read_trace_rows,
    save_snapshot,
    trace_bytes,
    write_trace,
)
from .typology import (
    CANONICAL_ORDER,
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
from .weights import (
    DEFAULT_PARAMS,
    BadParams,
    CandidateTrigger,
    DominanceCapTrigger,
    RangeParams,
    WeightProfile,
    boost,
    check_range_params,
    decay,
    init_profile,
    renormalize,
    trigger_state,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyTable",
    "AgentSnapshot",
    "Attitude",
    "BadParams",
    "BaseFunction",
    "CANONICAL_ORDER",
    "CandidateTrigger",
    "DEFAULT_PARAMS",
    "Dimension",
    "DominanceCapTrigger",
    "EndpointConfig",
    "EpisodeStep",
    "FunctionKind",
    "InvalidPairing",
    "LlmOracle",
    "MbtiType",
    "MemoryLog",
    "Oracle",
    "OracleError",
    "OracleRequest",
    "OracleResponse",
    "Outcome",
    "ParseFailure",
    "PsychFunction",
    "QuestionnaireItem",
    "RangeParams",
    "ReflectionEvent",
    "ScenarioQuestion",
    "ScenarioSet",
    "ScriptedOracle",
    "ShiftExpectation",
    "ShiftKind",
    "ShiftOutcome",
    "StructureSnapshot",
    "TraceRecord",
    "TransportError",
    "WeightProfile",
    "boost",
    "check_range_params",
    "classify_trigger",
    "dag",
    "dar",
    "decay",
    "dimension_accuracy",
    "expectation_matrix",
    "expected_shift",
    "init_profile",
    "load_snapshot",
    "mbti_for",
    "pair_for",
    "post_rewrite_weights",
    "psa",
    "read_trace_rows",
    "reflect",
    "renormalize",
    "run_questionnaire",
    "run_scenario_set",
    "same_attitude_opposite_function",
    "save_snapshot",
    "scripted_shift_sweep",
    "step",
    "summarize_shift",
    "synthetic_questionnaire",
    "synthetic_scenario_set",
    "taa",
    "trace_bytes",
    "trigger_state",
    "valid_auxiliaries",
    "write_trace",
]
