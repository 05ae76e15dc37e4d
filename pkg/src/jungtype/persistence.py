"""Snapshot and trace files.

Snapshots are JSON with a fixed field order and weights rounded to 12
significant digits, so deserializing and reserializing is byte-identical.
Writes go to a temp file in the target directory and land via rename, under
an advisory lock, so concurrent runs never interleave partial state.
Traces are CSV rows, one per question, with the same weight formatting.
"""

from __future__ import annotations

import csv
import fcntl
import io
import json
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .adaptation import EpisodeStep, ReflectionEvent, ShiftKind
from .typology import CANONICAL_ORDER, MbtiType, PsychFunction
from .weights import (
    CandidateTrigger,
    DominanceCapTrigger,
    RangeParams,
    Trigger,
    WeightProfile,
)

SNAPSHOT_SCHEMA_VERSION = "agent-snapshot/1"


class PersistenceError(Exception):
    pass


class SchemaVersionError(PersistenceError):
    """Snapshot carries an unknown schema version: rejected, never migrated."""


def format_weight(value: float) -> str:
    return f"{value:.12g}"


def round_weight(value: float) -> float:
    return float(format_weight(value))


@dataclass
class AgentSnapshot:
    mbti: MbtiType
    dominant: PsychFunction
    auxiliary: PsychFunction
    base: dict[PsychFunction, float]
    temp: dict[PsychFunction, float]
    params: RangeParams
    seed: int
    step_count: int = 0
    reflections: list[dict] = field(default_factory=list)

    @classmethod
    def from_profile(
        cls,
        profile: WeightProfile,
        params: RangeParams,
        seed: int,
        step_count: int = 0,
        reflections: list[dict] | None = None,
    ) -> "AgentSnapshot":
        return cls(
            mbti=profile.mbti,
            dominant=profile.dominant,
            auxiliary=profile.auxiliary,
            base=dict(profile.base),
            temp=dict(profile.temp),
            params=params,
            seed=seed,
            step_count=step_count,
            reflections=list(reflections or []),
        )

    def to_profile(self) -> WeightProfile:
        return WeightProfile(dict(self.base), dict(self.temp), self.dominant, self.auxiliary)


def reflection_payload(event: ReflectionEvent) -> dict:
    return {
        "question_index": event.question_index,
        "kind": event.kind.value,
        "before": event.before.mbti.value,
        "after": event.after.mbti.value,
        "approved": event.approved,
    }


def snapshot_payload(snap: AgentSnapshot) -> dict:
    return {
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "mbti": snap.mbti.value,
        "dominant": snap.dominant.value,
        "auxiliary": snap.auxiliary.value,
        "base": {fn.value: round_weight(snap.base[fn]) for fn in CANONICAL_ORDER},
        "temp": {fn.value: round_weight(snap.temp[fn]) for fn in CANONICAL_ORDER},
        "params": {
            "high_cutoff": snap.params.high_cutoff,
            "low_cutoff": snap.params.low_cutoff,
            "boost_step": snap.params.boost_step,
            "decay_factor": snap.params.decay_factor,
            "dominance_cap": snap.params.dominance_cap,
        },
        "seed": snap.seed,
        "step_count": snap.step_count,
        "reflections": snap.reflections,
    }


def snapshot_bytes(snap: AgentSnapshot) -> bytes:
    return (json.dumps(snapshot_payload(snap), indent=2) + "\n").encode("utf-8")


def snapshot_from_payload(payload: dict) -> AgentSnapshot:
    version = payload.get("schema_version")
    if version != SNAPSHOT_SCHEMA_VERSION:
        raise SchemaVersionError(
            f"snapshot schema {version!r} is not {SNAPSHOT_SCHEMA_VERSION!r}"
        )
    params = RangeParams(**payload["params"])
    return AgentSnapshot(
        mbti=MbtiType.parse(payload["mbti"]),
        dominant=PsychFunction.parse(payload["dominant"]),
        auxiliary=PsychFunction.parse(payload["auxiliary"]),
        base={fn: float(payload["base"][fn.value]) for fn in CANONICAL_ORDER},
        temp={fn: float(payload["temp"][fn.value]) for fn in CANONICAL_ORDER},
        params=params,
        seed=int(payload["seed"]),
        step_count=int(payload["step_count"]),
        reflections=list(payload.get("reflections", [])),
    )


@contextmanager
def snapshot_lock(path: str | Path):
    """Advisory lock guarding mutation of one snapshot path."""
    lock_path = Path(str(path) + ".lock")
    lock_path.parent.mkdir(parents=True, exist_ok=True)
    with open(lock_path, "w") as handle:
        fcntl.flock(handle, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(handle, fcntl.LOCK_UN)


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def save_snapshot(path: str | Path, snap: AgentSnapshot) -> None:
    path = Path(path)
    with snapshot_lock(path):
        _atomic_write(path, snapshot_bytes(snap))


def load_snapshot(path: str | Path) -> AgentSnapshot:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise PersistenceError(f"cannot read snapshot: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PersistenceError(f"snapshot is not valid JSON: {exc}") from exc
    return snapshot_from_payload(payload)


# --- trace files -------------------------------------------------------------

TRACE_COLUMNS = (
    ["question_index", "target", "handled_by", "outcome", "boosted"]
    + [f"base_{fn.value}" for fn in CANONICAL_ORDER]
    + [f"temp_{fn.value}" for fn in CANONICAL_ORDER]
    + ["trigger", "reflection", "mbti_after"]
)

ORACLE_ERROR_OUTCOME = "oracle-error"


def _trigger_text(trigger: Trigger | None) -> str:
    if trigger is None:
        return ""
    if isinstance(trigger, DominanceCapTrigger):
        return "dominance_cap"
    assert isinstance(trigger, CandidateTrigger)
    return f"{trigger.candidate.value}>={trigger.versus.value}_base"


def _reflection_text(event: ReflectionEvent | None) -> str:
    if event is None:
        return ""
    if not event.approved:
        return "declined"
    if event.kind is ShiftKind.NO_CHANGE:
        return "no_change"
    return f"{event.kind.value}->{event.after.mbti.value}"


@dataclass(frozen=True)
class TraceRecord:
    question_index: int
    target: str
    handled_by: str
    outcome: str
    boosted: str
    base: dict[PsychFunction, float]
    temp: dict[PsychFunction, float]
    trigger: str
    reflection: str
    mbti_after: str

    @classmethod
    def from_step(
        cls, step: EpisodeStep, profile_after: WeightProfile, target: PsychFunction
    ) -> "TraceRecord":
        return cls(
            question_index=step.question_index,
            target=target.value,
            handled_by=step.handled_by.value,
            outcome=step.outcome.value,
            boosted=step.boosted.value,
            base=dict(profile_after.base),
            temp=dict(profile_after.temp),
            trigger=_trigger_text(step.trigger_fired),
            reflection=_reflection_text(step.reflection),
            mbti_after=profile_after.mbti.value,
        )

    @classmethod
    def oracle_error(
        cls, question_index: int, profile: WeightProfile, target: PsychFunction, message: str
    ) -> "TraceRecord":
        return cls(
            question_index=question_index,
            target=target.value,
            handled_by="",
            outcome=ORACLE_ERROR_OUTCOME,
            boosted="",
            base=dict(profile.base),
            temp=dict(profile.temp),
            trigger="",
            reflection=message,
            mbti_after=profile.mbti.value,
        )

    def row(self) -> list[str]:
        return (
            [str(self.question_index), self.target, self.handled_by, self.outcome, self.boosted]
            + [format_weight(self.base[fn]) for fn in CANONICAL_ORDER]
            + [format_weight(self.temp[fn]) for fn in CANONICAL_ORDER]
            + [self.trigger, self.reflection, self.mbti_after]
        )


def trace_bytes(records: list[TraceRecord]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for record in records:
        writer.writerow(record.row())
    return buffer.getvalue().encode("utf-8")


def write_trace(path: str | Path, records: list[TraceRecord]) -> None:
    _atomic_write(Path(path), trace_bytes(records))


def read_trace_rows(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != list(TRACE_COLUMNS):
            raise PersistenceError(f"unexpected trace columns in {path}")
        return list(reader)
