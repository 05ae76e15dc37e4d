"""Command-line harness: init, run-scenario, questionnaire, report, replay.

Exit codes: 0 success, 1 usage or format errors, 2 oracle/transport
failures, 3 invariant violations.
"""

from __future__ import annotations

import functools
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from .adaptation import (
    InvalidAuxiliaryChoice,
    InvalidCompensation,
    InvalidHandling,
    MemoryLog,
    UnclassifiableTrigger,
    step as run_step,
)
from .evaluation import (
    DEFAULT_DAR_TOLERANCE,
    EmptyDimension,
    ItemFormatError,
    MissingEntry,
    MissingExpectation,
    UnknownItem,
    dag,
    dar,
    dimension_accuracy,
    load_accuracy_fixture,
    load_activation_fixture,
    load_items,
    load_scenario_set,
    run_questionnaire,
    scripted_shift_sweep,
)
from .oracle import (
    DEFAULT_TEMPERATURE,
    EndpointConfig,
    LlmOracle,
    OracleError,
    ScriptedOracle,
)
from .persistence import (
    ORACLE_ERROR_OUTCOME,
    AgentSnapshot,
    PersistenceError,
    TraceRecord,
    load_snapshot,
    read_trace_rows,
    reflection_payload,
    save_snapshot,
    trace_bytes,
    write_trace,
)
from .typology import Dimension, InvalidPairing, MbtiType, PsychFunction
from .weights import BadParams, RangeParams, check_range_params, init_profile


class UsageFailure(click.ClickException):
    exit_code = 1


class OracleFailure(click.ClickException):
    exit_code = 2


class InvariantFailure(click.ClickException):
    exit_code = 3


def _translate_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except OracleError as exc:
            raise OracleFailure(str(exc)) from exc
        except (
            InvalidCompensation,
            InvalidHandling,
            InvalidAuxiliaryChoice,
            UnclassifiableTrigger,
            InvalidPairing,
        ) as exc:
            raise InvariantFailure(str(exc)) from exc
        except (
            BadParams,
            ItemFormatError,
            PersistenceError,
            MissingEntry,
            MissingExpectation,
            EmptyDimension,
            UnknownItem,
            json.JSONDecodeError,
            OSError,
            ValueError,
        ) as exc:
            raise UsageFailure(str(exc)) from exc

    return wrapper


def _param_options(fn):
    fn = click.option("--high-cutoff", "-A", "--A", "high_cutoff", type=float, default=0.30, show_default=True)(fn)
    fn = click.option("--low-cutoff", "-B", "--B", "low_cutoff", type=float, default=0.06, show_default=True)(fn)
    fn = click.option("--boost-step", type=float, default=0.06, show_default=True)(fn)
    fn = click.option("--decay-factor", type=float, default=0.2, show_default=True)(fn)
    fn = click.option("--dominance-cap", type=float, default=0.5, show_default=True)(fn)
    return fn


def _params_from(high_cutoff, low_cutoff, boost_step, decay_factor, dominance_cap) -> RangeParams:
    params = RangeParams(high_cutoff, low_cutoff, boost_step, decay_factor, dominance_cap)
    violations = check_range_params(params)
    if violations:
        raise UsageFailure("range parameter constraints violated: " + "; ".join(violations))
    return params


def _oracle_options(fn):
    fn = click.option("--oracle", "oracle_spec", default="scripted", show_default=True,
                      help="scripted | scripted:<function> | llm")(fn)
    fn = click.option("--endpoint", default=None, help="OpenAI-compatible base URL")(fn)
    fn = click.option("--model", default=None)(fn)
    fn = click.option("--temperature", type=float, default=DEFAULT_TEMPERATURE, show_default=True)(fn)
    fn = click.option("--api-key-env", default="JUNGTYPE_API_KEY", show_default=True)(fn)
    fn = click.option("--template-dir", default=None, type=click.Path(exists=True, file_okay=False))(fn)
    fn = click.option("--retries", type=int, default=2, show_default=True)(fn)
    return fn


def _build_oracle(
    oracle_spec: str,
    default_target: PsychFunction | None,
    endpoint: str | None,
    model: str | None,
    temperature: float,
    api_key_env: str,
    template_dir: str | None,
    retries: int,
    approvals: str = "always",
    flip_items: frozenset = frozenset(),
):
    if oracle_spec == "llm":
        if not endpoint or not model:
            raise OracleFailure("llm oracle requires --endpoint and --model")
        config = EndpointConfig(
            base_url=endpoint,
            model=model,
            temperature=temperature,
            api_key_env=api_key_env,
            template_dir=template_dir,
            retries=retries,
        )
        return LlmOracle(config)
    if oracle_spec.startswith("scripted"):
        target = default_target
        if ":" in oracle_spec:
            target = PsychFunction.parse(oracle_spec.split(":", 1)[1])
        if target is None:
            raise UsageFailure("scripted oracle needs a target function")
        return ScriptedOracle(target=target, approvals=approvals, flip_items=flip_items)
    raise UsageFailure(
        f"unknown oracle {oracle_spec!r}; options: scripted, scripted:<function>, llm"
    )


@dataclass
class MetricsReport:
    sections: list[str] = field(default_factory=list)
    payload: dict = field(default_factory=dict)

    def add(self, title: str, lines: list[str]) -> None:
        self.sections.append("\n".join([f"== {title} =="] + lines))

    def render(self) -> str:
        return "\n\n".join(self.sections)


@click.group()
def main():
    """Deterministic weighted-function personality engine."""


@main.command("init")
@click.option("--mbti", required=True, help="four-letter type label")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@_param_options
@_translate_errors
def cmd_init(mbti, seed, out, high_cutoff, low_cutoff, boost_step, decay_factor, dominance_cap):
    """Create a seeded agent snapshot."""
    params = _params_from(high_cutoff, low_cutoff, boost_step, decay_factor, dominance_cap)
    mbti_type = MbtiType.parse(mbti)
    profile = init_profile(mbti_type, params, seed=seed)
    snap = AgentSnapshot.from_profile(profile, params, seed=seed)
    save_snapshot(out, snap)
    click.echo(f"{mbti_type.value}: dominant {profile.dominant.value} "
               f"{profile.base[profile.dominant]:.4f}, auxiliary {profile.auxiliary.value} "
               f"{profile.base[profile.auxiliary]:.4f} -> {out}")


def _run_questions(snap: AgentSnapshot, scenario_set, oracle, params) -> tuple:
    """Drive the engine over a scenario set, tolerating per-question oracle errors."""
    profile = snap.to_profile()
    target = scenario_set.target
    questions = scenario_set.questions(start_index=snap.step_count + 1)
    log = MemoryLog()
    records: list[TraceRecord] = []
    events: list = []
    for question in questions:
        try:
            profile, episode = run_step(profile, question, oracle, params, log)
        except OracleError as exc:
            records.append(TraceRecord.oracle_error(question.index, profile, target, str(exc)))
            continue
        records.append(TraceRecord.from_step(episode, profile, target))
        if episode.reflection is not None:
            events.append(episode.reflection)
    final = AgentSnapshot.from_profile(
        profile,
        params,
        seed=snap.seed,
        step_count=snap.step_count + len(questions),
        reflections=snap.reflections + [reflection_payload(e) for e in events],
    )
    return final, records, events


@main.command("run-scenario")
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--trace-out", required=True, type=click.Path(dir_okay=False))
@click.option("--snapshot-out", default=None, type=click.Path(dir_okay=False),
              help="defaults to updating --snapshot in place")
@click.option("--approvals", type=click.Choice(["always", "never"]), default="always", show_default=True)
@_oracle_options
@_translate_errors
def cmd_run_scenario(snapshot_path, scenario_path, trace_out, snapshot_out, approvals,
                     oracle_spec, endpoint, model, temperature, api_key_env, template_dir, retries):
    """Run one 3x5 scenario set against a snapshot."""
    snap = load_snapshot(snapshot_path)
    scenario_set = load_scenario_set(scenario_path)
    oracle = _build_oracle(oracle_spec, scenario_set.target, endpoint, model, temperature,
                           api_key_env, template_dir, retries, approvals=approvals)
    final, records, events = _run_questions(snap, scenario_set, oracle, snap.params)
    write_trace(trace_out, records)
    save_snapshot(snapshot_out or snapshot_path, final)
    click.echo(f"{snap.mbti.value} -> {final.mbti.value} over {len(records)} questions")
    for event in events:
        click.echo(f"  Q{event.question_index}: {event.kind.value} "
                   f"{event.before.mbti.value}->{event.after.mbti.value} "
                   f"({'approved' if event.approved else 'declined'})")
    errors = sum(1 for r in records if r.outcome == ORACLE_ERROR_OUTCOME)
    if errors:
        click.echo(f"  {errors} question(s) marked {ORACLE_ERROR_OUTCOME}")


@main.command("questionnaire")
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--items", "items_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--runs", type=int, default=1, show_default=True)
@click.option("--flip", "flips", multiple=True, help="item id answered against type (repeatable)")
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@_oracle_options
@_translate_errors
def cmd_questionnaire(snapshot_path, items_path, runs, flips, out,
                      oracle_spec, endpoint, model, temperature, api_key_env, template_dir, retries):
    """Score a questionnaire against the snapshot's type. Never mutates the snapshot."""
    snap = load_snapshot(snapshot_path)
    items = load_items(items_path)
    oracle = _build_oracle(oracle_spec, snap.dominant, endpoint, model, temperature,
                           api_key_env, template_dir, retries, flip_items=frozenset(flips))
    profile = snap.to_profile()
    per_run = []
    for _ in range(runs):
        answers = run_questionnaire(profile, items, oracle)
        per_run.append(dimension_accuracy(answers, items, snap.mbti))
    mean = {dim: sum(r[dim] for r in per_run) / runs for dim in Dimension}
    for run_index, acc in enumerate(per_run, start=1):
        row = "  ".join(f"{dim.value} {acc[dim]:.4f}" for dim in Dimension)
        click.echo(f"run {run_index}: {row}")
    click.echo("mean:  " + "  ".join(f"{dim.value} {mean[dim]:.4f}" for dim in Dimension))
    if out:
        payload = {
            "mbti": snap.mbti.value,
            "runs": [{d.value: acc[d] for d in Dimension} for acc in per_run],
            "mean": {d.value: mean[d] for d in Dimension},
        }
        Path(out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


@main.command("report")
@click.option("--accuracy", "accuracy_paths", multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--activation", "activation_paths", multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--trace", "trace_paths", multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--exclude-failed-oracle", is_flag=True, default=False,
              help="drop oracle-error rows from activation denominators")
@click.option("--shift-sweep-seed", type=int, default=None,
              help="run the deterministic 16x8 scripted sweep and report shift accuracy")
@click.option("--dar-tolerance", type=float, default=DEFAULT_DAR_TOLERANCE, show_default=True)
@click.option("--plot-out", default=None, type=click.Path(file_okay=False))
@click.option("--json-out", default=None, type=click.Path(dir_okay=False))
@_translate_errors
def cmd_report(accuracy_paths, activation_paths, trace_paths, exclude_failed_oracle,
               shift_sweep_seed, dar_tolerance, plot_out, json_out):
    """Render gain/agreement/activation/shift metrics from fixtures and runs."""
    report = MetricsReport()
    plot_dir = Path(plot_out) if plot_out else None
    if plot_dir:
        plot_dir.mkdir(parents=True, exist_ok=True)

    for path in accuracy_paths:
        fixture = load_accuracy_fixture(path)
        title = f"dimension accuracy: {fixture['model']} / {fixture['questionnaire']}"
        lines = []
        section = {}
        for dim in Dimension:
            gain = dag(fixture["weighted"], fixture["baseline"], dim)
            agreement = dar(fixture["weighted"], fixture["baseline"], dim, dar_tolerance)
            lines.append(f"{dim.value}: gain {gain * 100:+.2f}pp, agreement {agreement:.4f}")
            section[dim.value] = {"dag": gain, "dar": agreement}
        report.add(title, lines)
        report.payload[f"accuracy/{fixture['model']}/{fixture['questionnaire']}"] = section
        if plot_dir:
            rows = ["dimension,dag,dar"] + [
                f"{d},{section[d]['dag']:.6f},{section[d]['dar']:.6f}" for d in section
            ]
            name = f"dag_dar_{fixture['model']}_{fixture['questionnaire']}.csv"
            (plot_dir / name).write_text("\n".join(rows) + "\n", encoding="utf-8")

    for path in activation_paths:
        fixture = load_activation_fixture(path)
        title = f"target activation: {fixture['model']}"
        means = fixture["scenario_mean"]
        lines = [f"{fn.value}: {means[fn]:.4f}" for fn in means]
        report.add(title, lines)
        report.payload[f"activation/{fixture['model']}"] = {fn.value: v for fn, v in means.items()}
        if plot_dir:
            rows = ["scenario,taa"] + [f"{fn.value},{v:.6f}" for fn, v in means.items()]
            (plot_dir / f"activation_{fixture['model']}.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    for path in trace_paths:
        rows = read_trace_rows(path)
        if not rows:
            raise UsageFailure(f"trace {path} has no rows")
        target = rows[0]["target"]
        scored = [r for r in rows if not (exclude_failed_oracle and r["outcome"] == ORACLE_ERROR_OUTCOME)]
        if not scored:
            raise UsageFailure(f"trace {path} has no scorable rows")
        hits = sum(1 for r in scored if r["boosted"] == target)
        value = hits / len(scored)
        report.add(f"trace activation: {path}", [f"{target}: {value:.4f} over {len(scored)} steps"])
        report.payload[f"trace/{path}"] = {"target": target, "taa": value}

    if shift_sweep_seed is not None:
        sweep = scripted_shift_sweep(base_seed=shift_sweep_seed)
        lines = [f"shift accuracy: {sweep['psa']:.4f} over {len(sweep['cells'])} cells"]
        mismatches = [
            (mbti, target, cell)
            for (mbti, target), cell in sweep["cells"].items()
            if not sweep["expectations"][(mbti, target)].matches(cell["outcome"])
        ]
        for mbti, target, cell in mismatches:
            lines.append(f"  mismatch {mbti.value} x {target.value}: got {cell['outcome']}")
        report.add(f"scripted shift sweep (seed {shift_sweep_seed})", lines)
        report.payload["shift_sweep"] = {"seed": shift_sweep_seed, "psa": sweep["psa"]}
        if plot_dir:
            rows = ["mbti,target,kind,final_dominant,final_auxiliary,match"]
            for (mbti, target), cell in sweep["cells"].items():
                outcome = cell["outcome"]
                ok = sweep["expectations"][(mbti, target)].matches(outcome)
                rows.append(
                    f"{mbti.value},{target.value},{outcome.kind.value},"
                    f"{outcome.dominant.value},{outcome.auxiliary.value},{int(ok)}"
                )
            (plot_dir / f"shift_sweep_{shift_sweep_seed}.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    if not report.sections:
        raise UsageFailure("nothing to report: pass --accuracy, --activation, --trace, or --shift-sweep-seed")
    click.echo(report.render())
    if json_out:
        Path(json_out).write_text(json.dumps(report.payload, indent=2) + "\n", encoding="utf-8")


@main.command("replay")
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="the snapshot the original run started from")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--final-snapshot", default=None, type=click.Path(exists=True, dir_okay=False),
              help="optionally also compare the resulting snapshot bytes")
@click.option("--approvals", type=click.Choice(["always", "never"]), default="always", show_default=True)
@_oracle_options
@_translate_errors
def cmd_replay(snapshot_path, scenario_path, trace_path, final_snapshot, approvals,
               oracle_spec, endpoint, model, temperature, api_key_env, template_dir, retries):
    """Re-derive a trace from its inputs and assert byte equality."""
    snap = load_snapshot(snapshot_path)
    scenario_set = load_scenario_set(scenario_path)
    oracle = _build_oracle(oracle_spec, scenario_set.target, endpoint, model, temperature,
                           api_key_env, template_dir, retries, approvals=approvals)
    final, records, _ = _run_questions(snap, scenario_set, oracle, snap.params)
    recomputed = trace_bytes(records)
    stored = Path(trace_path).read_bytes()
    if recomputed != stored:
        raise InvariantFailure(f"replay diverged from {trace_path}")
    if final_snapshot is not None:
        from .persistence import snapshot_bytes

        if snapshot_bytes(final) != Path(final_snapshot).read_bytes():
            raise InvariantFailure(f"replayed snapshot diverged from {final_snapshot}")
    click.echo(f"replay matches {trace_path}" + (" and final snapshot" if final_snapshot else ""))


def run_cli() -> None:
    try:
        main(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(130)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    sys.exit(0)


if __name__ == "__main__":
    run_cli()
