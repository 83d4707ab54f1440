"""Command-line harness: run scenarios, benchmark planners, render snapshots.

Subcommands: run (one scenario, one planner, reports + optional SVG
frames), bench (scenario x planner x repetition CSV), render (one SVG
snapshot), riskmap (PGM export of the static risk field). The baseline
planners run once, open loop; the risk-aware planner runs the full
path-sharing simulation.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import replace
from pathlib import Path

from .baselines import MAPFError, cbs_plan, ecbs_plan, prioritized_sipp
from .conflicts import validate
from .coordination import run_simulation
from .planner import NoPathError, TimedPath
from .render import render_scenario
from .report import AgentReport, SimReport
from .risk import build_static_field, field_to_pgm
from .scenario import Scenario, ScenarioError, bundled_scenario_names, load_bundled_scenario, load_scenario

FAIL_MARK = "failed"
PLANNERS = ("aspt", "cbs", "ecbs", "sipp")


def run_baseline(scenario: Scenario, planner: str, omega: float = 2.0) -> SimReport:
    """Plan all agents once with a baseline and audit the planned paths."""
    grid = scenario.grid
    agents = [(a.start, a.goal) for a in scenario.agents]
    connectivity = scenario.config.connectivity
    t0 = time.perf_counter()
    paths: list[TimedPath | None]
    try:
        if planner == "cbs":
            paths = list(cbs_plan(agents, grid, connectivity=connectivity))
        elif planner == "ecbs":
            paths = list(ecbs_plan(agents, grid, omega=omega, connectivity=connectivity))
        elif planner == "sipp":
            paths = prioritized_sipp(agents, grid, connectivity=connectivity)
        else:
            raise ValueError(f"unknown baseline {planner!r}")
    except (MAPFError, NoPathError):
        paths = [None] * len(agents)
    elapsed = time.perf_counter() - t0

    trajectories = {}
    reports = []
    for i, spec in enumerate(scenario.agents):
        path = paths[i]
        if path is None:
            trajectories[spec.id] = [spec.start]
            reports.append(
                AgentReport(id=spec.id, success=False, arrival_tick=None, path_length_m=0.0, status="failed")
            )
        else:
            trajectories[spec.id] = path.cells()
            reports.append(
                AgentReport(
                    id=spec.id,
                    success=True,
                    arrival_tick=path.end_time,
                    path_length_m=path.total_length,
                    status="arrived",
                )
            )
    if reports:
        reports[0].plan_times.append(elapsed)
    ticks = max((len(t) for t in trajectories.values()), default=1) - 1
    return SimReport(
        planner=planner,
        agents=reports,
        trajectories=trajectories,
        conflicts=validate(trajectories),
        ticks=ticks,
    )


def run_planner(
    scenario: Scenario,
    planner: str,
    omega: float = 2.0,
    ordering: str | None = None,
    replan_interval: int | None = None,
    horizon: int | None = None,
) -> SimReport:
    """Dispatch to the coordination loop or a baseline."""
    if planner == "aspt":
        return run_simulation(
            scenario,
            ordering=ordering or scenario.ordering,
            replan_interval=replan_interval,
            horizon=horizon,
        )
    return run_baseline(scenario, planner, omega=omega)


REPORT_COLUMNS = ("scenario", "planner", "agent", "success", "arrival_tick", "path_length_m", "plan_time_s", "conflicts")


def report_rows(scenario_name: str, report: SimReport) -> list[list]:
    rows = []
    for a in report.agents:
        involved = sum(1 for c in report.conflicts if a.id in c.agents)
        rows.append(
            [
                scenario_name,
                report.planner,
                a.id,
                int(a.success),
                a.arrival_tick if a.arrival_tick is not None else FAIL_MARK,
                f"{a.path_length_m:.6f}",
                f"{sum(a.plan_times):.6f}",
                involved,
            ]
        )
    rows.append(
        [
            scenario_name,
            report.planner,
            "TOTAL",
            report.success_count,
            report.ticks,
            f"{report.total_path_length:.6f}",
            f"{sum(report.all_plan_times):.6f}",
            len(report.conflicts),
        ]
    )
    return rows


def write_report_csv(path: Path, scenario_name: str, report: SimReport) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(report_rows(scenario_name, report))


def format_report_text(scenario_name: str, report: SimReport) -> str:
    lines = [
        f"scenario: {scenario_name}",
        f"planner: {report.planner}",
        f"agents: {len(report.agents)}",
        f"successes: {report.success_count}",
        f"ticks: {report.ticks}",
        f"total_path_length_m: {report.total_path_length:.3f}",
        f"max_plan_time_s: {report.max_plan_time:.4f}",
        f"mean_plan_time_s: {report.mean_plan_time:.4f}",
        f"conflicts: {len(report.conflicts)}",
    ]
    for a in report.agents:
        arrival = a.arrival_tick if a.arrival_tick is not None else FAIL_MARK
        lines.append(
            f"  agent {a.id}: status={a.status} arrival={arrival} length_m={a.path_length_m:.3f} "
            f"plan_time_s={sum(a.plan_times):.4f}"
        )
    for c in report.conflicts:
        lines.append(f"  conflict: {c.kind} agents={','.join(map(str, c.agents))} t={c.time} cells={c.cells}")
    return "\n".join(lines) + "\n"


BENCH_COLUMNS = ("scenario", "planner", "rep", "plan_time_s", "total_path_length_m", "success_count", "conflict_count")


def bench_rows(scenarios: list[tuple[str, Scenario]], planners: list[str], reps: int, omega: float) -> list[list]:
    rows = []
    for name, scenario in scenarios:
        for planner in planners:
            for rep in range(reps):
                try:
                    report = run_planner(scenario, planner, omega=omega)
                    rows.append(
                        [
                            name,
                            planner,
                            rep,
                            f"{sum(report.all_plan_times):.6f}",
                            f"{report.total_path_length:.6f}",
                            report.success_count,
                            len(report.conflicts),
                        ]
                    )
                except Exception:
                    rows.append([name, planner, rep, FAIL_MARK, FAIL_MARK, 0, FAIL_MARK])
    return rows


def _load_scenario_arg(arg: str) -> tuple[str, Scenario]:
    path = Path(arg)
    if path.exists():
        scenario = load_scenario(path)
        return scenario.name, scenario
    if arg in bundled_scenario_names():
        scenario = load_bundled_scenario(arg)
        return scenario.name, scenario
    raise ScenarioError(f"scenario not found (neither a file nor a bundled name): {arg}")


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    cfg = scenario.config
    updates = {}
    for attr, val in (
        ("connectivity", args.connectivity),
        ("roi", args.roi),
        ("roi_crit", args.roi_crit),
    ):
        if val is not None:
            updates[attr] = val
    if updates:
        cfg = replace(cfg, **updates)
        scenario = replace(scenario, config=cfg, agents=[replace(a, config=None) if a.config is None else a for a in scenario.agents])
    if getattr(args, "seed", None) is not None:
        scenario = replace(scenario, seed=args.seed)
    return scenario


def _cmd_run(args) -> int:
    name, scenario = _load_scenario_arg(args.scenario)
    scenario = _apply_overrides(scenario, args)
    report = run_planner(
        scenario,
        args.planner,
        omega=args.omega,
        ordering=args.ordering,
        replan_interval=args.replan_interval,
        horizon=args.horizon,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_report_csv(out_dir / "report.csv", name, report)
    text = format_report_text(name, report)
    (out_dir / "report.txt").write_text(text)
    sys.stdout.write(text)
    if args.frames:
        frames_dir = out_dir / "frames"
        frames_dir.mkdir(exist_ok=True)
        for t in range(report.ticks + 1):
            (frames_dir / f"tick_{t:04d}.svg").write_text(render_scenario(scenario, report, t))
    return 0


def _cmd_bench(args) -> int:
    scenarios = [_load_scenario_arg(s) for s in args.scenarios]
    planners = [p.strip() for p in args.planners.split(",") if p.strip()]
    for p in planners:
        if p not in PLANNERS:
            raise ScenarioError(f"unknown planner {p!r}; choose from {PLANNERS}")
    rows = bench_rows(scenarios, planners, args.reps, args.omega)
    out = Path(args.out)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS)
        writer.writerows(rows)
    sys.stdout.write(f"wrote {len(rows)} rows to {out}\n")
    return 0


def _cmd_render(args) -> int:
    name, scenario = _load_scenario_arg(args.scenario)
    report = run_planner(scenario, args.planner, omega=args.omega)
    svg = render_scenario(scenario, report, args.tick)
    Path(args.out).write_text(svg)
    sys.stdout.write(f"wrote {args.out}\n")
    return 0


def _cmd_riskmap(args) -> int:
    name, scenario = _load_scenario_arg(args.scenario)
    field = build_static_field(scenario.grid, scenario.config.risk_config())
    Path(args.out).write_bytes(field_to_pgm(field))
    sys.stdout.write(f"wrote {args.out}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riskmapf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--omega", type=float, default=2.0, help="ECBS suboptimality factor")
        p.add_argument("--connectivity", type=int, choices=(4, 8), default=None)
        p.add_argument("--roi", type=float, default=None)
        p.add_argument("--roi-crit", dest="roi_crit", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)

    p_run = sub.add_parser("run", help="run one scenario with one planner")
    p_run.add_argument("scenario")
    p_run.add_argument("--planner", choices=PLANNERS, default="aspt")
    p_run.add_argument("--ordering", choices=("sequential", "concurrent"), default=None)
    p_run.add_argument("--replan-interval", dest="replan_interval", type=int, default=None)
    p_run.add_argument("--horizon", type=int, default=None)
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--frames", action="store_true", help="write per-tick SVG frames")
    add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_bench = sub.add_parser("bench", help="benchmark planners over scenarios")
    p_bench.add_argument("scenarios", nargs="+")
    p_bench.add_argument("--planners", default="aspt,cbs,ecbs,sipp")
    p_bench.add_argument("--reps", type=int, default=1)
    p_bench.add_argument("--out", default="bench.csv")
    add_common(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    p_render = sub.add_parser("render", help="render one tick of a scenario to SVG")
    p_render.add_argument("scenario")
    p_render.add_argument("--planner", choices=PLANNERS, default="aspt")
    p_render.add_argument("--tick", type=int, default=0)
    p_render.add_argument("--out", default="snapshot.svg")
    add_common(p_render)
    p_render.set_defaults(func=_cmd_render)

    p_risk = sub.add_parser("riskmap", help="export the static risk field as PGM")
    p_risk.add_argument("scenario")
    p_risk.add_argument("--out", default="riskmap.pgm")
    add_common(p_risk)
    p_risk.set_defaults(func=_cmd_riskmap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
