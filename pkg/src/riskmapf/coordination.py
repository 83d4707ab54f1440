"""Distributed path-sharing simulation.

Agents plan with the risk-weighted timed planner, publish their paths to a
shared blackboard, and treat everyone else's published path as a dynamic
obstacle. Planning happens at fixed replan intervals in one of two
orderings: sequential, where each agent sees the publications of agents
before it in the same round, and concurrent, where every agent snapshots
the blackboard before anyone publishes -- deliberately allowing the race
that periodic replanning then repairs. Execution is a deterministic
synchronous tick loop, one cell per tick, audited post hoc by the
five-kind conflict validator.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field, replace

from .conflicts import validate
from .dynamics import DynamicObstacle, ObstacleSet, predict_pose
from .grid import Cell, GridMap, grid_to_world
from .planner import (
    PlannerConfig,
    PlanningError,
    TimedPath,
    path_length_m,
    plan,
)
from .report import AgentReport, SimReport
from .risk import build_static_field


class SimulationSetupError(Exception):
    """Scenario inconsistency detected before the first tick."""


@dataclass(frozen=True)
class AgentSpec:
    """One simulated agent: endpoints, physical footprint, optional planner
    overrides. Speed is fixed at one cell per tick."""

    id: str
    start: Cell
    goal: Cell
    footprint: tuple[float, float] = (0.4, 0.4)
    config: PlannerConfig | None = None

    def __post_init__(self):
        if not (self.footprint[0] > 0 and self.footprint[1] > 0):
            raise ValueError("footprint axes must be > 0")


class PathBlackboard:
    """Shared store of published paths: atomic whole-path publication,
    snapshot isolation for readers, last writer wins per agent."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[str, tuple[TimedPath, int]] = {}

    def publish(self, agent_id: str, path: TimedPath, tick: int) -> None:
        with self._lock:
            self._entries[agent_id] = (path, tick)

    def snapshot(self) -> dict[str, tuple[TimedPath, int]]:
        with self._lock:
            return dict(self._entries)


@dataclass
class SimState:
    clock: int
    poses: dict[str, Cell]
    status: dict[str, str]
    executed: dict[str, list[Cell]]


def paths_to_obstacles(
    snapshot: dict,
    excluding_id: str | None,
    footprints: dict[str, tuple[float, float]],
    grid: GridMap,
    current_time: int,
    dt: float = 1.0,
) -> ObstacleSet:
    """Turn published paths into dynamic obstacles aligned to the present.

    The path element at current_time becomes prediction timestep 0; agents
    past their path end rest at the final cell.
    """
    obstacles = []
    for aid in sorted(snapshot):
        if aid == excluding_id:
            continue
        path, _pub = snapshot[aid]
        end = path.end_time
        poses = [grid_to_world(grid, path.cell_at(t)) for t in range(current_time, max(end, current_time) + 1)]
        major, minor = footprints.get(aid, (0.4, 0.4))
        if len(poses) >= 2:
            vx = (poses[1][0] - poses[0][0]) / dt
            vy = (poses[1][1] - poses[0][1]) / dt
        else:
            vx = vy = 0.0
        theta = math.atan2(vy, vx) if (vx, vy) != (0.0, 0.0) else 0.0
        obstacles.append(
            DynamicObstacle(
                id=aid,
                x=poses[0][0],
                y=poses[0][1],
                major=major,
                minor=minor,
                theta=theta,
                velocity=(vx, vy),
                shared_path=tuple(poses),
            )
        )
    return ObstacleSet(obstacles)


def obstacle_at_tick(ob: DynamicObstacle, tick: int, dt: float) -> DynamicObstacle:
    """Scenario obstacle re-anchored so prediction step 0 is absolute tick `tick`."""
    if tick <= 0:
        return ob
    if ob.shared_path is not None:
        idx = min(tick, len(ob.shared_path) - 1)
        rest = ob.shared_path[idx:]
        return replace(ob, x=rest[0][0], y=rest[0][1], shared_path=rest)
    pose = predict_pose(ob, tick, dt)
    return replace(ob, x=pose.x, y=pose.y)


def _validate_setup(scenario) -> None:
    grid = scenario.grid
    ids = [a.id for a in scenario.agents] + [o.id for o in scenario.obstacles]
    if len(set(ids)) != len(ids):
        raise SimulationSetupError("agent and obstacle ids must be unique")
    starts = [a.start for a in scenario.agents]
    if len(set(starts)) != len(starts):
        raise SimulationSetupError("duplicate agent starts")
    for a in scenario.agents:
        for label, cell in (("start", a.start), ("goal", a.goal)):
            if not grid.in_bounds(cell):
                raise SimulationSetupError(f"agent {a.id} {label} {cell} out of bounds")
            if grid.is_occupied(cell):
                raise SimulationSetupError(f"agent {a.id} {label} {cell} is occupied")


def run_simulation(
    scenario,
    ordering: str = "sequential",
    replan_interval: int | None = None,
    horizon: int | None = None,
) -> SimReport:
    """Run the shared-path protocol on a scenario and audit the outcome.

    Agents advance one path element per tick and replan every
    replan_interval ticks from their current pose. An agent whose planner
    fails publishes a rest-in-place path and retries at the next round.
    """
    if ordering not in ("sequential", "concurrent"):
        raise ValueError(f"ordering must be sequential or concurrent, got {ordering}")
    _validate_setup(scenario)
    replan_interval = replan_interval if replan_interval is not None else scenario.replan_interval
    horizon = horizon if horizon is not None else scenario.horizon
    if horizon <= 0:
        raise SimulationSetupError(f"horizon must be > 0, got {horizon}")
    if replan_interval < 1:
        raise SimulationSetupError(f"replan_interval must be >= 1, got {replan_interval}")

    grid = scenario.grid
    base_config: PlannerConfig = scenario.config
    configs = {a.id: (a.config or base_config) for a in scenario.agents}
    fields = {}

    def field_for(cfg: PlannerConfig):
        key = (cfg.roi, cfg.roi_crit, cfg.unknown_risk)
        if key not in fields:
            fields[key] = build_static_field(grid, cfg.risk_config())
        return fields[key]

    footprints = {a.id: a.footprint for a in scenario.agents}
    board = PathBlackboard()
    state = SimState(
        clock=0,
        poses={a.id: a.start for a in scenario.agents},
        status={a.id: "planning" for a in scenario.agents},
        executed={a.id: [a.start] for a in scenario.agents},
    )
    paths: dict[str, TimedPath] = {}
    plan_times: dict[str, list[float]] = {a.id: [] for a in scenario.agents}
    arrival: dict[str, int | None] = {a.id: None for a in scenario.agents}

    def scripted_obstacles(tick: int, dt: float):
        return [obstacle_at_tick(ob, tick, dt) for ob in scenario.obstacles]

    def plan_one(agent: AgentSpec, snapshot: dict, tick: int) -> None:
        cfg = configs[agent.id]
        obstacles = ObstacleSet(
            list(paths_to_obstacles(snapshot, agent.id, footprints, grid, tick, cfg.dt))
            + scripted_obstacles(tick, cfg.dt)
        )
        t0 = time.perf_counter()
        try:
            path = plan(
                state.poses[agent.id], agent.goal, grid, field_for(cfg), obstacles, cfg, start_time=tick
            )
            if state.poses[agent.id] == agent.goal:
                state.status[agent.id] = "arrived"
                arrival[agent.id] = tick
            else:
                state.status[agent.id] = "moving"
        except PlanningError:
            path = TimedPath(steps=((state.poses[agent.id], tick),), total_cost=0.0, total_length=0.0)
            state.status[agent.id] = "failed"
        plan_times[agent.id].append(time.perf_counter() - t0)
        paths[agent.id] = path
        board.publish(agent.id, path, tick)

    t = 0
    while t < horizon:
        active = [a for a in scenario.agents if state.status[a.id] != "arrived"]
        if not active:
            break
        if t % replan_interval == 0:
            replanners = [a for a in active]
            if ordering == "sequential":
                for agent in replanners:
                    plan_one(agent, board.snapshot(), t)
            else:
                snaps = {a.id: board.snapshot() for a in replanners}
                for agent in replanners:
                    plan_one(agent, snaps[agent.id], t)
        for agent in scenario.agents:
            aid = agent.id
            if state.status[aid] == "arrived":
                state.executed[aid].append(state.poses[aid])
                continue
            path = paths[aid]
            nxt = path.cell_at(t + 1)
            prev = state.poses[aid]
            state.poses[aid] = nxt
            state.executed[aid].append(nxt)
            if nxt == agent.goal and t + 1 >= path.end_time:
                state.status[aid] = "arrived"
                arrival[aid] = t + 1
            elif state.status[aid] != "failed":
                state.status[aid] = "moving" if nxt != prev else "waiting"
        t += 1
        state.clock = t

    agents_out = []
    for a in scenario.agents:
        traj = state.executed[a.id]
        agents_out.append(
            AgentReport(
                id=a.id,
                success=state.status[a.id] == "arrived",
                arrival_tick=arrival[a.id],
                path_length_m=path_length_m(traj, grid.resolution),
                plan_times=plan_times[a.id],
                status=state.status[a.id],
            )
        )
    return SimReport(
        planner="aspt",
        agents=agents_out,
        trajectories=dict(state.executed),
        conflicts=validate(state.executed),
        ticks=state.clock,
    )
