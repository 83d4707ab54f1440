"""Time-expanded, risk-weighted A* over a grid with explicit wait actions.

The search minimizes step length plus the static risk layers, the
time-indexed dynamic obstacle risk, and a per-step time penalty that grows
with the timestep. When dynamic obstacles are present the state space is
(cell, timestep) and a wait successor is generated at every expansion, so
pausing to let an obstacle pass competes directly with detours. A watchdog
bounds expansions and wall time, since waiting searches are unbounded.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

from .dynamics import dynamic_risk, predict_pose, risk_evaluator
from .grid import CellState, Cell, GridMap, grid_to_world
from .risk import RiskConfig, StaticRiskField


class PlanningError(Exception):
    """Base class for planner failures."""


class NoPathError(PlanningError):
    """No feasible route exists."""


class WatchdogTimeoutError(PlanningError):
    """Search exceeded its expansion or wall-clock budget."""


class InvalidEndpointError(PlanningError):
    """Start or goal is out of bounds or occupied."""


@dataclass(frozen=True)
class PlannerConfig:
    """Knobs for the risk-weighted search.

    time_cost_weight scales the per-step timestep penalty; wait_cost is the
    price of staying in place for one step. Watchdog bounds apply jointly:
    whichever budget is exhausted first aborts the search.
    """

    connectivity: int = 8
    roi: float = 10.0
    roi_crit: float = 1.0
    unknown_risk: float = 50.0
    time_cost_weight: float = 1.0
    wait_cost: float = 1.0
    watchdog_max_expansions: int = 200_000
    watchdog_max_seconds: float = 5.0
    dt: float = 1.0
    unknown_heuristic_factor: float = 50.0
    cone_angle: float = 0.44
    lambda_step: float = 0.1

    def __post_init__(self):
        if self.connectivity not in (4, 8):
            raise ValueError(f"connectivity must be 4 or 8, got {self.connectivity}")
        for name in ("time_cost_weight", "wait_cost", "unknown_heuristic_factor"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.watchdog_max_expansions < 0 or self.watchdog_max_seconds < 0:
            raise ValueError("watchdog budgets must be >= 0")
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")

    def risk_config(self) -> RiskConfig:
        return RiskConfig(
            roi=self.roi,
            roi_crit=self.roi_crit,
            unknown_risk=self.unknown_risk,
            cone_angle=self.cone_angle,
            lambda_step=self.lambda_step,
        )


@dataclass
class SearchNode:
    """One expanded search state; f is kept as g + h by construction."""

    v: Cell
    g: float
    h: float
    n: int
    w: int = 0
    predecessor: tuple | None = None

    @property
    def f(self) -> float:
        return self.g + self.h


@dataclass(frozen=True)
class TimedPath:
    """A planned trajectory: one (cell, timestep) per step, waits included.

    Timesteps increase by exactly one per element; consecutive cells are
    identical (a wait) or grid-adjacent.
    """

    steps: tuple[tuple[Cell, int], ...]
    total_cost: float
    total_length: float

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def cells(self) -> list[Cell]:
        return [c for c, _ in self.steps]

    @property
    def start_time(self) -> int:
        return self.steps[0][1]

    @property
    def end_time(self) -> int:
        return self.steps[-1][1]

    def cell_at(self, t: int) -> Cell:
        """Cell occupied at absolute tick t, clamped to the path's ends."""
        idx = min(max(t - self.start_time, 0), len(self.steps) - 1)
        return self.steps[idx][0]

    def wait_count(self) -> int:
        return sum(1 for i in range(1, len(self.steps)) if self.steps[i][0] == self.steps[i - 1][0])


def path_length_m(cells, resolution: float) -> float:
    """Geometric length in meters of a cell sequence (waits contribute zero)."""
    total = 0.0
    for a, b in zip(cells, cells[1:]):
        total += math.hypot(b[0] - a[0], b[1] - a[1])
    return total * resolution


def heuristic(v: Cell, goal: Cell, cell_state_at_v: CellState, config: PlannerConfig) -> float:
    """Euclidean cell distance to goal, inflated on unknown cells to keep the
    search out of uncharted space."""
    d = math.hypot(v[0] - goal[0], v[1] - goal[1])
    if cell_state_at_v == CellState.UNKNOWN:
        d *= config.unknown_heuristic_factor
    return d


def edge_cost(
    from_node: SearchNode,
    to_cell: Cell,
    step_length: float,
    static_field: StaticRiskField,
    obstacles,
    config: PlannerConfig,
) -> float:
    """Cost of one step: distance + static risks + dynamic risk at arrival
    time + the time penalty. Infinite if any component is infinite."""
    n1 = from_node.n + 1
    static = static_field.combined_at(to_cell)
    if not math.isfinite(static):
        return math.inf
    p = grid_to_world(static_field.grid, to_cell)
    dyn = dynamic_risk(obstacles, p, n1, config.dt, config.risk_config())
    if not math.isfinite(dyn):
        return math.inf
    return step_length + static + dyn + config.time_cost_weight * n1


def _check_endpoint(grid: GridMap, v: Cell, label: str) -> None:
    if not grid.in_bounds(v):
        raise InvalidEndpointError(f"{label} {v} out of bounds")
    if grid.is_occupied(v):
        raise InvalidEndpointError(f"{label} {v} is occupied")


def _static_reachable(grid: GridMap, combined, start: Cell, goal: Cell, connectivity: int) -> bool:
    """Breadth-first reachability over finite-static-risk cells; a goal that
    fails this can never be reached at any timestep."""
    adj = grid.adjacency(connectivity)
    w = grid.width
    seen = bytearray(grid.width * grid.height)
    seen[start[1] * w + start[0]] = 1
    frontier = [start]
    while frontier:
        nxt = []
        for x, y in frontier:
            if (x, y) == goal:
                return True
            for nx, ny, _ in adj[y * w + x]:
                idx = ny * w + nx
                if not seen[idx] and combined[idx] != math.inf:
                    seen[idx] = 1
                    nxt.append((nx, ny))
        frontier = nxt
    return False


def _goal_block_horizon(obstacles, goal_p, config: RiskConfig, dt: float) -> tuple[int, bool]:
    """Last timestep at which any obstacle could still make the goal
    infeasible, and whether the goal stays blocked forever."""
    horizon = 0
    for ob in obstacles:
        if ob.shared_path is not None:
            n_end = len(ob.shared_path) - 1
            rest = predict_pose(ob, n_end, dt)
            if _clearance_at(ob, goal_p, rest, config) < config.roi_crit:
                return 0, True
            horizon = max(horizon, n_end)
        elif ob.speed == 0.0:
            pose = predict_pose(ob, 0, dt)
            if _clearance_at(ob, goal_p, pose, config) < config.roi_crit:
                return 0, True
        else:
            d0 = math.hypot(ob.x - goal_p[0], ob.y - goal_p[1])
            n_clear = (d0 + ob.major + config.roi_crit) / (ob.speed * dt)
            horizon = max(horizon, int(math.ceil(n_clear)) + 1)
    return horizon, False


def _clearance_at(ob, p, pose, config: RiskConfig) -> float:
    from .dynamics import circle_clearance, ellipse_clearance

    if ob.is_circle:
        return circle_clearance(ob, p, pose=pose)
    return ellipse_clearance(ob, p, config.roi, config.lambda_step, pose=pose)


def plan(
    start: Cell,
    goal: Cell,
    grid: GridMap,
    static_field: StaticRiskField,
    obstacles,
    config: PlannerConfig,
    start_time: int = 0,
) -> TimedPath:
    """Plan a timed path from start to goal under the composite risk cost.

    Raises InvalidEndpointError for bad endpoints, NoPathError when the goal
    is statically unreachable, and WatchdogTimeoutError when the search
    budget runs out (e.g. the goal is only dynamically blocked).
    """
    _check_endpoint(grid, start, "start")
    _check_endpoint(grid, goal, "goal")
    obstacles = tuple(obstacles)
    if start == goal:
        return TimedPath(steps=((start, start_time),), total_cost=0.0, total_length=0.0)

    combined = static_field.combined.ravel()
    w = grid.width
    res = grid.resolution
    ox, oy = grid.origin
    if combined[goal[1] * w + goal[0]] == math.inf:
        raise NoPathError(f"goal {goal} lies in an infinite static-risk region")
    if not _static_reachable(grid, combined, start, goal, config.connectivity):
        raise NoPathError(f"no route from {start} to {goal}")

    timed = bool(obstacles) or config.time_cost_weight > 0
    allow_wait = bool(obstacles)
    rc = config.risk_config()
    dt = config.dt
    tw = config.time_cost_weight
    uh = config.unknown_heuristic_factor
    adj = grid.adjacency(config.connectivity)
    cells_flat = grid.cells.ravel()
    unknown = int(CellState.UNKNOWN)
    gx, gy = goal
    inf = math.inf

    if allow_wait:
        rest_horizon, goal_blocked_forever = _goal_block_horizon(obstacles, grid_to_world(grid, goal), rc, dt)
    else:
        rest_horizon, goal_blocked_forever = 0, False

    h_cache: dict[int, float] = {}

    def h_at(x: int, y: int) -> float:
        idx = y * w + x
        val = h_cache.get(idx)
        if val is None:
            val = math.hypot(x - gx, y - gy)
            if cells_flat[idx] == unknown:
                val *= uh
            h_cache[idx] = val
        return val

    dyn_cache: dict[tuple[int, int, int], float] = {}
    dyn_eval = risk_evaluator(obstacles, dt, rc)

    def dyn_at(x: int, y: int, n: int) -> float:
        key = (x, y, n)
        val = dyn_cache.get(key)
        if val is None:
            val = dyn_eval(ox + (x + 0.5) * res, oy + (y + 0.5) * res, n)
            dyn_cache[key] = val
        return val

    def goal_rest_safe(n: int) -> bool:
        for m in range(n + 1, rest_horizon + 1):
            if dyn_at(gx, gy, m) == inf:
                return False
        return True

    # Heap entries: (f, -g, n, y, x, seq); ties resolve to highest g then
    # lexicographic (n, y, x), then insertion order, for determinism.
    start_state = (start[0], start[1], 0) if timed else (start[0], start[1])
    g_best = {start_state: 0.0}
    parent: dict = {start_state: None}
    seq = 0
    open_heap = [(h_at(start[0], start[1]), 0.0, 0, start[1], start[0], seq)]
    expansions = 0
    max_exp = config.watchdog_max_expansions
    max_sec = config.watchdog_max_seconds
    t0 = time.monotonic()

    while open_heap:
        if expansions >= max_exp:
            raise WatchdogTimeoutError(f"expansion budget {max_exp} exhausted")
        if expansions % 64 == 0 and time.monotonic() - t0 > max_sec:
            raise WatchdogTimeoutError(f"wall-clock budget {max_sec}s exhausted")
        f, neg_g, n, y, x, _ = heapq.heappop(open_heap)
        g = -neg_g
        state = (x, y, n) if timed else (x, y)
        if g > g_best.get(state, inf):
            continue
        expansions += 1
        if x == gx and y == gy:
            if not allow_wait or (not goal_blocked_forever and goal_rest_safe(n)):
                return _reconstruct(parent, state, timed, g, start_time, res)
        n1 = n + 1
        time_term = tw * n1
        for nx, ny, step in adj[y * w + x]:
            sc = combined[ny * w + nx]
            if sc == inf:
                continue
            if obstacles:
                dyn = dyn_at(nx, ny, n1)
                if dyn == inf:
                    continue
            else:
                dyn = 0.0
            ng = g + step + sc + dyn + time_term
            key = (nx, ny, n1) if timed else (nx, ny)
            if ng < g_best.get(key, inf):
                g_best[key] = ng
                parent[key] = state
                seq += 1
                heapq.heappush(open_heap, (ng + h_at(nx, ny), -ng, n1, ny, nx, seq))
        if allow_wait:
            sc = combined[y * w + x]
            if sc != inf:
                dyn = dyn_at(x, y, n1)
                if dyn != inf:
                    ng = g + config.wait_cost + sc + dyn + time_term
                    key = (x, y, n1)
                    if ng < g_best.get(key, inf):
                        g_best[key] = ng
                        parent[key] = state
                        seq += 1
                        heapq.heappush(open_heap, (ng + h_at(x, y), -ng, n1, y, x, seq))
    raise NoPathError(f"search space exhausted between {start} and {goal}")


def _reconstruct(parent, goal_state, timed: bool, total_cost: float, start_time: int, resolution: float) -> TimedPath:
    chain = []
    st = goal_state
    while st is not None:
        chain.append(st)
        st = parent[st]
    chain.reverse()
    if timed:
        steps = tuple(((x, y), start_time + n) for x, y, n in chain)
    else:
        steps = tuple(((x, y), start_time + i) for i, (x, y) in enumerate(chain))
    length = path_length_m([c for c, _ in steps], resolution)
    return TimedPath(steps=steps, total_cost=total_cost, total_length=length)


def replan_from(
    current: Cell,
    current_time: int,
    previous: TimedPath | None,
    goal: Cell,
    grid: GridMap,
    static_field: StaticRiskField,
    obstacles,
    config: PlannerConfig,
) -> TimedPath:
    """Plan afresh from the current pose; the previous path is discarded.

    Output timesteps start at current_time so the new path aligns with the
    global clock; obstacle predictions are indexed relative to now.
    """
    return plan(current, goal, grid, static_field, obstacles, config, start_time=current_time)
