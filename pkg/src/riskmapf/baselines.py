"""Classical MAPF reference planners: space-time A*, CBS, ECBS, and SIPP.

These operate on raw occupancy grids with unit action costs (move and wait
cost 1, diagonals sqrt(2) under 8-connectivity) and ignore the risk layers;
an optional inflation pre-pass thickens walls instead. Agents rest at their
goal after arrival and conflicts against resting agents count. Sum of
individual path costs is the objective throughout.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .conflicts import Conflict, detect_first_conflict
from .grid import SQRT2, Cell, CellState, GridMap
from .planner import NoPathError, TimedPath, path_length_m
from .risk import nearest_occupied_distances


class MAPFError(Exception):
    """Base class for multi-agent search failures."""


class NoSolutionError(MAPFError):
    """The conflict-tree search was exhausted without a conflict-free solution."""


class BudgetExceededError(MAPFError):
    """The conflict-tree node budget ran out."""


@dataclass(frozen=True)
class Constraint:
    """Forbids one agent from a cell at a time (vertex) or a directed move
    arriving at a time (edge)."""

    agent: int
    kind: str
    cells: tuple
    time: int

    def __post_init__(self):
        if self.kind not in ("vertex", "edge"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.kind == "vertex" and len(self.cells) != 1:
            raise ValueError("vertex constraints carry one cell")
        if self.kind == "edge" and len(self.cells) != 2:
            raise ValueError("edge constraints carry two cells")


@dataclass
class SearchStats:
    expanded: int = 0
    generated: int = 0


@dataclass(frozen=True)
class SafeInterval:
    cell: Cell
    start: int
    end: int  # inclusive; may be math.inf for the open-ended tail


def inflate(grid: GridMap, radius_cells: float) -> GridMap:
    """Mark every cell within radius_cells of an occupied cell as occupied."""
    if radius_cells <= 0:
        return grid
    d = nearest_occupied_distances(grid)
    cells = np.array(grid.cells)
    cells[d <= radius_cells] = CellState.OCCUPIED
    return GridMap(grid.width, grid.height, grid.resolution, grid.origin, cells)


class _Schedule:
    """Timed occupancy from already-planned paths: vertex bans, swap bans,
    and permanent rest at each path's final cell."""

    def __init__(self, paths):
        self.vertex: dict[int, set[Cell]] = {}
        self.moves: set[tuple[Cell, Cell, int]] = set()
        self.rest: dict[Cell, int] = {}
        self.t_max = 0
        for path in paths:
            steps = list(path.steps) if isinstance(path, TimedPath) else [(c, t) for t, c in enumerate(path)]
            if not steps:
                continue
            for (c, t) in steps:
                self.vertex.setdefault(t, set()).add(c)
            for (c0, t0), (c1, t1) in zip(steps, steps[1:]):
                if c0 != c1:
                    self.moves.add((c0, c1, t1))
            last_cell, last_t = steps[-1]
            prev = self.rest.get(last_cell)
            self.rest[last_cell] = last_t if prev is None else min(prev, last_t)
            self.t_max = max(self.t_max, last_t)

    def blocked_vertex(self, cell: Cell, t: int) -> bool:
        rest_t = self.rest.get(cell)
        if rest_t is not None and t >= rest_t:
            return True
        return cell in self.vertex.get(t, ())

    def blocked_swap(self, frm: Cell, to: Cell, t: int) -> bool:
        return (to, frm, t) in self.moves

    def occupied_times(self, cell: Cell) -> list[int]:
        return sorted(t for t, cells in self.vertex.items() if cell in cells)

    def rest_start(self, cell: Cell):
        return self.rest.get(cell)


def _heuristic_cost(a: Cell, b: Cell, connectivity: int) -> float:
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    if connectivity == 4:
        return float(dx + dy)
    return float(max(dx, dy)) + (SQRT2 - 1.0) * min(dx, dy)


def _last_goal_block(goal: Cell, schedule: _Schedule, vertex_bans: set[tuple[Cell, int]]) -> float:
    """Latest tick the goal is unavailable; inf when something rests on it."""
    if schedule.rest_start(goal) is not None:
        return math.inf
    last = -1
    for t in schedule.occupied_times(goal):
        last = max(last, t)
    for cell, t in vertex_bans:
        if cell == goal:
            last = max(last, t)
    return last


def space_time_astar(
    agent: int,
    start: Cell,
    goal: Cell,
    grid: GridMap,
    constraints=(),
    obstacle_paths=(),
    connectivity: int = 4,
    horizon: int | None = None,
    stats: SearchStats | None = None,
) -> TimedPath:
    """Optimal single-agent path over (cell, time) honoring constraints and
    scheduled obstacle paths. Cost: waits and orthogonal moves 1, diagonals
    sqrt(2); arrival requires the goal to stay free afterwards."""
    if not grid.in_bounds(start) or grid.is_occupied(start):
        raise NoPathError(f"invalid start {start}")
    if not grid.in_bounds(goal) or grid.is_occupied(goal):
        raise NoPathError(f"invalid goal {goal}")
    schedule = obstacle_paths if isinstance(obstacle_paths, _Schedule) else _Schedule(obstacle_paths)
    vertex_bans = {(c.cells[0], c.time) for c in constraints if c.agent == agent and c.kind == "vertex"}
    edge_bans = {(c.cells[0], c.cells[1], c.time) for c in constraints if c.agent == agent and c.kind == "edge"}
    t_latest = max(
        [schedule.t_max]
        + [c.time for c in constraints if c.agent == agent]
        + [0]
    )
    if horizon is None:
        horizon = t_latest + grid.width * grid.height + 1
    goal_block = _last_goal_block(goal, schedule, vertex_bans)
    if schedule.blocked_vertex(start, 0) or (start, 0) in vertex_bans:
        raise NoPathError(f"start {start} is blocked at t=0")

    adj = grid.adjacency(connectivity)
    w = grid.width
    inf = math.inf
    g_best = {(start[0], start[1], 0): 0.0}
    parent: dict = {(start[0], start[1], 0): None}
    seq = 0
    h0 = _heuristic_cost(start, goal, connectivity)
    heap = [(h0, 0.0, 0, start[1], start[0], seq)]
    while heap:
        f, neg_g, t, y, x, _ = heapq.heappop(heap)
        g = -neg_g
        state = (x, y, t)
        if g > g_best.get(state, inf):
            continue
        if stats is not None:
            stats.expanded += 1
        if (x, y) == goal and t > goal_block:
            return _reconstruct_timed(parent, state, g, grid.resolution)
        if t >= horizon:
            continue
        t1 = t + 1
        frm = (x, y)
        for nx, ny, step in list(adj[y * w + x]) + [(x, y, 1.0)]:
            to = (nx, ny)
            if schedule.blocked_vertex(to, t1) or (to, t1) in vertex_bans:
                continue
            if to != frm and (schedule.blocked_swap(frm, to, t1) or (frm, to, t1) in edge_bans):
                continue
            ng = g + step
            key = (nx, ny, t1)
            if ng < g_best.get(key, inf):
                g_best[key] = ng
                parent[key] = state
                seq += 1
                if stats is not None:
                    stats.generated += 1
                heapq.heappush(heap, (ng + _heuristic_cost(to, goal, connectivity), -ng, t1, ny, nx, seq))
    raise NoPathError(f"no constrained path for agent {agent} from {start} to {goal}")


def _reconstruct_timed(parent, goal_state, total_cost: float, resolution: float) -> TimedPath:
    chain = []
    st = goal_state
    while st is not None:
        chain.append(st)
        st = parent[st]
    chain.reverse()
    steps = tuple(((x, y), t) for x, y, t in chain)
    return TimedPath(steps=steps, total_cost=total_cost, total_length=path_length_m([c for c, _ in steps], resolution))


def _conflict_counting_tables(other_paths):
    occupied: dict[int, dict[Cell, int]] = {}
    moves: set[tuple[Cell, Cell, int]] = set()
    rest: list[tuple[Cell, int]] = []
    for path in other_paths:
        cells = path.cells() if isinstance(path, TimedPath) else list(path)
        for t, c in enumerate(cells):
            occupied.setdefault(t, {}).setdefault(c, 0)
            occupied[t][c] += 1
        for t in range(1, len(cells)):
            if cells[t - 1] != cells[t]:
                moves.add((cells[t - 1], cells[t], t))
        if cells:
            rest.append((cells[-1], len(cells) - 1))
    return occupied, moves, rest


def _conflict_delta(to, frm, t1, tables) -> int:
    occupied, moves, rest = tables
    count = occupied.get(t1, {}).get(to, 0)
    for cell, t_end in rest:
        if to == cell and t1 > t_end:
            count += 1
    if to != frm and (to, frm, t1) in moves:
        count += 1
    return count


def focal_space_time_astar(
    agent: int,
    start: Cell,
    goal: Cell,
    grid: GridMap,
    constraints=(),
    omega: float = 1.0,
    other_paths=(),
    connectivity: int = 4,
    horizon: int | None = None,
    stats: SearchStats | None = None,
) -> tuple[TimedPath, float]:
    """Bounded-suboptimal low-level search: expands, among open nodes whose
    f is within omega of the best, the one colliding least with the other
    agents' current paths. Returns the path and the proven f lower bound."""
    schedule = _Schedule(())
    vertex_bans = {(c.cells[0], c.time) for c in constraints if c.agent == agent and c.kind == "vertex"}
    edge_bans = {(c.cells[0], c.cells[1], c.time) for c in constraints if c.agent == agent and c.kind == "edge"}
    t_latest = max([c.time for c in constraints if c.agent == agent] + [0])
    if horizon is None:
        horizon = t_latest + grid.width * grid.height + 1
    goal_block = _last_goal_block(goal, schedule, vertex_bans)
    tables = _conflict_counting_tables(other_paths)

    adj = grid.adjacency(connectivity)
    w = grid.width
    inf = math.inf
    g_best: dict[tuple, float] = {}
    nc_best: dict[tuple, int] = {}
    parent: dict = {}
    closed: set = set()
    seq = 0
    open_heap: list = []    # (f, -g, t, y, x, seq, state)
    pending: list = []      # mirror of open_heap, drained into focal as the bound grows
    focal: list = []        # (nc, f, -g, t, y, x, seq, state)

    def push(state, g, nc, par, h):
        nonlocal seq
        g_best[state] = g
        nc_best[state] = nc
        parent[state] = par
        seq += 1
        entry = (g + h, -g, state[2], state[1], state[0], seq, state)
        heapq.heappush(open_heap, entry)
        heapq.heappush(pending, entry)
        if stats is not None:
            stats.generated += 1

    def current(state, g) -> bool:
        return state not in closed and g <= g_best.get(state, inf)

    start_state = (start[0], start[1], 0)
    if (start, 0) in vertex_bans:
        raise NoPathError(f"start {start} is blocked at t=0")
    push(start_state, 0.0, 0, None, _heuristic_cost(start, goal, connectivity))

    while True:
        while open_heap and not current(open_heap[0][6], -open_heap[0][1]):
            heapq.heappop(open_heap)
        if not open_heap:
            raise NoPathError(f"no constrained path for agent {agent} from {start} to {goal}")
        f_min = open_heap[0][0]
        bound = omega * f_min + 1e-9
        while pending and pending[0][0] <= bound:
            entry = heapq.heappop(pending)
            if current(entry[6], -entry[1]):
                heapq.heappush(focal, (nc_best[entry[6]],) + entry)
        while focal and not current(focal[0][7], -focal[0][2]):
            heapq.heappop(focal)
        if not focal:
            continue
        nc, f, neg_g, t, y, x, s, state = heapq.heappop(focal)
        closed.add(state)
        g = -neg_g
        if stats is not None:
            stats.expanded += 1
        if (x, y) == goal and t > goal_block:
            return _reconstruct_timed(parent, state, g, grid.resolution), f_min
        if t >= horizon:
            continue
        t1 = t + 1
        frm = (x, y)
        for nx, ny, step in list(adj[y * w + x]) + [(x, y, 1.0)]:
            to = (nx, ny)
            if (to, t1) in vertex_bans:
                continue
            if to != frm and (frm, to, t1) in edge_bans:
                continue
            ng = g + step
            key = (nx, ny, t1)
            if key in closed:
                continue
            if ng < g_best.get(key, inf):
                nnc = nc + _conflict_delta(to, frm, t1, tables)
                push(key, ng, nnc, state, _heuristic_cost(to, goal, connectivity))


@dataclass
class _CTNode:
    constraints: tuple
    paths: list
    costs: list
    fmins: list
    seq: int = 0

    @property
    def cost(self) -> float:
        return sum(self.costs)

    @property
    def lb(self) -> float:
        return sum(self.fmins)


def _path_cost(path: TimedPath) -> float:
    return path.total_cost


def cbs_plan(
    agents,
    grid: GridMap,
    connectivity: int = 4,
    node_budget: int = 100_000,
    horizon: int | None = None,
) -> list[TimedPath]:
    """Conflict-based search: optimal conflict-free joint plan by sum of costs.

    agents is a sequence of (start, goal) cell pairs. Branches on the
    earliest vertex or swap conflict; equal-cost tree nodes expand in
    insertion order. The horizon caps individual arrival times, which keeps
    the tree finite so unsolvable instances exhaust instead of growing.
    """
    if horizon is None:
        horizon = 2 * grid.width * grid.height
    root_paths = [
        space_time_astar(i, s, g, grid, (), (), connectivity=connectivity, horizon=horizon)
        for i, (s, g) in enumerate(agents)
    ]
    root = _CTNode(
        constraints=(),
        paths=root_paths,
        costs=[_path_cost(p) for p in root_paths],
        fmins=[_path_cost(p) for p in root_paths],
    )
    seq = 0
    heap = [(root.cost, 0, root)]
    expanded = 0
    while heap:
        if expanded >= node_budget:
            raise BudgetExceededError(f"conflict-tree budget {node_budget} exhausted")
        _, _, node = heapq.heappop(heap)
        expanded += 1
        conflict = detect_first_conflict(node.paths)
        if conflict is None:
            return node.paths
        for child in _branch(node, conflict, agents, grid, connectivity, horizon):
            seq += 1
            heapq.heappush(heap, (child.cost, seq, child))
    raise NoSolutionError("conflict tree exhausted")


def _constraints_for(conflict: Conflict) -> list[Constraint]:
    a1, a2 = conflict.agents[0], conflict.agents[1]
    if conflict.kind == "vertex":
        cell = conflict.cells[0]
        return [
            Constraint(a1, "vertex", (cell,), conflict.time),
            Constraint(a2, "vertex", (cell,), conflict.time),
        ]
    c1, c2 = conflict.cells
    return [
        Constraint(a1, "edge", (c1, c2), conflict.time),
        Constraint(a2, "edge", (c2, c1), conflict.time),
    ]


def _branch(node: _CTNode, conflict: Conflict, agents, grid, connectivity, horizon):
    for constraint in _constraints_for(conflict):
        constraints = node.constraints + (constraint,)
        agent = constraint.agent
        try:
            new_path = space_time_astar(
                agent, agents[agent][0], agents[agent][1], grid, constraints, (),
                connectivity=connectivity, horizon=horizon,
            )
        except NoPathError:
            continue
        paths = list(node.paths)
        costs = list(node.costs)
        fmins = list(node.fmins)
        paths[agent] = new_path
        costs[agent] = _path_cost(new_path)
        fmins[agent] = _path_cost(new_path)
        yield _CTNode(constraints=constraints, paths=paths, costs=costs, fmins=fmins)


def _count_all_conflicts(paths) -> int:
    trajs = [p.cells() for p in paths]
    horizon = max(len(t) for t in trajs)

    def at(i, t):
        traj = trajs[i]
        return traj[t] if t < len(traj) else traj[-1]

    count = 0
    for t in range(horizon):
        for i in range(len(trajs)):
            for j in range(i + 1, len(trajs)):
                if at(i, t) == at(j, t):
                    count += 1
                elif t >= 1 and at(i, t) == at(j, t - 1) and at(j, t) == at(i, t - 1) and at(i, t) != at(i, t - 1):
                    count += 1
    return count


def ecbs_plan(
    agents,
    grid: GridMap,
    omega: float = 2.0,
    connectivity: int = 4,
    node_budget: int = 100_000,
    horizon: int | None = None,
) -> list[TimedPath]:
    """Bounded-suboptimal CBS with focal search at both levels; the returned
    solution costs at most omega times the optimal sum of costs."""
    if omega < 1.0:
        raise ValueError(f"omega must be >= 1, got {omega}")
    if horizon is None:
        horizon = 2 * grid.width * grid.height
    n = len(agents)
    paths: list = []
    fmins: list = []
    for i, (s, g) in enumerate(agents):
        path, fmin = focal_space_time_astar(
            i, s, g, grid, (), omega=omega, other_paths=[], connectivity=connectivity, horizon=horizon
        )
        paths.append(path)
        fmins.append(fmin)
    root = _CTNode(constraints=(), paths=paths, costs=[_path_cost(p) for p in paths], fmins=fmins)
    open_nodes: list[_CTNode] = [root]
    expanded = 0
    seq = 0
    while open_nodes:
        if expanded >= node_budget:
            raise BudgetExceededError(f"conflict-tree budget {node_budget} exhausted")
        lb_min = min(nd.lb for nd in open_nodes)
        focal = [nd for nd in open_nodes if nd.cost <= omega * lb_min + 1e-9]
        node = min(focal, key=lambda nd: (_count_all_conflicts(nd.paths), nd.cost, nd.seq))
        open_nodes.remove(node)
        expanded += 1
        conflict = detect_first_conflict(node.paths)
        if conflict is None:
            return node.paths
        for constraint in _constraints_for(conflict):
            constraints = node.constraints + (constraint,)
            agent = constraint.agent
            others = [node.paths[k] for k in range(n) if k != agent]
            try:
                new_path, fmin = focal_space_time_astar(
                    agent, agents[agent][0], agents[agent][1], grid, constraints,
                    omega=omega, other_paths=others, connectivity=connectivity, horizon=horizon,
                )
            except NoPathError:
                continue
            new_paths = list(node.paths)
            new_costs = list(node.costs)
            new_fmins = list(node.fmins)
            new_paths[agent] = new_path
            new_costs[agent] = _path_cost(new_path)
            new_fmins[agent] = fmin
            seq += 1
            open_nodes.append(
                _CTNode(constraints=constraints, paths=new_paths, costs=new_costs, fmins=new_fmins, seq=seq)
            )
    raise NoSolutionError("conflict tree exhausted")


class SafeIntervalTable:
    """Per-cell maximal collision-free intervals over [0, horizon]."""

    def __init__(self, occupied, horizon: int):
        if horizon <= 0:
            raise ValueError(f"horizon must be > 0, got {horizon}")
        self.horizon = horizon
        self._by_cell: dict[Cell, list[int]] = {}
        for cell, t in occupied:
            self._by_cell.setdefault(cell, []).append(t)

    def intervals(self, cell: Cell) -> list[SafeInterval]:
        times = sorted(set(t for t in self._by_cell.get(cell, ()) if 0 <= t <= self.horizon))
        out = []
        lo = 0
        for t in times:
            if t > lo:
                out.append(SafeInterval(cell, lo, t - 1))
            lo = t + 1
        if lo <= self.horizon:
            out.append(SafeInterval(cell, lo, self.horizon))
        return out

    def __getitem__(self, cell: Cell) -> list[SafeInterval]:
        return self.intervals(cell)


def build_safe_intervals(cell_schedule, horizon: int) -> SafeIntervalTable:
    """Complement of an occupied (cell, time) schedule as per-cell intervals."""
    return SafeIntervalTable(cell_schedule, horizon)


def _cell_intervals(schedule: _Schedule, cell: Cell) -> list[tuple[int, float]]:
    """Safe intervals (start, end_inclusive) for one cell; the tail is open
    unless something rests on the cell."""
    rest_t = schedule.rest_start(cell)
    times = [t for t in schedule.occupied_times(cell) if rest_t is None or t < rest_t]
    out: list[tuple[int, float]] = []
    lo = 0
    for t in sorted(set(times)):
        if t > lo:
            out.append((lo, t - 1))
        lo = t + 1
    tail_end = math.inf if rest_t is None else rest_t - 1
    if tail_end >= lo:
        out.append((lo, tail_end))
    return out


def sipp_plan(
    agent: int,
    start: Cell,
    goal: Cell,
    grid: GridMap,
    obstacle_paths=(),
    connectivity: int = 4,
    stats: SearchStats | None = None,
) -> TimedPath:
    """Safe-interval path planning against scheduled obstacle paths.

    States are (cell, safe interval) with the earliest arrival time; wait
    actions are implicit in moving to a later interval. Minimizes arrival
    time, which equals path cost under unit 4-connected actions. Arrival is
    only accepted in a goal interval that extends forever.
    """
    if not grid.in_bounds(start) or grid.is_occupied(start):
        raise NoPathError(f"invalid start {start}")
    if not grid.in_bounds(goal) or grid.is_occupied(goal):
        raise NoPathError(f"invalid goal {goal}")
    schedule = obstacle_paths if isinstance(obstacle_paths, _Schedule) else _Schedule(obstacle_paths)
    interval_cache: dict[Cell, list[tuple[int, float]]] = {}

    def intervals(cell: Cell) -> list[tuple[int, float]]:
        ivs = interval_cache.get(cell)
        if ivs is None:
            ivs = _cell_intervals(schedule, cell)
            interval_cache[cell] = ivs
        return ivs

    start_ivs = intervals(start)
    if not start_ivs or start_ivs[0][0] > 0:
        raise NoPathError(f"start {start} is blocked at t=0")

    adj = grid.adjacency(connectivity)
    w = grid.width
    inf = math.inf
    # State: (cell, interval_index); value: earliest arrival time. Ties on
    # f prefer later arrival (deeper progress), matching space-time A*.
    best_t: dict[tuple[Cell, int], int] = {(start, 0): 0}
    parent: dict = {(start, 0): (None, 0)}
    seq = 0
    h0 = _heuristic_cost(start, goal, connectivity)
    heap = [(h0, 0, start[1], start[0], 0, seq)]  # (f, -t, y, x, interval_idx, seq)
    closed: set = set()
    while heap:
        f, neg_t, y, x, ivl_idx, _ = heapq.heappop(heap)
        t = -neg_t
        cell = (x, y)
        state = (cell, ivl_idx)
        if state in closed or t > best_t.get(state, inf):
            continue
        closed.add(state)
        if stats is not None:
            stats.expanded += 1
        ivs = intervals(cell)
        lo, hi = ivs[ivl_idx]
        if cell == goal and hi == inf:
            return _reconstruct_sipp(parent, best_t, state, grid.resolution, connectivity)
        for nx, ny, step in adj[y * w + x]:
            ncell = (nx, ny)
            for j, (nlo, nhi) in enumerate(intervals(ncell)):
                earliest = max(t + 1, nlo)
                latest = min(nhi, hi + 1)
                if earliest > latest:
                    continue
                a = earliest
                while a <= latest and schedule.blocked_swap(cell, ncell, a):
                    a += 1
                if a > latest:
                    continue
                key = (ncell, j)
                if key in closed or a >= best_t.get(key, inf):
                    continue
                best_t[key] = a
                parent[key] = (state, a)
                seq += 1
                if stats is not None:
                    stats.generated += 1
                heapq.heappush(
                    heap, (a + _heuristic_cost(ncell, goal, connectivity), -a, ny, nx, j, seq)
                )
    raise NoPathError(f"no safe-interval path for agent {agent} from {start} to {goal}")


def _reconstruct_sipp(parent, best_t, goal_state, resolution, connectivity) -> TimedPath:
    waypoints = []
    state = goal_state
    while state is not None:
        prev, arrival = parent[state]
        waypoints.append((state[0], arrival))
        state = prev
    waypoints.reverse()
    steps: list[tuple[Cell, int]] = []
    cost = 0.0
    for idx, (cell, arrival) in enumerate(waypoints):
        if idx == 0:
            steps.append((cell, arrival))
            continue
        prev_cell, prev_arrival = waypoints[idx - 1]
        for t in range(prev_arrival + 1, arrival):
            steps.append((prev_cell, t))
            cost += 1.0
        steps.append((cell, arrival))
        dx, dy = abs(cell[0] - prev_cell[0]), abs(cell[1] - prev_cell[1])
        cost += SQRT2 if dx and dy else 1.0
    return TimedPath(
        steps=tuple(steps),
        total_cost=cost,
        total_length=path_length_m([c for c, _ in steps], resolution),
    )


def prioritized_sipp(
    agents,
    grid: GridMap,
    connectivity: int = 4,
) -> list[TimedPath | None]:
    """Plan agents in list order; each treats all earlier paths as moving
    obstacles. Failed agents yield None and planning continues."""
    planned: list[TimedPath | None] = []
    committed: list[TimedPath] = []
    for i, (s, g) in enumerate(agents):
        try:
            path = sipp_plan(i, s, g, grid, committed, connectivity=connectivity)
            planned.append(path)
            committed.append(path)
        except NoPathError:
            planned.append(None)
    return planned
