import math

import numpy as np
import pytest

from oracles import dijkstra_geodesic, random_map
from riskmapf.dynamics import DynamicObstacle, ObstacleSet
from riskmapf.grid import CellState, load_ascii
from riskmapf.planner import (
    InvalidEndpointError,
    NoPathError,
    PlannerConfig,
    SearchNode,
    TimedPath,
    WatchdogTimeoutError,
    edge_cost,
    heuristic,
    plan,
    replan_from,
)
from riskmapf.risk import RiskConfig, StaticRiskField, build_static_field


def neutral_config(**kw):
    """Risk-neutral settings: bare A* behavior on free/occupied maps."""
    defaults = dict(
        connectivity=4,
        roi=0.5,
        roi_crit=0.0,
        time_cost_weight=0.0,
        unknown_heuristic_factor=1.0,
    )
    defaults.update(kw)
    return PlannerConfig(**defaults)


def crossing_fixture():
    """1x5 corridor; an obstacle sweeps cell 4 down to cell 0 and parks there."""
    grid = load_ascii(".....")
    config = PlannerConfig(
        connectivity=4,
        roi=2.0,
        roi_crit=0.5,
        time_cost_weight=1.0,
        wait_cost=1.0,
    )
    field = build_static_field(grid, config.risk_config())
    path = tuple((4.5 - t, 0.5) for t in range(5))
    obstacle = DynamicObstacle(
        id="walker", x=4.5, y=0.5, major=0.3, minor=0.3, velocity=(-1.0, 0.0), shared_path=path
    )
    return grid, field, ObstacleSet([obstacle]), config


def assert_valid_timed_path(path: TimedPath, grid, connectivity):
    times = [t for _, t in path.steps]
    assert times == list(range(times[0], times[0] + len(times)))
    for (a, _), (b, _) in zip(path.steps, path.steps[1:]):
        dx, dy = abs(b[0] - a[0]), abs(b[1] - a[1])
        if connectivity == 4:
            assert dx + dy <= 1
        else:
            assert max(dx, dy) <= 1
    for cell, _ in path.steps:
        assert not grid.is_occupied(cell)


class TestHeuristic:
    def test_free_cell_euclidean(self):
        assert heuristic((0, 0), (3, 4), CellState.FREE, PlannerConfig()) == pytest.approx(5.0)

    def test_unknown_cell_inflated(self):
        assert heuristic((0, 0), (3, 4), CellState.UNKNOWN, PlannerConfig()) == pytest.approx(250.0)

    def test_at_goal(self):
        assert heuristic((2, 2), (2, 2), CellState.FREE, PlannerConfig()) == 0.0


class TestEdgeCost:
    def test_plain_step(self):
        grid = load_ascii("...")
        config = neutral_config()
        field = build_static_field(grid, config.risk_config())
        node = SearchNode(v=(0, 0), g=0.0, h=2.0, n=0)
        assert edge_cost(node, (1, 0), 1.0, field, (), config) == pytest.approx(1.0)

    def test_step_into_occupied(self):
        grid = load_ascii(".#")
        config = neutral_config()
        field = build_static_field(grid, config.risk_config())
        node = SearchNode(v=(0, 0), g=0.0, h=1.0, n=0)
        assert edge_cost(node, (1, 0), 1.0, field, (), config) == math.inf

    def test_step_includes_proximity(self):
        grid = load_ascii("#..")
        config = PlannerConfig(connectivity=4, roi=98.0, roi_crit=0.0, time_cost_weight=0.0)
        field = build_static_field(grid, config.risk_config())
        node = SearchNode(v=(2, 0), g=0.0, h=1.0, n=0)
        assert edge_cost(node, (1, 0), 1.0, field, (), config) == pytest.approx(100.0)

    def test_time_term_uses_arrival_step(self):
        grid = load_ascii("...")
        config = neutral_config(time_cost_weight=2.0)
        field = build_static_field(grid, config.risk_config())
        node = SearchNode(v=(0, 0), g=5.0, h=2.0, n=3)
        assert edge_cost(node, (1, 0), 1.0, field, (), config) == pytest.approx(1.0 + 2.0 * 4)


class TestPlanBasics:
    def test_straight_corridor(self):
        grid = load_ascii(".....")
        config = PlannerConfig(connectivity=4)
        field = build_static_field(grid, config.risk_config())
        path = plan((0, 0), (4, 0), grid, field, (), config)
        assert path.steps == tuple(((x, 0), x) for x in range(5))
        assert path.total_length == pytest.approx(4.0)

    def test_walled_off_goal(self):
        grid = load_ascii(".#.\n.#.\n.#.")
        config = PlannerConfig(connectivity=8)
        field = build_static_field(grid, config.risk_config())
        with pytest.raises(NoPathError):
            plan((0, 1), (2, 1), grid, field, (), config)

    def test_zero_watchdog_budget(self):
        grid = load_ascii(".....")
        config = PlannerConfig(connectivity=4, watchdog_max_expansions=0)
        field = build_static_field(grid, config.risk_config())
        with pytest.raises(WatchdogTimeoutError):
            plan((0, 0), (4, 0), grid, field, (), config)

    def test_invalid_endpoints(self):
        grid = load_ascii(".#")
        config = neutral_config()
        field = build_static_field(grid, config.risk_config())
        with pytest.raises(InvalidEndpointError):
            plan((9, 9), (0, 0), grid, field, (), config)
        with pytest.raises(InvalidEndpointError):
            plan((0, 0), (1, 0), grid, field, (), config)

    def test_start_equals_goal(self):
        grid = load_ascii("...")
        config = neutral_config()
        field = build_static_field(grid, config.risk_config())
        path = plan((1, 0), (1, 0), grid, field, (), config, start_time=7)
        assert path.steps == (((1, 0), 7),)

    def test_determinism(self):
        grid, field, obstacles, config = crossing_fixture()
        a = plan((0, 0), (4, 0), grid, field, obstacles, config)
        b = plan((0, 0), (4, 0), grid, field, obstacles, config)
        assert a.steps == b.steps
        assert a.total_cost == b.total_cost


class TestDegenerateAstar:
    def test_matches_dijkstra_on_random_maps(self):
        rng = np.random.default_rng(11)
        config = neutral_config()
        checked = 0
        while checked < 12:
            grid = random_map(rng, 20, 20, occupied_frac=0.25)
            free = grid.free_cells()
            start, goal = free[0], free[-1]
            if start == goal:
                continue
            expected = dijkstra_geodesic(grid, start, goal, 4)
            field = build_static_field(grid, config.risk_config())
            if expected is None:
                with pytest.raises(NoPathError):
                    plan(start, goal, grid, field, (), config)
            else:
                path = plan(start, goal, grid, field, (), config)
                assert path.total_cost == expected
                assert_valid_timed_path(path, grid, 4)
            checked += 1

    def test_diagonal_costs(self):
        grid = load_ascii("...\n...\n...")
        config = neutral_config(connectivity=8)
        field = build_static_field(grid, config.risk_config())
        path = plan((0, 0), (2, 2), grid, field, (), config)
        assert path.total_cost == pytest.approx(2 * math.sqrt(2))


class TestWaiting:
    def test_corridor_crossing_inserts_wait(self):
        grid, field, obstacles, config = crossing_fixture()
        path = plan((0, 0), (4, 0), grid, field, obstacles, config)
        assert path.wait_count() >= 1
        assert_valid_timed_path(path, grid, 4)
        # Obstacle occupies cell max(4 - t, 0) at tick t; never co-occupy.
        for (cell, t) in path.steps:
            assert cell[0] != max(4 - t, 0)

    def test_wait_steps_advance_time_by_one(self):
        grid, field, obstacles, config = crossing_fixture()
        path = plan((0, 0), (4, 0), grid, field, obstacles, config)
        for (a, ta), (b, tb) in zip(path.steps, path.steps[1:]):
            assert tb == ta + 1

    def test_goal_blocked_forever_times_out(self):
        grid = load_ascii(".....")
        config = PlannerConfig(
            connectivity=4,
            roi=2.0,
            roi_crit=0.5,
            watchdog_max_expansions=3000,
            watchdog_max_seconds=5.0,
        )
        field = build_static_field(grid, config.risk_config())
        parked = DynamicObstacle(
            id="parked",
            x=3.5,
            y=0.5,
            major=0.3,
            minor=0.3,
            shared_path=((3.5, 0.5), (4.5, 0.5)),
        )
        with pytest.raises(WatchdogTimeoutError):
            plan((0, 0), (4, 0), grid, field, ObstacleSet([parked]), config)


class TestReplan:
    def test_unchanged_world_tail(self):
        grid = load_ascii("......")
        config = PlannerConfig(connectivity=4)
        field = build_static_field(grid, config.risk_config())
        original = plan((0, 0), (5, 0), grid, field, (), config)
        current = original.cell_at(2)
        tail = replan_from(current, 2, original, (5, 0), grid, field, (), config)
        assert tail.steps == original.steps[2:]

    def test_new_obstacle_changes_route(self):
        grid = load_ascii(".....\n.....\n.....")
        config = PlannerConfig(connectivity=4, roi=1.5, roi_crit=0.5, time_cost_weight=1.0)
        field = build_static_field(grid, config.risk_config())
        free = plan((0, 1), (4, 1), grid, field, (), config)
        blocker = DynamicObstacle(id="b", x=2.5, y=1.5, major=0.4, minor=0.4)
        rerouted = replan_from((0, 1), 0, free, (4, 1), grid, field, ObstacleSet([blocker]), config)
        assert rerouted.steps != free.steps
        assert (2, 1) not in rerouted.cells()

    def test_replan_at_goal(self):
        grid = load_ascii("...")
        config = neutral_config()
        field = build_static_field(grid, config.risk_config())
        path = replan_from((2, 0), 9, None, (2, 0), grid, field, (), config)
        assert path.steps == (((2, 0), 9),)


class TestRiskShaping:
    def gap_map(self):
        # Wall column at x=9: one-cell gap at y=1, three-cell gap at y=4..6.
        rows = []
        for y in range(11):
            mid = "." if y in (1, 4, 5, 6) else "#"
            rows.append("." * 9 + mid + "." * 9)
        return load_ascii("\n".join(rows))

    def test_prefers_wide_gap(self):
        grid = self.gap_map()
        config = PlannerConfig(connectivity=8, roi=3.0, roi_crit=1.5, time_cost_weight=0.0)
        field = build_static_field(grid, config.risk_config())
        path = plan((2, 1), (16, 1), grid, field, (), config)
        crossing_rows = [cell[1] for cell in path.cells() if cell[0] == 9]
        assert crossing_rows  # must cross the wall column
        assert all(r == 5 for r in crossing_rows)
        straight = 14.0
        assert path.total_length > straight

    def test_scaling_static_risk_keeps_route(self):
        grid = self.gap_map()
        config = PlannerConfig(connectivity=8, roi=3.0, roi_crit=1.5, time_cost_weight=0.0)
        base = build_static_field(grid, config.risk_config())
        scaled = StaticRiskField(
            grid=grid,
            config=base.config,
            occupancy=np.array(base.occupancy) * 3.0,
            proximity=np.array(base.proximity) * 3.0,
        )
        p1 = plan((2, 1), (16, 1), grid, base, (), config)
        p2 = plan((2, 1), (16, 1), grid, scaled, (), config)
        assert p1.steps == p2.steps


class TestSafety:
    def test_path_risk_always_finite(self):
        grid, field, obstacles, config = crossing_fixture()
        path = plan((0, 0), (4, 0), grid, field, obstacles, config)
        from riskmapf.dynamics import dynamic_risk
        from riskmapf.grid import grid_to_world

        for cell, t in path.steps:
            assert math.isfinite(field.combined_at(cell))
            p = grid_to_world(grid, cell)
            r = dynamic_risk(obstacles, p, t, config.dt, config.risk_config())
            assert math.isfinite(r)
