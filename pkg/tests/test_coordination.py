import threading

import pytest

from riskmapf.conflicts import validate
from riskmapf.coordination import (
    AgentSpec,
    PathBlackboard,
    SimulationSetupError,
    paths_to_obstacles,
    run_simulation,
)
from riskmapf.grid import grid_to_world, load_ascii
from riskmapf.planner import PlannerConfig, TimedPath, plan
from riskmapf.risk import build_static_field
from riskmapf.scenario import Scenario


def make_scenario(map_text, agents, obstacles=(), horizon=60, replan_interval=5, **config_kw):
    defaults = dict(connectivity=4, roi=2.0, roi_crit=1.0, time_cost_weight=1.0)
    defaults.update(config_kw)
    return Scenario(
        name="test",
        grid=load_ascii(map_text),
        agents=list(agents),
        obstacles=list(obstacles),
        config=PlannerConfig(**defaults),
        horizon=horizon,
        replan_interval=replan_interval,
    )


def swap_scenario(**kw):
    # Two-lane corridor with an alcove bump; agents swap ends.
    map_text = ".......\n.......\n###.###"
    agents = [
        AgentSpec(id="a", start=(0, 0), goal=(6, 0)),
        AgentSpec(id="b", start=(6, 0), goal=(0, 0)),
    ]
    return make_scenario(map_text, agents, **kw)


class TestBlackboard:
    def path(self, x):
        return TimedPath(steps=(((x, 0), 0),), total_cost=0.0, total_length=0.0)

    def test_publish_then_snapshot(self):
        board = PathBlackboard()
        board.publish("a", self.path(1), 0)
        assert "a" in board.snapshot()

    def test_snapshot_isolated_from_later_publish(self):
        board = PathBlackboard()
        board.publish("a", self.path(1), 0)
        snap = board.snapshot()
        board.publish("b", self.path(2), 1)
        assert "b" not in snap

    def test_latest_wins(self):
        board = PathBlackboard()
        board.publish("a", self.path(1), 0)
        board.publish("a", self.path(2), 1)
        path, tick = board.snapshot()["a"]
        assert path.steps[0][0] == (2, 0)
        assert tick == 1

    def test_atomic_under_interleaving(self):
        # Writers flip between two whole paths; readers must only ever see
        # one of the two complete versions.
        board = PathBlackboard()
        version_a = TimedPath(steps=tuple(((i, 0), i) for i in range(50)), total_cost=1.0, total_length=1.0)
        version_b = TimedPath(steps=tuple(((i, 1), i) for i in range(50)), total_cost=2.0, total_length=2.0)
        stop = threading.Event()
        seen_bad = []

        def writer():
            i = 0
            while not stop.is_set():
                board.publish("w", version_a if i % 2 == 0 else version_b, i)
                i += 1

        def reader():
            while not stop.is_set():
                snap = board.snapshot()
                if "w" in snap:
                    path, _ = snap["w"]
                    if path is not version_a and path is not version_b:
                        seen_bad.append(path)

        threads = [threading.Thread(target=writer) for _ in range(2)] + [
            threading.Thread(target=reader) for _ in range(2)
        ]
        for th in threads:
            th.start()
        import time as _time

        _time.sleep(0.2)
        stop.set()
        for th in threads:
            th.join()
        assert not seen_bad


class TestPathsToObstacles:
    def test_empty_snapshot(self):
        grid = load_ascii("...")
        assert len(paths_to_obstacles({}, "a", {}, grid, 0)) == 0

    def test_current_pose_alignment(self):
        grid = load_ascii(".....")
        path = TimedPath(steps=tuple(((x, 0), x) for x in range(5)), total_cost=4.0, total_length=4.0)
        obs = paths_to_obstacles({"other": (path, 0)}, "me", {"other": (0.3, 0.3)}, grid, 2)
        assert len(obs) == 1
        from riskmapf.dynamics import predict_pose

        pose = predict_pose(obs[0], 0, 1.0)
        assert (pose.x, pose.y) == grid_to_world(grid, (2, 0))

    def test_excludes_self(self):
        grid = load_ascii("...")
        path = TimedPath(steps=(((0, 0), 0),), total_cost=0.0, total_length=0.0)
        obs = paths_to_obstacles({"me": (path, 0)}, "me", {"me": (0.3, 0.3)}, grid, 0)
        assert len(obs) == 0

    def test_rests_at_final_cell(self):
        grid = load_ascii(".....")
        path = TimedPath(steps=tuple(((x, 0), x) for x in range(3)), total_cost=2.0, total_length=2.0)
        obs = paths_to_obstacles({"other": (path, 0)}, "me", {"other": (0.3, 0.3)}, grid, 1)
        from riskmapf.dynamics import predict_pose

        for n in (1, 5, 50):
            pose = predict_pose(obs[0], n, 1.0)
            assert (pose.x, pose.y) == grid_to_world(grid, (2, 0))


class TestRunSimulation:
    def test_single_agent_geodesic_arrival(self):
        scenario = make_scenario(".....\n.....", [AgentSpec(id="a", start=(0, 0), goal=(4, 0))])
        report = run_simulation(scenario)
        agent = report.agents[0]
        assert agent.success
        assert agent.arrival_tick == 4
        assert report.conflicts == []

    def test_swap_sequential_zero_conflicts(self):
        report = run_simulation(swap_scenario(), ordering="sequential")
        assert all(a.success for a in report.agents)
        bad = [c for c in report.conflicts if c.kind in ("vertex", "edge", "swap")]
        assert bad == []

    def test_concurrent_replan_resolves_race(self):
        # Crossing routes: the concurrent snapshot lets both agents plan
        # through the same region at once; per-tick replanning repairs it.
        scenario = make_scenario(
            "\n".join(["." * 6] * 6),
            [AgentSpec(id="a", start=(0, 2), goal=(5, 2)), AgentSpec(id="b", start=(2, 1), goal=(2, 5))],
            replan_interval=1,
        )
        grid = scenario.grid
        cfg = scenario.config
        field = build_static_field(grid, cfg.risk_config())
        a0 = plan((0, 2), (5, 2), grid, field, (), cfg)
        b0 = plan((2, 1), (2, 5), grid, field, (), cfg)
        # The independently planned first-tick paths violate the joint
        # critical band somewhere (a predicted conflict).
        predicted = False
        for (ca, ta) in a0.steps:
            cb = b0.cell_at(ta)
            if abs(ca[0] - cb[0]) + abs(ca[1] - cb[1]) <= 1:
                predicted = True
        assert predicted
        report = run_simulation(scenario, ordering="concurrent", replan_interval=1)
        assert all(a.success for a in report.agents)
        bad = [c for c in report.conflicts if c.kind in ("vertex", "edge", "swap")]
        assert bad == []

    def test_plan_once_matches_executed(self):
        # Static world, replan only at t=0: execution replays the published
        # plans exactly, agent by agent in publication order.
        scenario = swap_scenario(horizon=40)
        report = run_simulation(scenario, replan_interval=scenario.horizon)
        grid = scenario.grid
        cfg = scenario.config
        field = build_static_field(grid, cfg.risk_config())
        a_path = plan((0, 0), (6, 0), grid, field, (), cfg, start_time=0)
        board = {"a": (a_path, 0)}
        obstacles = paths_to_obstacles(board, "b", {a.id: a.footprint for a in scenario.agents}, grid, 0)
        b_path = plan((6, 0), (0, 0), grid, field, obstacles, cfg, start_time=0)
        for aid, path in (("a", a_path), ("b", b_path)):
            executed = report.trajectories[aid]
            for t, cell in enumerate(executed):
                assert cell == path.cell_at(t)

    def test_executed_trajectories_continuous(self):
        report = run_simulation(swap_scenario())
        for traj in report.trajectories.values():
            for a, b in zip(traj, traj[1:]):
                assert abs(a[0] - b[0]) + abs(a[1] - b[1]) <= 1

    def test_duplicate_starts_rejected(self):
        scenario = make_scenario(
            "...", [AgentSpec(id="a", start=(0, 0), goal=(2, 0)), AgentSpec(id="b", start=(0, 0), goal=(1, 0))]
        )
        with pytest.raises(SimulationSetupError, match="duplicate"):
            run_simulation(scenario)

    def test_occupied_goal_rejected(self):
        scenario = make_scenario(".#.", [AgentSpec(id="a", start=(0, 0), goal=(1, 0))])
        with pytest.raises(SimulationSetupError, match="occupied"):
            run_simulation(scenario)

    def test_report_lengths_match_trajectories(self):
        from riskmapf.planner import path_length_m

        scenario = swap_scenario()
        report = run_simulation(scenario)
        for agent in report.agents:
            expected = path_length_m(report.trajectories[agent.id], scenario.grid.resolution)
            assert agent.path_length_m == pytest.approx(expected)
        assert report.total_path_length == pytest.approx(sum(a.path_length_m for a in report.agents))
