"""Result records shared by the simulator and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

from .conflicts import Conflict


@dataclass
class AgentReport:
    id: str
    success: bool
    arrival_tick: int | None
    path_length_m: float
    plan_times: list[float] = field(default_factory=list)
    status: str = "planning"


@dataclass
class SimReport:
    planner: str
    agents: list[AgentReport]
    trajectories: dict
    conflicts: list[Conflict]
    ticks: int

    @property
    def total_path_length(self) -> float:
        return sum(a.path_length_m for a in self.agents)

    @property
    def all_plan_times(self) -> list[float]:
        return [t for a in self.agents for t in a.plan_times]

    @property
    def max_plan_time(self) -> float:
        times = self.all_plan_times
        return max(times) if times else 0.0

    @property
    def mean_plan_time(self) -> float:
        times = self.all_plan_times
        return sum(times) / len(times) if times else 0.0

    @property
    def success_count(self) -> int:
        return sum(1 for a in self.agents if a.success)
