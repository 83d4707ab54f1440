"""Joint-plan conflict records and trajectory auditing.

A conflict is a typed violation between agents' time-aligned trajectories.
Five kinds are distinguished: vertex (same cell, same tick), edge and swap
(a pair exchanging cells across one tick; on a grid the two coincide and
both labels are reported), follow (trailing another agent with zero
separation for two or more consecutive ticks), and cyclic (three or more
agents rotating through each other's cells in one tick; two-agent rotations
are exactly swaps). Trajectories shorter than the audit window are padded
by resting at their final cell.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grid import Cell

_KIND_RANK = {"vertex": 0, "edge": 1, "swap": 2, "follow": 3, "cyclic": 4}


@dataclass(frozen=True)
class Conflict:
    kind: str
    agents: tuple
    cells: tuple
    time: int

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown conflict kind {self.kind!r}")
        if self.kind == "vertex" and len(self.agents) < 2:
            raise ValueError("vertex conflicts involve at least two agents")
        if self.kind in ("edge", "swap") and len(self.agents) != 2:
            raise ValueError(f"{self.kind} conflicts involve exactly two agents")


def _as_cells(path) -> list[Cell]:
    if hasattr(path, "cells"):
        return path.cells()
    return list(path)


def _normalize(trajectories) -> tuple[list, list[list[Cell]]]:
    if isinstance(trajectories, dict):
        ids = list(trajectories.keys())
        trajs = [_as_cells(trajectories[i]) for i in ids]
    else:
        trajs = [_as_cells(p) for p in trajectories]
        ids = list(range(len(trajs)))
    return ids, trajs


def detect_first_conflict(solution) -> Conflict | None:
    """Earliest vertex or swap conflict in a joint solution, or None.

    Agents rest at their final cell after arrival; at equal time a vertex
    conflict is reported before an exchange.
    """
    ids, trajs = _normalize(solution)
    if len(trajs) < 2:
        return None
    horizon = max(len(t) for t in trajs)

    def at(i: int, t: int) -> Cell:
        traj = trajs[i]
        return traj[t] if t < len(traj) else traj[-1]

    for t in range(horizon):
        seen: dict[Cell, list] = {}
        for i in range(len(trajs)):
            seen.setdefault(at(i, t), []).append(i)
        for cell in sorted(seen):
            group = seen[cell]
            if len(group) >= 2:
                return Conflict("vertex", tuple(ids[i] for i in group), (cell,), t)
        if t >= 1:
            for i in range(len(trajs)):
                for j in range(i + 1, len(trajs)):
                    if (
                        at(i, t) == at(j, t - 1)
                        and at(j, t) == at(i, t - 1)
                        and at(i, t) != at(i, t - 1)
                    ):
                        return Conflict("swap", (ids[i], ids[j]), (at(i, t - 1), at(j, t - 1)), t)
    return None


def validate(trajectories) -> list[Conflict]:
    """Audit executed trajectories for all five conflict kinds, earliest first."""
    ids, trajs = _normalize(trajectories)
    if len(trajs) < 2:
        return []
    horizon = max(len(t) for t in trajs)
    n_agents = len(trajs)

    def at(i: int, t: int) -> Cell:
        traj = trajs[i]
        return traj[t] if t < len(traj) else traj[-1]

    out: list[Conflict] = []

    for t in range(horizon):
        seen: dict[Cell, list] = {}
        for i in range(n_agents):
            seen.setdefault(at(i, t), []).append(i)
        for cell in sorted(seen):
            group = seen[cell]
            if len(group) >= 2:
                out.append(Conflict("vertex", tuple(ids[i] for i in group), (cell,), t))

    for t in range(1, horizon):
        for i in range(n_agents):
            for j in range(i + 1, n_agents):
                if (
                    at(i, t) == at(j, t - 1)
                    and at(j, t) == at(i, t - 1)
                    and at(i, t) != at(i, t - 1)
                ):
                    pair = (ids[i], ids[j])
                    cells = (at(i, t - 1), at(j, t - 1))
                    out.append(Conflict("edge", pair, cells, t))
                    out.append(Conflict("swap", pair, cells, t))

    # Follow: B repeatedly enters the cell A vacated on the same tick.
    for a in range(n_agents):
        for b in range(n_agents):
            if a == b:
                continue
            run = 0
            for t in range(horizon - 1):
                trails = (
                    at(b, t + 1) == at(a, t)
                    and at(a, t + 1) != at(a, t)
                    and at(b, t + 1) != at(b, t)
                )
                if trails:
                    run += 1
                    if run == 2:
                        out.append(Conflict("follow", (ids[a], ids[b]), (at(b, t),), t))
                else:
                    run = 0

    # Cyclic: >= 3 agents rotating through each other's cells in one tick.
    for t in range(horizon - 1):
        occupant = {at(i, t): i for i in range(n_agents)}
        succ: dict[int, int] = {}
        for i in range(n_agents):
            if at(i, t + 1) == at(i, t):
                continue
            j = occupant.get(at(i, t + 1))
            if j is not None and j != i and at(j, t + 1) != at(j, t):
                succ[i] = j
        visited: set[int] = set()
        for i in succ:
            if i in visited:
                continue
            chain = []
            node = i
            index = {}
            while node in succ and node not in index and node not in visited:
                index[node] = len(chain)
                chain.append(node)
                node = succ[node]
            visited.update(chain)
            if node in index:
                cycle = chain[index[node]:]
                if len(cycle) >= 3:
                    rotated = min(range(len(cycle)), key=lambda k: cycle[k])
                    cycle = cycle[rotated:] + cycle[:rotated]
                    out.append(
                        Conflict(
                            "cyclic",
                            tuple(ids[k] for k in cycle),
                            tuple(at(k, t) for k in cycle),
                            t + 1,
                        )
                    )

    out.sort(key=lambda c: (c.time, _KIND_RANK[c.kind], tuple(map(str, c.agents))))
    return out
