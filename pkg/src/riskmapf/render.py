"""Deterministic SVG rendering of grids, risk fields, obstacles, and paths.

Output is plain SVG 1.1 markup assembled with fixed number formatting, so
identical inputs produce byte-identical documents. Pixel y grows downward
and matches grid row order.
"""

from __future__ import annotations

import math

from .coordination import obstacle_at_tick
from .dynamics import DynamicObstacle
from .grid import GridMap
from .risk import StaticRiskField

CELL_PX = 16

_PALETTE = (
    "#2e7d32",
    "#c62828",
    "#1565c0",
    "#ef6c00",
    "#6a1b9a",
    "#00838f",
    "#9e9d24",
    "#4e342e",
)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _gray(value: float) -> str:
    if not math.isfinite(value):
        return "#000000"
    v = min(max(value, 0.0), 100.0)
    level = int(round(255.0 * (1.0 - v / 100.0)))
    return f"#{level:02x}{level:02x}{level:02x}"


def _world_to_px(grid: GridMap, p) -> tuple[float, float]:
    ox, oy = grid.origin
    scale = CELL_PX / grid.resolution
    return ((p[0] - ox) * scale, (p[1] - oy) * scale)


def _cell_center_px(cell) -> tuple[float, float]:
    return ((cell[0] + 0.5) * CELL_PX, (cell[1] + 0.5) * CELL_PX)


def render_svg(
    grid: GridMap,
    field: StaticRiskField | None = None,
    obstacles: list[DynamicObstacle] = (),
    trajectories: dict | None = None,
    starts: dict | None = None,
    goals: dict | None = None,
    tick: int = 0,
    dt: float = 1.0,
) -> str:
    """Compose an SVG snapshot: risk shading, obstacle ellipses at their
    tick poses, trajectory polylines, and start/goal markers."""
    w_px = grid.width * CELL_PX
    h_px = grid.height * CELL_PX
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w_px}" height="{h_px}" '
        f'viewBox="0 0 {w_px} {h_px}">'
    ]
    parts.append(f'<rect x="0" y="0" width="{w_px}" height="{h_px}" fill="#ffffff"/>')

    for y in range(grid.height):
        for x in range(grid.width):
            if field is not None:
                color = _gray(float(field.combined[y, x]))
            else:
                state = int(grid.cells[y, x])
                color = {0: "#ffffff", 1: "#000000", 2: "#bbbbbb"}[state]
            if color != "#ffffff":
                parts.append(
                    f'<rect x="{x * CELL_PX}" y="{y * CELL_PX}" width="{CELL_PX}" height="{CELL_PX}" fill="{color}"/>'
                )

    for ob in obstacles:
        moved = obstacle_at_tick(ob, tick, dt)
        cx, cy = _world_to_px(grid, (moved.x, moved.y))
        rx = moved.major * CELL_PX / grid.resolution
        ry = moved.minor * CELL_PX / grid.resolution
        deg = math.degrees(moved.theta)
        parts.append(
            f'<ellipse cx="{_fmt(cx)}" cy="{_fmt(cy)}" rx="{_fmt(rx)}" ry="{_fmt(ry)}" '
            f'fill="#f06292" fill-opacity="0.7" stroke="#880e4f" '
            f'transform="rotate({_fmt(deg)} {_fmt(cx)} {_fmt(cy)})"/>'
        )

    names = sorted(trajectories) if trajectories else []
    for i, name in enumerate(names):
        color = _PALETTE[i % len(_PALETTE)]
        cells = trajectories[name]
        if hasattr(cells, "cells"):
            cells = cells.cells()
        points = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in (_cell_center_px(c) for c in cells))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="3"/>')
        if tick < len(cells):
            px, py = _cell_center_px(cells[tick])
            parts.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(CELL_PX * 0.35)}" fill="{color}"/>')

    for i, name in enumerate(sorted(starts) if starts else []):
        color = _PALETTE[i % len(_PALETTE)]
        px, py = _cell_center_px(starts[name])
        parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(CELL_PX * 0.45)}" fill="none" '
            f'stroke="{color}" stroke-width="2"/>'
        )
    for i, name in enumerate(sorted(goals) if goals else []):
        color = _PALETTE[i % len(_PALETTE)]
        px, py = _cell_center_px(goals[name])
        half = CELL_PX * 0.35
        parts.append(
            f'<path d="M {_fmt(px - half)} {_fmt(py - half)} L {_fmt(px + half)} {_fmt(py + half)} '
            f'M {_fmt(px - half)} {_fmt(py + half)} L {_fmt(px + half)} {_fmt(py - half)}" '
            f'stroke="{color}" stroke-width="2"/>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_scenario(scenario, report, tick: int) -> str:
    """Render a simulation snapshot for a scenario and its report."""
    if tick > scenario.horizon:
        raise ValueError(f"tick {tick} beyond horizon {scenario.horizon}")
    from .risk import build_static_field

    field = build_static_field(scenario.grid, scenario.config.risk_config())
    return render_svg(
        scenario.grid,
        field=field,
        obstacles=scenario.obstacles,
        trajectories=report.trajectories if report is not None else None,
        starts={a.id: a.start for a in scenario.agents},
        goals={a.id: a.goal for a in scenario.agents},
        tick=tick,
        dt=scenario.config.dt,
    )
