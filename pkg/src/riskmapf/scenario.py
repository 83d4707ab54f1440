"""Scenario files: maps, agents, obstacles, and planner settings in YAML.

A scenario is a single YAML document (schema_version 1) with a map given
inline as ASCII art, as a path to an ASCII file, or as a map-server style
YAML+PGM pair. Agent and obstacle blocks mirror AgentSpec and
DynamicObstacle; scripted obstacle paths list one world pose per tick.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .coordination import AgentSpec
from .dynamics import DynamicObstacle
from .grid import GridMap, load_ascii, load_pgm_yaml
from .planner import PlannerConfig

SCHEMA_VERSION = 1

_CONFIG_KEYS = {
    "connectivity",
    "roi",
    "roi_crit",
    "unknown_risk",
    "time_cost_weight",
    "wait_cost",
    "watchdog_max_expansions",
    "watchdog_max_seconds",
    "dt",
    "unknown_heuristic_factor",
    "cone_angle",
    "lambda_step",
}


class ScenarioError(ValueError):
    """Scenario file failed to parse or validate; the message names the field."""


@dataclass
class Scenario:
    name: str
    grid: GridMap
    agents: list[AgentSpec]
    obstacles: list[DynamicObstacle]
    config: PlannerConfig
    horizon: int = 200
    replan_interval: int = 5
    ordering: str = "sequential"
    seed: int = 0
    schema_version: int = SCHEMA_VERSION


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ScenarioError(f"{where}: missing key {key!r}")
    return mapping[key]


def _load_map(block, base_dir: Path | None) -> GridMap:
    if not isinstance(block, dict):
        raise ScenarioError("map: expected a mapping")
    if "ascii" in block:
        return load_ascii(block["ascii"])
    if "ascii_file" in block:
        path = _resolve(block["ascii_file"], base_dir, "map.ascii_file")
        return load_ascii(path.read_text())
    if "yaml" in block:
        meta_path = _resolve(block["yaml"], base_dir, "map.yaml")
        meta = yaml.safe_load(meta_path.read_text())
        if not isinstance(meta, dict) or "image" not in meta:
            raise ScenarioError(f"map.yaml: {meta_path} has no 'image' key")
        image_path = meta_path.parent / meta["image"]
        if not image_path.exists():
            raise ScenarioError(f"map.yaml: image file not found: {image_path}")
        return load_pgm_yaml(image_path.read_bytes(), meta_path.read_text())
    raise ScenarioError("map: expected one of 'ascii', 'ascii_file', 'yaml'")


def _resolve(name: str, base_dir: Path | None, where: str) -> Path:
    path = Path(name)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    if not path.exists():
        raise ScenarioError(f"{where}: file not found: {path}")
    return path


def _parse_cell(value, where: str) -> tuple[int, int]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ScenarioError(f"{where}: expected [x, y], got {value!r}")
    return (int(value[0]), int(value[1]))


def _parse_agent(block: dict, idx: int, config: PlannerConfig) -> AgentSpec:
    where = f"agents[{idx}]"
    aid = str(_require(block, "id", where))
    start = _parse_cell(_require(block, "start", where), f"{where}.start")
    goal = _parse_cell(_require(block, "goal", where), f"{where}.goal")
    footprint = block.get("footprint", [0.4, 0.4])
    if not isinstance(footprint, (list, tuple)) or len(footprint) != 2:
        raise ScenarioError(f"{where}.footprint: expected [major, minor]")
    overrides = block.get("config")
    agent_config = None
    if overrides:
        agent_config = _parse_config({**_config_dict(config), **overrides}, f"{where}.config")
    return AgentSpec(
        id=aid,
        start=start,
        goal=goal,
        footprint=(float(footprint[0]), float(footprint[1])),
        config=agent_config,
    )


def _parse_obstacle(block: dict, idx: int) -> DynamicObstacle:
    where = f"obstacles[{idx}]"
    path = block.get("path")
    shared = None
    if path is not None:
        if not isinstance(path, (list, tuple)) or not path:
            raise ScenarioError(f"{where}.path: expected a non-empty list of [x, y] poses")
        shared = tuple((float(p[0]), float(p[1])) for p in path)
    velocity = block.get("velocity", [0.0, 0.0])
    try:
        return DynamicObstacle(
            id=str(_require(block, "id", where)),
            x=float(block["x"]) if "x" in block else (shared[0][0] if shared else _missing(where, "x")),
            y=float(block["y"]) if "y" in block else (shared[0][1] if shared else _missing(where, "y")),
            major=float(_require(block, "major", where)),
            minor=float(_require(block, "minor", where)),
            theta=float(block.get("theta", 0.0)),
            velocity=(float(velocity[0]), float(velocity[1])),
            shared_path=shared,
        )
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _missing(where: str, key: str):
    raise ScenarioError(f"{where}: missing key {key!r}")


def _config_dict(config: PlannerConfig) -> dict:
    return {k: getattr(config, k) for k in _CONFIG_KEYS}


def _parse_config(block: dict, where: str) -> PlannerConfig:
    unknown = set(block) - _CONFIG_KEYS
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return PlannerConfig(**block)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def parse_scenario(text: str, base_dir: Path | None = None) -> Scenario:
    """Parse and validate a scenario document."""
    doc = yaml.safe_load(text)
    if not isinstance(doc, dict):
        raise ScenarioError("scenario: expected a YAML mapping")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    grid = _load_map(_require(doc, "map", "scenario"), base_dir)
    config = _parse_config(doc.get("config", {}) or {}, "config")
    agents = [_parse_agent(b, i, config) for i, b in enumerate(doc.get("agents", []) or [])]
    obstacles = [_parse_obstacle(b, i) for i, b in enumerate(doc.get("obstacles", []) or [])]

    scenario = Scenario(
        name=str(doc.get("name", "unnamed")),
        grid=grid,
        agents=agents,
        obstacles=obstacles,
        config=config,
        horizon=int(doc.get("horizon", 200)),
        replan_interval=int(doc.get("replan_interval", 5)),
        ordering=str(doc.get("ordering", "sequential")),
        seed=int(doc.get("seed", 0)),
        schema_version=version,
    )
    _validate_scenario(scenario)
    return scenario


def _validate_scenario(scenario: Scenario) -> None:
    if scenario.horizon <= 0:
        raise ScenarioError(f"horizon: must be > 0, got {scenario.horizon}")
    if scenario.replan_interval < 1:
        raise ScenarioError(f"replan_interval: must be >= 1, got {scenario.replan_interval}")
    if scenario.ordering not in ("sequential", "concurrent"):
        raise ScenarioError(f"ordering: expected sequential or concurrent, got {scenario.ordering!r}")
    ids = [a.id for a in scenario.agents] + [o.id for o in scenario.obstacles]
    if len(set(ids)) != len(ids):
        raise ScenarioError("ids: agent and obstacle ids must be unique")
    for i, a in enumerate(scenario.agents):
        for label, cell in (("start", a.start), ("goal", a.goal)):
            if not scenario.grid.in_bounds(cell):
                raise ScenarioError(f"agents[{i}].{label}: {cell} out of bounds")
            if scenario.grid.is_occupied(cell):
                raise ScenarioError(f"agents[{i}].{label}: {cell} is occupied")


def load_scenario(path: str | Path) -> Scenario:
    """Load a scenario from a YAML file; relative map paths resolve next to it."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    return parse_scenario(path.read_text(), base_dir=path.parent)


def bundled_scenario_names() -> list[str]:
    """Names of the scenario fixtures shipped with the package."""
    pkg = resources.files("riskmapf") / "scenarios"
    return sorted(p.name.removesuffix(".yaml") for p in pkg.iterdir() if p.name.endswith(".yaml"))


def load_bundled_scenario(name: str) -> Scenario:
    """Load a bundled fixture by name (see bundled_scenario_names)."""
    pkg = resources.files("riskmapf") / "scenarios" / f"{name}.yaml"
    if not pkg.is_file():
        raise ScenarioError(f"no bundled scenario named {name!r}")
    return parse_scenario(pkg.read_text())
