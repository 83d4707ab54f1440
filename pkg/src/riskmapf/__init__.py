"""Risk-aware multi-agent grid path planning toolkit."""

from .baselines import (
    BudgetExceededError,
    Constraint,
    MAPFError,
    NoSolutionError,
    SafeInterval,
    SearchStats,
    build_safe_intervals,
    cbs_plan,
    ecbs_plan,
    focal_space_time_astar,
    inflate,
    prioritized_sipp,
    sipp_plan,
    space_time_astar,
)
from .conflicts import Conflict, detect_first_conflict, validate
from .coordination import (
    AgentSpec,
    PathBlackboard,
    SimState,
    SimulationSetupError,
    paths_to_obstacles,
    run_simulation,
)
from .dynamics import (
    DynamicObstacle,
    ObstacleSet,
    PredictedPose,
    circle_clearance,
    dynamic_risk,
    ellipse_clearance,
    ellipse_contains,
    predict_pose,
)
from .grid import (
    CellState,
    GridMap,
    MapError,
    grid_to_world,
    load_ascii,
    load_pgm_yaml,
    neighbors,
    to_ascii,
    world_to_grid,
)
from .planner import (
    InvalidEndpointError,
    NoPathError,
    PlannerConfig,
    PlanningError,
    SearchNode,
    TimedPath,
    WatchdogTimeoutError,
    edge_cost,
    heuristic,
    plan,
    replan_from,
)
from .report import AgentReport, SimReport
from .risk import RiskConfig, StaticRiskField, build_static_field, field_to_pgm, occupancy_risk, proximity_risk
from .scenario import Scenario, ScenarioError, load_bundled_scenario, load_scenario, parse_scenario

__version__ = "0.1.0"
