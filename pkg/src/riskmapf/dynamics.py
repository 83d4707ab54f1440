"""Dynamic obstacles: pose prediction, clearance queries, and timed risk.

Obstacles are ellipses (circles when the axes match) in world coordinates.
An obstacle either extrapolates under constant velocity or follows a shared
timed path, one world pose per timestep; past the end of a shared path it
rests at the final pose. Risk at a future timestep decays with clearance
over a region of interest that widens with the obstacle's speed and the
prediction depth, modeling growing uncertainty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .grid import Point
from .risk import PROXIMITY_SLOPE, RiskConfig


@dataclass(frozen=True)
class DynamicObstacle:
    """An elliptical moving obstacle, possibly carrying a shared timed path.

    major/minor are semi-axes in meters; theta orients the major axis.
    shared_path, when present, is one (x, y) world pose per timestep
    starting at the obstacle's current position.
    """

    id: str
    x: float
    y: float
    major: float
    minor: float
    theta: float = 0.0
    velocity: tuple[float, float] = (0.0, 0.0)
    shared_path: tuple[Point, ...] | None = None

    def __post_init__(self):
        if not (self.major >= self.minor > 0):
            raise ValueError(f"require major >= minor > 0, got {self.major}, {self.minor}")
        if self.shared_path is not None:
            if len(self.shared_path) == 0:
                raise ValueError("shared_path must not be empty")
            object.__setattr__(self, "shared_path", tuple((float(px), float(py)) for px, py in self.shared_path))

    @property
    def speed(self) -> float:
        return math.hypot(self.velocity[0], self.velocity[1])

    @property
    def is_circle(self) -> bool:
        return self.major == self.minor

    def speed_at(self, n: int) -> float:
        """Speed used for uncertainty widening at timestep n; a shared path
        that has ended contributes no further motion uncertainty."""
        if self.shared_path is not None and n >= len(self.shared_path) - 1:
            return 0.0
        return self.speed


class ObstacleSet(tuple):
    """Ordered collection of obstacles with unique ids."""

    def __new__(cls, obstacles=()):
        obs = tuple(obstacles)
        ids = [o.id for o in obs]
        if len(set(ids)) != len(ids):
            raise ValueError("obstacle ids must be unique")
        return super().__new__(cls, obs)


@dataclass(frozen=True)
class PredictedPose:
    x: float
    y: float
    theta: float
    n: int


def predict_pose(obstacle: DynamicObstacle, n: int, dt: float) -> PredictedPose:
    """Pose of the obstacle n timesteps ahead.

    Shared paths are indexed directly and clamp to their final pose;
    otherwise the pose extrapolates under constant velocity.
    """
    if n < 0:
        raise ValueError(f"timestep must be >= 0, got {n}")
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if obstacle.shared_path is not None:
        px, py = obstacle.shared_path[min(n, len(obstacle.shared_path) - 1)]
        return PredictedPose(px, py, obstacle.theta, n)
    vx, vy = obstacle.velocity
    return PredictedPose(obstacle.x + vx * n * dt, obstacle.y + vy * n * dt, obstacle.theta, n)


def circle_clearance(obstacle: DynamicObstacle, p: Point, pose: PredictedPose | None = None) -> float:
    """Signed distance from p to the edge of a circular obstacle (negative inside)."""
    if not obstacle.is_circle:
        raise ValueError("circle_clearance requires major == minor")
    cx, cy = (pose.x, pose.y) if pose is not None else (obstacle.x, obstacle.y)
    return math.hypot(cx - p[0], cy - p[1]) - obstacle.major


def ellipse_contains(
    obstacle: DynamicObstacle,
    p: Point,
    pose: PredictedPose | None = None,
    inflate: float = 0.0,
) -> bool:
    """Whether p lies inside or on the (optionally inflated) rotated ellipse."""
    if pose is not None:
        cx, cy, th = pose.x, pose.y, pose.theta
    else:
        cx, cy, th = obstacle.x, obstacle.y, obstacle.theta
    dx, dy = p[0] - cx, p[1] - cy
    c, s = math.cos(th), math.sin(th)
    lx = dx * c + dy * s
    ly = -dx * s + dy * c
    a = obstacle.major + inflate
    b = obstacle.minor + inflate
    return (lx / a) ** 2 + (ly / b) ** 2 <= 1.0


def ellipse_clearance(
    obstacle: DynamicObstacle,
    p: Point,
    roi: float,
    lambda_step: float = 0.1,
    pose: PredictedPose | None = None,
) -> float:
    """Distance to an ellipse as the smallest uniform inflation that reaches p.

    Trial inflations grow in lambda_step increments from the base axes; if
    no inflation within roi contains p the clearance saturates at roi
    (beyond the region of interest, risk is zero anyway).
    """
    if lambda_step <= 0:
        raise ValueError(f"lambda_step must be > 0, got {lambda_step}")
    k = 0
    lam = 0.0
    while lam <= roi + 1e-12:
        if ellipse_contains(obstacle, p, pose=pose, inflate=lam):
            return lam
        k += 1
        lam = k * lambda_step
    return roi


def _min_clearance(
    obstacles, p: Point, n: int, dt: float, config: RiskConfig
) -> tuple[float, float]:
    """Smallest predicted clearance over the set and the matching obstacle speed."""
    best_d = math.inf
    best_speed = 0.0
    for ob in obstacles:
        pose = predict_pose(ob, n, dt)
        if ob.is_circle:
            d = circle_clearance(ob, p, pose=pose)
        else:
            d = ellipse_clearance(ob, p, config.roi, config.lambda_step, pose=pose)
        if d < best_d:
            best_d = d
            best_speed = ob.speed_at(n)
    return best_d, best_speed


def dynamic_risk(obstacles, p: Point, n: int, dt: float, config: RiskConfig) -> float:
    """Risk contributed by dynamic obstacles at world point p, timestep n.

    The nearest obstacle's clearance d drives the cost: infinite inside the
    critical band, zero beyond the widened region of interest, otherwise
    99 - 98 d / (roi + speed * tan(cone_angle) * n * dt).
    """
    if not obstacles:
        return 0.0
    d, speed = _min_clearance(obstacles, p, n, dt, config)
    if d < config.roi_crit:
        return math.inf
    widened = config.roi + speed * math.tan(config.cone_angle) * n * dt
    if d > widened:
        return 0.0
    return 99.0 - PROXIMITY_SLOPE * d / widened


def risk_evaluator(obstacles, dt: float, config: RiskConfig):
    """Precompiled equivalent of dynamic_risk for a fixed obstacle snapshot.

    Planners call the risk function once per generated search state, so the
    per-call obstacle bookkeeping is hoisted out here. The returned closure
    computes exactly dynamic_risk(obstacles, (px, py), n, dt, config).
    """
    obstacles = tuple(obstacles)
    if not obstacles:
        return lambda px, py, n: 0.0
    tan_cone = math.tan(config.cone_angle)
    roi = config.roi
    crit = config.roi_crit
    lam_step = config.lambda_step
    inf = math.inf
    hypot = math.hypot

    table = []
    for ob in obstacles:
        if ob.shared_path is not None:
            poses = ob.shared_path
            last = len(poses) - 1
        else:
            poses, last = None, 0
        table.append(
            (ob, ob.is_circle, poses, last, ob.x, ob.y, ob.velocity[0] * dt, ob.velocity[1] * dt, ob.major, ob.speed)
        )

    def evaluate(px: float, py: float, n: int) -> float:
        best_d = inf
        best_speed = 0.0
        for ob, is_circle, poses, last, x0, y0, vxdt, vydt, major, speed in table:
            if poses is not None:
                cx, cy = poses[n] if n < last else poses[last]
                sp = speed if n < last else 0.0
            else:
                cx, cy = x0 + vxdt * n, y0 + vydt * n
                sp = speed
            if is_circle:
                d = hypot(cx - px, cy - py) - major
            else:
                pose = PredictedPose(cx, cy, ob.theta, n)
                d = ellipse_clearance(ob, (px, py), roi, lam_step, pose=pose)
            if d < best_d:
                best_d = d
                best_speed = sp
        if best_d < crit:
            return inf
        widened = roi + best_speed * tan_cone * n * dt
        if best_d > widened:
            return 0.0
        return 99.0 - PROXIMITY_SLOPE * best_d / widened

    return evaluate
