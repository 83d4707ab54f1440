"""Static risk layers over an occupancy grid.

Two per-cell layers are precomputed: an occupancy cost (infinite on
occupied cells, a fixed penalty on unknown ones) and a wall-proximity cost
that decays linearly with the distance to the nearest occupied cell inside
a region of interest. Distances are measured in cells so the layers are
resolution independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .grid import CellState, GridMap

_EPS = 1e-6

PROXIMITY_MAX = 99.0
PROXIMITY_SLOPE = 98.0


@dataclass(frozen=True)
class RiskConfig:
    """Parameters shared by the static and dynamic risk layers.

    roi and roi_crit are in cells for the static proximity layer and in
    meters for dynamic obstacle clearance (fixtures use 1 m cells, where
    the two coincide). cone_angle widens a moving obstacle's region of
    interest with prediction depth.
    """

    roi: float = 10.0
    roi_crit: float = 1.0
    unknown_risk: float = 50.0
    cone_angle: float = 0.44
    lambda_step: float = 0.1

    def __post_init__(self):
        if self.roi <= 0:
            raise ValueError(f"roi must be > 0, got {self.roi}")
        if not (0 <= self.roi_crit < self.roi):
            raise ValueError(f"roi_crit must be in [0, roi), got {self.roi_crit}")
        if self.unknown_risk <= 0:
            raise ValueError(f"unknown_risk must be > 0, got {self.unknown_risk}")
        if self.lambda_step <= 0:
            raise ValueError(f"lambda_step must be > 0, got {self.lambda_step}")


def occupancy_risk(state: CellState, config: RiskConfig) -> float:
    """Occupancy cost of a cell: impassable, free, or a fixed unknown penalty."""
    if state == CellState.OCCUPIED:
        return math.inf
    if state == CellState.UNKNOWN:
        return config.unknown_risk
    return 0.0


def _proximity_formula(d: float, roi: float) -> float:
    # 99 at one cell from a wall, dropping by 98/roi per cell.
    return PROXIMITY_MAX - (d - 1.0) * (PROXIMITY_SLOPE / roi)


def proximity_risk(d: float, config: RiskConfig) -> float:
    """Wall-proximity cost at distance d cells from the nearest occupied cell.

    Infinite below roi_crit, zero beyond roi, otherwise a linear gradient
    clamped to the open interval (0, 100).
    """
    if d < config.roi_crit:
        return math.inf
    if d > config.roi:
        return 0.0
    r = _proximity_formula(d, config.roi)
    return min(max(r, _EPS), 100.0 - _EPS)


@dataclass
class StaticRiskField:
    """Precomputed occupancy and proximity layers for one grid."""

    grid: GridMap
    config: RiskConfig
    occupancy: np.ndarray
    proximity: np.ndarray
    combined: np.ndarray = field(init=False)

    def __post_init__(self):
        self.combined = self.occupancy + self.proximity
        for arr in (self.occupancy, self.proximity, self.combined):
            arr.setflags(write=False)

    def occupancy_at(self, v) -> float:
        return float(self.occupancy[v[1], v[0]])

    def proximity_at(self, v) -> float:
        return float(self.proximity[v[1], v[0]])

    def combined_at(self, v) -> float:
        return float(self.combined[v[1], v[0]])


def nearest_occupied_distances(grid: GridMap) -> np.ndarray:
    """Exact Euclidean distance (cells) from every cell to the nearest occupied cell.

    Uses an exact distance transform; squared distances are integers, so
    the result is bit-identical to a brute-force nearest-occupied scan.
    """
    occ = grid.occupied_mask()
    if not occ.any():
        return np.full(occ.shape, np.inf)
    iy, ix = ndimage.distance_transform_edt(~occ, return_distances=False, return_indices=True)
    ys, xs = np.indices(occ.shape)
    d2 = (iy.astype(np.int64) - ys) ** 2 + (ix.astype(np.int64) - xs) ** 2
    return np.sqrt(d2.astype(np.float64))


def build_static_field(grid: GridMap, config: RiskConfig) -> StaticRiskField:
    """Precompute both static layers for the whole grid."""
    cells = grid.cells
    occ = cells == CellState.OCCUPIED

    occupancy = np.zeros(cells.shape, dtype=np.float64)
    occupancy[cells == CellState.UNKNOWN] = config.unknown_risk
    occupancy[occ] = np.inf

    d = nearest_occupied_distances(grid)
    proximity = np.where(
        d > config.roi,
        0.0,
        np.clip(_proximity_formula(d, config.roi), _EPS, 100.0 - _EPS),
    )
    proximity[d < config.roi_crit] = np.inf
    proximity[occ] = np.inf
    return StaticRiskField(grid=grid, config=config, occupancy=occupancy, proximity=proximity)


def field_to_pgm(field: StaticRiskField) -> bytes:
    """Render the combined static field as a binary PGM for inspection.

    Infinite risk maps to black, zero to white, finite values linearly in
    between over [0, 100].
    """
    v = np.clip(field.combined, 0.0, 100.0)
    gray = np.rint(255.0 * (1.0 - v / 100.0)).astype(np.uint8)
    gray[~np.isfinite(field.combined)] = 0
    header = f"P5\n{field.grid.width} {field.grid.height}\n255\n".encode()
    return header + gray.tobytes()
