"""2D occupancy grids: loading, coordinate transforms, and neighbor queries.

Grids hold three-valued cells (free / occupied / unknown) in a row-major
numpy array. Cell indices are (x, y) tuples with x as the column; world
coordinates are meters with the map origin at the outer corner of cell
(0, 0). Maps are immutable after load and safe to share between planners.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

import numpy as np

Cell = tuple[int, int]
Point = tuple[float, float]

SQRT2 = math.sqrt(2.0)


class MapError(ValueError):
    """Malformed map input or out-of-contract grid query."""


class CellState(enum.IntEnum):
    FREE = 0
    OCCUPIED = 1
    UNKNOWN = 2


_ASCII_CHARS = {".": CellState.FREE, "#": CellState.OCCUPIED, "?": CellState.UNKNOWN}
_STATE_CHARS = {int(v): k for k, v in _ASCII_CHARS.items()}

_ORTHO_STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))
_DIAG_STEPS = ((1, 1), (-1, 1), (-1, -1), (1, -1))


@dataclass
class GridMap:
    """Occupancy grid with world anchoring.

    cells is a (height, width) uint8 array of CellState values; resolution
    is meters per cell; origin is the world position of the lower-left
    corner of cell (0, 0).
    """

    width: int
    height: int
    resolution: float
    origin: Point
    cells: np.ndarray
    _adjacency: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise MapError(f"grid dimensions must be positive, got {self.width}x{self.height}")
        if self.resolution <= 0:
            raise MapError(f"resolution must be > 0, got {self.resolution}")
        self.cells = np.asarray(self.cells, dtype=np.uint8).reshape(self.height, self.width)
        self.cells.setflags(write=False)

    def in_bounds(self, v: Cell) -> bool:
        x, y = v
        return 0 <= x < self.width and 0 <= y < self.height

    def state(self, v: Cell) -> CellState:
        return CellState(self.cells[v[1], v[0]])

    def is_occupied(self, v: Cell) -> bool:
        return self.cells[v[1], v[0]] == CellState.OCCUPIED

    def occupied_mask(self) -> np.ndarray:
        return self.cells == CellState.OCCUPIED

    def free_cells(self) -> list[Cell]:
        ys, xs = np.nonzero(self.cells != CellState.OCCUPIED)
        return [(int(x), int(y)) for x, y in zip(xs, ys)]

    def adjacency(self, connectivity: int) -> list[list[tuple[int, int, float]]]:
        """Per-cell neighbor table (nx, ny, step_length), cached per connectivity."""
        table = self._adjacency.get(connectivity)
        if table is None:
            table = [
                [(n[0], n[1], s) for n, s in neighbors(self, (x, y), connectivity)]
                if self.cells[y, x] != CellState.OCCUPIED else []
                for y in range(self.height)
                for x in range(self.width)
            ]
            self._adjacency[connectivity] = table
        return table


def neighbors(grid: GridMap, v: Cell, connectivity: int = 8) -> list[tuple[Cell, float]]:
    """Traversable neighbors of v with their step lengths in cells.

    Occupied targets are excluded. Diagonal steps are excluded when either
    orthogonally adjacent cell shared with the diagonal is occupied, so
    paths never cut corners.
    """
    if connectivity not in (4, 8):
        raise MapError(f"connectivity must be 4 or 8, got {connectivity}")
    if not grid.in_bounds(v):
        raise MapError(f"neighbor query out of bounds: {v}")
    x, y = v
    cells = grid.cells
    occ = int(CellState.OCCUPIED)
    out: list[tuple[Cell, float]] = []
    for dx, dy in _ORTHO_STEPS:
        nx, ny = x + dx, y + dy
        if 0 <= nx < grid.width and 0 <= ny < grid.height and cells[ny, nx] != occ:
            out.append(((nx, ny), 1.0))
    if connectivity == 8:
        for dx, dy in _DIAG_STEPS:
            nx, ny = x + dx, y + dy
            if not (0 <= nx < grid.width and 0 <= ny < grid.height):
                continue
            if cells[ny, nx] == occ:
                continue
            if cells[y, nx] == occ or cells[ny, x] == occ:
                continue
            out.append(((nx, ny), SQRT2))
    return out


def world_to_grid(grid: GridMap, p: Point) -> Cell:
    """Map a world point to the cell containing it; errors outside the map extents."""
    px, py = p
    ox, oy = grid.origin
    w_extent = grid.width * grid.resolution
    h_extent = grid.height * grid.resolution
    if not (ox <= px <= ox + w_extent):
        raise MapError(f"world x={px} outside map extent [{ox}, {ox + w_extent}]")
    if not (oy <= py <= oy + h_extent):
        raise MapError(f"world y={py} outside map extent [{oy}, {oy + h_extent}]")
    gx = min(int((px - ox) / grid.resolution), grid.width - 1)
    gy = min(int((py - oy) / grid.resolution), grid.height - 1)
    return (gx, gy)


def grid_to_world(grid: GridMap, v: Cell) -> Point:
    """World coordinates of the center of cell v."""
    ox, oy = grid.origin
    return (ox + (v[0] + 0.5) * grid.resolution, oy + (v[1] + 0.5) * grid.resolution)


def load_ascii(text: str) -> GridMap:
    """Parse the ASCII fixture format: '.' free, '#' occupied, '?' unknown.

    An optional first line "resolution <r>" sets meters per cell (default 1.0).
    """
    lines = text.splitlines()
    resolution = 1.0
    start = 0
    if lines and lines[0].startswith("resolution"):
        m = re.fullmatch(r"resolution\s+([0-9.eE+-]+)", lines[0].strip())
        if m is None:
            raise MapError(f"bad resolution header: {lines[0]!r}")
        resolution = float(m.group(1))
        start = 1
    rows = [ln for ln in lines[start:] if ln != ""]
    if not rows:
        raise MapError("empty grid")
    width = len(rows[0])
    cells = np.zeros((len(rows), width), dtype=np.uint8)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MapError(f"ragged row at line {start + i + 1}")
        for j, ch in enumerate(row):
            state = _ASCII_CHARS.get(ch)
            if state is None:
                raise MapError(f"unknown character {ch!r} at line {start + i + 1}, column {j + 1}")
            cells[i, j] = state
    return GridMap(width=width, height=len(rows), resolution=resolution, origin=(0.0, 0.0), cells=cells)


def to_ascii(grid: GridMap, include_resolution: bool = False) -> str:
    """Serialize back to the ASCII fixture format (inverse of load_ascii)."""
    rows = ["".join(_STATE_CHARS[int(c)] for c in grid.cells[y]) for y in range(grid.height)]
    header = [f"resolution {grid.resolution}"] if include_resolution else []
    return "\n".join(header + rows) + "\n"


def _pgm_tokens(data: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping # comments."""
    tokens: list[bytes] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos] != 0x0A:
                pos += 1
            continue
        if pos >= n:
            raise MapError("malformed PGM header: unexpected end of data")
        tok_start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[tok_start:pos])
    return tokens, pos


def _parse_pgm(data: bytes) -> tuple[int, int, int, np.ndarray]:
    if len(data) < 2:
        raise MapError("malformed PGM header: too short")
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise MapError(f"malformed PGM header: bad magic {magic!r}")
    tokens, pos = _pgm_tokens(data, 3, 2)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MapError(f"malformed PGM header: non-numeric field in {tokens}") from None
    if width <= 0 or height <= 0:
        raise MapError(f"malformed PGM header: bad dimensions {width}x{height}")
    if not (0 < maxval < 256):
        raise MapError(f"unsupported PGM maxval {maxval}")
    expected = width * height
    if magic == b"P5":
        raster = data[pos + 1 : pos + 1 + expected]
        if len(raster) != expected:
            raise MapError(f"pixel count mismatch: expected {expected}, got {len(raster)}")
        pixels = np.frombuffer(raster, dtype=np.uint8)
    else:
        values = data[pos:].split()
        if len(values) != expected:
            raise MapError(f"pixel count mismatch: expected {expected}, got {len(values)}")
        try:
            pixels = np.array([int(v) for v in values], dtype=np.int64)
        except ValueError:
            raise MapError("malformed P2 raster: non-numeric pixel") from None
    if pixels.size and int(pixels.max()) > maxval:
        raise MapError(f"pixel value exceeds maxval {maxval}")
    return width, height, maxval, pixels.reshape(height, width)


def load_pgm_yaml(pgm_bytes: bytes, yaml_meta: str) -> GridMap:
    """Load a PGM occupancy image with its YAML metadata sidecar.

    Pixels are converted to occupancy probability p = (maxval - v) / maxval
    (inverted when negate is set) and thresholded: p >= occupied_thresh is
    occupied, p <= free_thresh is free, anything between is unknown.
    """
    import yaml

    meta = yaml.safe_load(yaml_meta)
    if not isinstance(meta, dict):
        raise MapError("metadata is not a mapping")
    for key in ("resolution", "origin"):
        if key not in meta:
            raise MapError(f"missing metadata key: {key}")
    resolution = float(meta["resolution"])
    origin_raw = meta["origin"]
    if not isinstance(origin_raw, (list, tuple)) or len(origin_raw) < 2:
        raise MapError(f"bad metadata origin: {origin_raw!r}")
    origin = (float(origin_raw[0]), float(origin_raw[1]))
    occupied_thresh = float(meta.get("occupied_thresh", 0.65))
    free_thresh = float(meta.get("free_thresh", 0.196))
    negate = int(meta.get("negate", 0))

    width, height, maxval, pixels = _parse_pgm(pgm_bytes)
    p = pixels.astype(np.float64) / maxval if negate else (maxval - pixels.astype(np.float64)) / maxval
    cells = np.full((height, width), CellState.UNKNOWN, dtype=np.uint8)
    cells[p >= occupied_thresh] = CellState.OCCUPIED
    cells[p <= free_thresh] = CellState.FREE
    return GridMap(width=width, height=height, resolution=resolution, origin=origin, cells=cells)
