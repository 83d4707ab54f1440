import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_force_proximity, random_map
from riskmapf.grid import CellState, load_ascii
from riskmapf.risk import (
    RiskConfig,
    _proximity_formula,
    build_static_field,
    field_to_pgm,
    occupancy_risk,
    proximity_risk,
)


class TestOccupancyRisk:
    def test_occupied_is_impassable(self):
        assert occupancy_risk(CellState.OCCUPIED, RiskConfig()) == math.inf

    def test_free_is_zero(self):
        assert occupancy_risk(CellState.FREE, RiskConfig()) == 0.0

    def test_unknown_penalty(self):
        assert occupancy_risk(CellState.UNKNOWN, RiskConfig()) == 50.0
        assert occupancy_risk(CellState.UNKNOWN, RiskConfig(unknown_risk=25.0)) == 25.0


class TestProximityRisk:
    def test_adjacent_cell_is_99(self):
        assert proximity_risk(1.0, RiskConfig(roi=98.0, roi_crit=0.0)) == pytest.approx(99.0, abs=1e-12)

    def test_formula_one_past_roi_is_one(self):
        # The raw gradient reaches exactly 1 one cell past the region edge.
        assert _proximity_formula(99.0, 98.0) == pytest.approx(1.0, abs=1e-12)

    def test_zero_beyond_roi(self):
        cfg = RiskConfig(roi=98.0, roi_crit=0.0)
        assert proximity_risk(98.5, cfg) == 0.0
        assert proximity_risk(1000.0, cfg) == 0.0

    def test_infinite_below_critical(self):
        assert proximity_risk(0.5, RiskConfig(roi=10.0, roi_crit=1.0)) == math.inf

    def test_clamped_to_open_range(self):
        # d < 1 drives the raw formula above 99; the result stays below 100.
        cfg = RiskConfig(roi=2.0, roi_crit=0.0)
        v = proximity_risk(0.01, cfg)
        assert 0.0 < v < 100.0

    @given(
        d1=st.floats(min_value=0.5, max_value=200.0),
        d2=st.floats(min_value=0.5, max_value=200.0),
        roi=st.floats(min_value=1.0, max_value=98.0),
    )
    def test_nonincreasing_in_distance(self, d1, d2, roi):
        cfg = RiskConfig(roi=roi, roi_crit=0.5)
        lo, hi = sorted((d1, d2))
        assert proximity_risk(lo, cfg) >= proximity_risk(hi, cfg)

    @given(d=st.floats(min_value=0.0, max_value=300.0), roi=st.floats(min_value=0.5, max_value=98.0))
    def test_finite_values_in_open_range(self, d, roi):
        v = proximity_risk(d, RiskConfig(roi=roi, roi_crit=0.25))
        if math.isfinite(v) and v != 0.0:
            assert 0.0 < v < 100.0


class TestBuildStaticField:
    def test_three_cell_strip(self):
        grid = load_ascii("#..")
        field = build_static_field(grid, RiskConfig(roi=2.0, roi_crit=0.0))
        assert field.proximity[0, 0] == math.inf
        assert field.proximity[0, 1] == pytest.approx(99.0)
        assert field.proximity[0, 2] == pytest.approx(50.0)  # 99 - (2-1)*(98/2)

    def test_all_free(self):
        grid = load_ascii("...\n...")
        field = build_static_field(grid, RiskConfig())
        assert np.all(field.proximity == 0.0)
        assert np.all(field.occupancy == 0.0)

    def test_all_occupied(self):
        grid = load_ascii("##\n##")
        field = build_static_field(grid, RiskConfig())
        assert np.all(field.proximity == math.inf)
        assert np.all(field.occupancy == math.inf)

    def test_unknown_layer(self):
        grid = load_ascii("?.")
        field = build_static_field(grid, RiskConfig())
        assert field.occupancy[0, 0] == 50.0
        assert field.occupancy[0, 1] == 0.0

    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(7)
        for _ in range(8):
            grid = random_map(rng, 17, 13, occupied_frac=0.2, unknown_frac=0.1)
            cfg = RiskConfig(roi=4.0, roi_crit=1.0)
            field = build_static_field(grid, cfg)
            expected = brute_force_proximity(grid, cfg)
            np.testing.assert_array_equal(field.proximity, expected)

    def test_gradient_nonincreasing_along_ray(self):
        grid = load_ascii("........\n....#...\n........")
        field = build_static_field(grid, RiskConfig(roi=6.0, roi_crit=0.0))
        row = field.proximity[1]
        right = [row[x] for x in range(5, 8)]
        assert right == sorted(right, reverse=True)

    def test_combined_adds_layers(self):
        grid = load_ascii("#?.")
        field = build_static_field(grid, RiskConfig(roi=3.0, roi_crit=0.0))
        assert field.combined[0, 0] == math.inf
        assert field.combined[0, 1] == pytest.approx(50.0 + 99.0)


class TestFieldExport:
    def test_pgm_shades(self):
        grid = load_ascii("#.........\n..........")
        field = build_static_field(grid, RiskConfig(roi=3.0, roi_crit=0.0))
        data = field_to_pgm(field)
        assert data.startswith(b"P5\n10 2\n255\n")
        raster = data[len(b"P5\n10 2\n255\n"):]
        assert raster[0] == 0  # occupied renders black
        assert raster[9] == 255  # far free cell renders white
        assert 0 < raster[1] < 255  # gradient in between
