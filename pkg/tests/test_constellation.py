"""Alphabet geometry, decision cells, and serialization."""

import math

import numpy as np
import pytest

from regen_capacity.constellation import (Constellation1D, Constellation2D,
                                          constellation_from_json,
                                          constellation_to_json,
                                          make_rectangular,
                                          make_rectangular_grid, make_ring,
                                          nearest_symbol, scale_to_power,
                                          voronoi_1d)


class TestRectangular:
    def test_zero_mean_and_spacing(self):
        c = make_rectangular(4, 2.0)
        assert np.allclose(c.points, [-3.0, -1.0, 1.0, 3.0])
        assert c.spacing == 2.0
        assert c.is_equidistant

    def test_uniform_power_closed_form(self):
        # mean power of a zero-mean lattice is d^2*(M^2-1)/12
        c = make_rectangular(4, 2.0)
        assert c.power() == pytest.approx(5.0)
        c8 = make_rectangular(8, 0.5)
        assert c8.power() == pytest.approx(0.25 * 63 / 12)

    def test_weighted_power(self):
        c = make_rectangular(2, 2.0)
        assert c.power(np.array([0.25, 0.75])) == pytest.approx(1.0)

    def test_grid_squares_the_axis(self):
        g = make_rectangular_grid(4, 2.0)
        assert len(g) == 16
        assert g.power() == pytest.approx(10.0)  # twice the per-axis power

    def test_validation(self):
        with pytest.raises(ValueError):
            make_rectangular(1, 1.0)
        with pytest.raises(ValueError):
            make_rectangular(4, 0.0)
        with pytest.raises(ValueError):
            Constellation1D(points=np.array([0.0, 0.0, 1.0]))
        with pytest.raises(ValueError):
            Constellation1D(points=np.array([0.0, 1.0]), spacing=0.5)


class TestRing:
    def test_min_distance(self):
        c = make_ring(16, 1.0)
        pts = c.points
        dmin = min(abs(pts[i] - pts[j]) for i in range(16) for j in range(i))
        assert dmin == pytest.approx(2 * math.sin(math.pi / 16), abs=1e-12)
        assert dmin == pytest.approx(0.3901806440322565, abs=1e-12)

    def test_power_is_radius_squared(self):
        assert make_ring(8, 3.0).power() == pytest.approx(9.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            make_ring(1, 1.0)
        with pytest.raises(ValueError):
            make_ring(8, -1.0)


class TestScaleToPower:
    def test_1d(self):
        c = make_rectangular(4, 2.0)
        p = np.full(4, 0.25)
        s = scale_to_power(c, p, 20.0)
        assert s.power(p) == pytest.approx(20.0)
        assert s.spacing == pytest.approx(4.0)

    def test_2d(self):
        c = make_ring(8, 1.0)
        s = scale_to_power(c, np.full(8, 0.125), 4.0)
        assert s.power() == pytest.approx(4.0)

    def test_invalid_target(self):
        with pytest.raises(ValueError):
            scale_to_power(make_ring(8, 1.0), np.full(8, 0.125), 0.0)


class TestVoronoi:
    def test_midpoint_boundaries(self):
        c = make_rectangular(4, 2.0)
        b = voronoi_1d(c).boundaries
        assert np.isneginf(b[0]) and np.isposinf(b[-1])
        assert np.allclose(b[1:-1], [-2.0, 0.0, 2.0])

    def test_nearest_symbol_consistent_with_cells(self):
        c = make_rectangular(5, 1.3)
        b = voronoi_1d(c).boundaries
        rng = np.random.default_rng(5)
        for z in rng.uniform(-5, 5, 200):
            k = nearest_symbol(c, z)
            assert b[k] <= z <= b[k + 1]

    def test_tie_goes_to_lower_index(self):
        c = make_rectangular(2, 2.0)
        assert nearest_symbol(c, 0.0) == 0

    def test_nearest_2d(self):
        c = make_ring(4, 1.0)  # points at angles 0, 90, 180, 270
        assert nearest_symbol(c, 0.9 + 0.1j) == 0
        assert nearest_symbol(c, (0.1, -2.0)) == 3


class TestJson:
    def test_roundtrip_1d(self):
        c = make_rectangular(4, 1.5)
        c2 = constellation_from_json(constellation_to_json(c))
        assert np.allclose(c2.points, c.points)
        assert c2.spacing == c.spacing

    def test_roundtrip_2d(self):
        for c in (make_ring(8, 2.0), make_rectangular_grid(3, 1.0)):
            c2 = constellation_from_json(constellation_to_json(c))
            assert np.allclose(c2.points, c.points)
            assert c2.kind == c.kind

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            constellation_from_json({"kind": "hexagonal", "points": []})

    def test_kind_validation(self):
        with pytest.raises(ValueError):
            Constellation2D(points=np.array([1 + 0j]), kind="weird")
