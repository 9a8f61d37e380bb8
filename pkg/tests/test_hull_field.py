import math

import numpy as np
import pytest

from engines.hull_field import (
    GROWING,
    IN_HULL,
    build_grid,
    classify_hull,
    growth_slope,
)
from tools.errors import InvalidInputError
from tools.fixtures import generate
from tools.io_tool import read_ppm
from tools.polyspace import SolverConfig


class TestGrid:
    def test_projective_grid_contains_origin_of_chart(self):
        grid = build_grid("-1:1:3", "projective", 1)
        assert len(grid) == 9
        assert grid.shape == (3, 3)
        assert np.allclose(grid.points[4], [1, 0])

    def test_affine_grid_layout(self):
        grid = build_grid("0:2:3", "affine", 2, axis=1, base=[0.5, 0])
        assert np.allclose(grid.points[1], [0.5, 1.0])
        assert np.allclose(grid.points[3], [0.5, 1j])

    @pytest.mark.parametrize("axis_range", ["1:0:3", "a:b:c", "0:1"])
    def test_invalid_axis(self, axis_range):
        with pytest.raises(InvalidInputError):
            build_grid(axis_range, "affine", 1)

    def test_axis_out_of_range(self):
        with pytest.raises(InvalidInputError):
            build_grid("0:1:2", "affine", 1, axis=1)


class TestGrowthSlope:
    def test_constant_best_constant_gives_its_log(self):
        degrees = list(range(1, 9))
        assert growth_slope(degrees, [math.log(2)] * 8) == pytest.approx(math.log(2))

    def test_bounded_products_have_zero_slope(self):
        degrees = np.arange(1, 9)
        assert growth_slope(degrees, 0.3 / degrees) == pytest.approx(0.0, abs=1e-12)

    def test_infinite_values(self):
        assert growth_slope([1, 2], [0.1, math.inf]) == math.inf

    def test_single_degree(self):
        assert growth_slope([1], [0.5]) == pytest.approx(0.5)


class TestClassifyProjective:
    def test_circle_center(self, circle_compact):
        field = classify_hull(circle_compact, build_grid("-1:1:3", "projective", 1), dmax=4)
        trace = field.traces[4]
        assert trace.cumulative[-1] == pytest.approx(math.sqrt(2), abs=1e-3)
        assert field.labels[4] == IN_HULL
        assert sum(field.counts().values()) == 9

    def test_sample_point_has_constant_one(self, circle_compact):
        field = classify_hull(circle_compact, [circle_compact.points[0]], dmax=3)
        assert field.traces[0].cumulative == [1.0, 1.0, 1.0]
        assert field.labels == [IN_HULL]

    def test_singleton_grows(self):
        K = generate("singleton").compact
        field = classify_hull(K, [np.array([0, 1.0])], dmax=3)
        assert field.labels == [GROWING]
        assert field.traces[0].radius == 0.0

    def test_thread_count_does_not_change_results(self, circle_compact):
        grid = build_grid("-1:1:2", "projective", 1)
        serial = classify_hull(circle_compact, grid, dmax=3, threads=1)
        threaded = classify_hull(circle_compact, grid, dmax=3, threads=3)
        assert serial.labels == threaded.labels
        for a, b in zip(serial.traces, threaded.traces):
            assert a.values == b.values

    def test_empty_grid(self, circle_compact):
        with pytest.raises(InvalidInputError):
            classify_hull(circle_compact, [])


class TestClassifyAffine:
    def test_torus_labels(self, torus2_compact):
        field = classify_hull(torus2_compact, [[0.5, 0.5], [2.0, 2.0]], dmax=4)
        assert field.labels == [IN_HULL, GROWING]
        assert field.finiteness == [True, True]
        assert field.final_values()[1] == pytest.approx(math.log(2), abs=1e-2)

    def test_cap_decides_finiteness(self, small_torus2_compact):
        field = classify_hull(small_torus2_compact, [[2.0, 0.0]], dmax=3, cap=0.1)
        assert field.finiteness == [False]
        assert field.labels == [GROWING]


class TestExport:
    def test_files(self, tmp_path, circle_compact):
        field = classify_hull(circle_compact, build_grid("-1:1:3", "projective", 1), dmax=2,
                              config=SolverConfig(cap=1.0))
        paths = field.export(str(tmp_path))
        assert [p.rsplit(".", 1)[1] for p in paths] == ["csv", "json", "ppm"]
        assert read_ppm(paths[2]).shape == (3, 3)
        lines = (tmp_path / "hull_field.csv").read_text().strip().splitlines()
        assert lines[0].startswith("index,z0_re,z0_im,z1_re,z1_im,d,C_d,cumulative,label")
        assert len(lines) == 1 + 9 * 2

    def test_summary_marks_lower_bounds(self, circle_compact):
        field = classify_hull(circle_compact, [[1, 0]], dmax=2)
        summary = field.summary()
        assert summary["lower_bounds"] is True
        assert summary["points"][0]["radius"] == pytest.approx(1 / field.traces[0].cumulative[-1])
