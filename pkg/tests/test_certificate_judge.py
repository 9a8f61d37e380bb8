import math

import numpy as np
import pytest

from engines.hull_field import IN_HULL, classify_hull
from judge.certificate_judge import render_verdicts, verify_psequence
from tools.discs import RationalDisc, escaping_line_disc
from tools.errors import InvalidInputError
from tools.polyspace import best_constant
from tools.projgeom import project


def _torus_discs(count):
    discs = []
    for j in range(1, count + 1):
        coeffs = np.zeros((2, j + 1), dtype=complex)
        coeffs[0, j] = 1.0
        coeffs[1, 1] = 1.0
        discs.append(RationalDisc(coeffs, mode="affine"))
    return discs


class TestTorusCertificate:
    def test_all_conditions_pass(self, torus2_compact):
        discs = _torus_discs(4)
        report = verify_psequence(discs, torus2_compact, [0, 0], [1 / j for j in range(1, 5)])
        assert report.failures() == []
        assert report.measures == [2 * math.pi] * 4
        assert report.blp_sup == pytest.approx(math.sqrt(3))
        assert len(report.verdicts_for("center")) == 4
        assert len(report.verdicts_for("bounded_lifting")) == 1

    def test_constant_discs_fail_the_measure(self, torus2_compact):
        discs = [RationalDisc([[3], [3]], mode="affine") for _ in range(2)]
        report = verify_psequence(discs, torus2_compact, [3, 3], [0.5, 0.25])
        assert all(v.passed for v in report.verdicts_for("center"))
        assert not any(v.passed for v in report.verdicts_for("measure"))
        assert report.measures == [0.0, 0.0]

    def test_wrong_center_is_reported_per_disc(self, torus2_compact):
        discs = _torus_discs(2)
        discs[1] = RationalDisc([[0.1, 0, 1], [0, 1, 0]], mode="affine")
        report = verify_psequence(discs, torus2_compact, [0, 0], [0.5, 0.25])
        centers = report.verdicts_for("center")
        assert [v.passed for v in centers] == [True, False]
        assert centers[1].value == pytest.approx(0.1)
        assert len(report.verdicts_for("measure")) == 2

    def test_j_values_against_hyperplane(self, torus2_compact):
        report = verify_psequence(_torus_discs(2), torus2_compact, [0, 0], [0.5, 0.25], hyperplane=[1, 0, 0])
        assert report.j_values == [0.0, 0.0]


class TestCircleCertificate:
    def test_lifting_constant(self, circle_compact):
        discs = [RationalDisc([[1, 0], [0, 1]]) for _ in range(3)]
        x = project([1, 0])
        report = verify_psequence(discs, circle_compact, x, [0.5, 0.25, 0.125])
        assert report.failures() == []
        assert report.blp_sup == pytest.approx(math.sqrt(2), abs=1e-6)
        trace = best_constant(circle_compact, x, 8)
        assert report.blp_sup == pytest.approx(1 / trace.radius, abs=1e-3)

    def test_certified_point_is_in_hull(self, circle_compact):
        field = classify_hull(circle_compact, [[1, 0]], dmax=4)
        assert field.labels == [IN_HULL]

    def test_unbounded_lifting_fails(self, circle_compact):
        x, p = project([1, 0]), project(circle_compact.points[0])
        discs = [escaping_line_disc(x, p, delta) for delta in (1e-3, 1e-6, 1e-8)]
        report = verify_psequence(discs, circle_compact, x, [0.5, 0.25, 0.125])
        (verdict,) = report.verdicts_for("bounded_lifting")
        assert not verdict.passed
        assert verdict.value > 1e6


class TestValidation:
    def test_schedule_length(self, circle_compact):
        with pytest.raises(InvalidInputError):
            verify_psequence([RationalDisc([[1, 0], [0, 1]])], circle_compact, [1, 0], [0.5, 0.25])

    def test_schedule_must_decrease(self, circle_compact):
        discs = [RationalDisc([[1, 0], [0, 1]])] * 2
        with pytest.raises(InvalidInputError):
            verify_psequence(discs, circle_compact, [1, 0], [0.25, 0.5])

    def test_render_names_thresholds(self, circle_compact):
        report = verify_psequence([RationalDisc([[1, 0], [0, 1]])], circle_compact, [1, 0], [0.5])
        lines = render_verdicts(report)
        assert len(lines) == len(report.verdicts)
        assert lines[0].startswith("disc 0: center PASS")
        assert any("bounded_lifting" in line and "1000000" in line for line in lines)
