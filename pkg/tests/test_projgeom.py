import math

import numpy as np
import pytest

from tools.discs import RationalDisc
from tools.errors import DimensionMismatchError, InvalidInputError, NotLiftableError
from tools.projgeom import (
    ProjectivePoint,
    SampledCompact,
    blp_constant,
    build_sphere_lift,
    circle_nodes,
    from_affine,
    fs_distance,
    lift_disc,
    polydisc_hull_radius,
    project,
    sample_resolution,
    sphere_distance,
)


def _random_vector(rng, size):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


class TestProject:
    def test_unit_vector_is_kept(self):
        assert np.allclose(project([1, 0, 0]).rep, [1, 0, 0])

    def test_scale_invariance(self):
        x, y = project([2, 0, 0]), project([1, 0, 0])
        assert fs_distance(x, y) == 0.0

    def test_complex_scaling(self):
        z = np.array([3j, 4, 0])
        assert fs_distance(project(z / 5), project(z)) < 1e-15

    def test_zero_vector_rejected(self):
        with pytest.raises(InvalidInputError):
            project([0, 0])

    def test_random_scale_invariance(self, rng):
        for _ in range(200):
            z = _random_vector(rng, 3)
            lam = complex(*rng.normal(size=2)) * 10 ** rng.uniform(-3, 3)
            assert fs_distance(project(z), project(lam * z)) < 1e-10

    def test_constructor_requires_unit_norm(self):
        with pytest.raises(InvalidInputError):
            ProjectivePoint(np.array([2.0, 0.0]))

    def test_representative_is_read_only(self):
        x = project([1, 1])
        with pytest.raises(ValueError):
            x.rep[0] = 0

    def test_affine_chart_round_trip(self):
        w = np.array([0.5 - 1j, 2.0])
        assert np.allclose(from_affine(w).to_affine(), w)

    def test_point_at_infinity_has_no_affine_coordinates(self):
        with pytest.raises(InvalidInputError):
            project([0, 1]).to_affine()


class TestDistances:
    def test_identity(self):
        x = project([1, 2j, 3])
        assert fs_distance(x, x) == 0.0

    def test_orthogonal_points(self):
        assert fs_distance(project([1, 0]), project([0, 1])) == pytest.approx(math.pi / 2)

    def test_quarter_turn(self):
        assert fs_distance(project([1, 0]), project([1, 1])) == pytest.approx(math.pi / 4, abs=1e-14)

    def test_symmetry(self, rng):
        x, y = project(_random_vector(rng, 3)), project(_random_vector(rng, 3))
        assert fs_distance(x, y) == pytest.approx(fs_distance(y, x), abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            fs_distance(project([1, 0]), project([1, 0, 0]))

    def test_projection_is_one_lipschitz_on_the_sphere(self, rng):
        for _ in range(10_000):
            u = _random_vector(rng, 3)
            v = _random_vector(rng, 3)
            u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
            assert fs_distance(project(u), project(v)) <= (1 + 1e-9) * sphere_distance(u, v)

    def test_nearby_points_keep_precision(self):
        x = project([1, 1e-9])
        assert fs_distance(x, project([1, 0])) == pytest.approx(1e-9, rel=1e-6)


class TestSampledCompact:
    def test_projective_samples_must_be_unit(self):
        with pytest.raises(InvalidInputError):
            SampledCompact(np.array([[1.0, 1.0]]), mode="projective")

    def test_circular_assertion_is_spot_checked(self):
        with pytest.raises(InvalidInputError):
            SampledCompact(np.array([[1.0], [2.0]]), mode="affine", circular=True)

    def test_circular_set_passes(self, unit_circle_compact):
        assert unit_circle_compact.circular

    def test_sample_points_are_at_distance_zero(self, circle_compact):
        d = circle_compact.nearest_distance(circle_compact.points[:10])
        assert np.all(d < 1e-12)
        assert circle_compact.contains(circle_compact.points[3], 1e-9)

    def test_affine_distance_is_euclidean(self, unit_circle_compact):
        assert unit_circle_compact.nearest_distance(np.array([[3.0]]))[0] == pytest.approx(2.0)

    def test_resolution_of_circle(self, unit_circle_compact):
        assert sample_resolution(unit_circle_compact) == pytest.approx(2 * math.sin(math.pi / 256))

    def test_homogeneous_points_of_affine_sample(self, unit_circle_compact):
        reps = unit_circle_compact.homogeneous_points()
        assert np.allclose(np.abs(reps), 1 / math.sqrt(2))


class TestSphereLift:
    def test_orbit_of_single_point(self):
        K = SampledCompact(np.array([[1.0, 0.0]]), mode="projective")
        lift = build_sphere_lift(K, 4)
        assert np.allclose(lift.points, [[1, 0], [1j, 0], [-1, 0], [-1j, 0]], atol=1e-15)

    def test_circle_lift_moduli(self, circle_compact):
        lift = build_sphere_lift(circle_compact, 8)
        assert np.allclose(np.abs(lift.points), 1 / math.sqrt(2))

    def test_projection_lands_on_samples(self, circle_compact):
        lift = build_sphere_lift(circle_compact, 5)
        assert np.all(circle_compact.nearest_distance(lift.points) < 1e-12)

    @pytest.mark.parametrize("m", [1, 2, 7, 64])
    def test_orbit_closure(self, circle_compact, m):
        assert build_sphere_lift(circle_compact, m).check_invariants()

    def test_orbit_count_must_be_positive(self, circle_compact):
        with pytest.raises(InvalidInputError):
            build_sphere_lift(circle_compact, 0)

    def test_polydisc_radius_of_circle(self, circle_compact):
        lift = build_sphere_lift(circle_compact, 16)
        assert polydisc_hull_radius(lift, project([1, 0])) == pytest.approx(1 / math.sqrt(2))


class TestLifting:
    def test_polynomial_vector_is_its_own_lift(self):
        F = lift_disc(RationalDisc([[1, 0], [0, 1]]))
        assert F.mode == "affine"
        assert np.allclose(F.evaluate(0.3j), [1, 0.3j])
        assert np.allclose(F.center(), [1, 0])

    def test_swapped_components(self):
        F = lift_disc(RationalDisc([[0, 1], [1, 0]]))
        assert np.allclose(F.evaluate(0.5), [0.5, 1])

    def test_common_zero_is_not_liftable(self):
        with pytest.raises(NotLiftableError):
            lift_disc(RationalDisc([[0, 1], [0, 1]], mode="affine"))
        with pytest.raises(NotLiftableError):
            RationalDisc([[0, 1], [0, 1]])

    def test_projection_of_lift_matches_disc(self):
        f = RationalDisc([[1, 0.2], [0.1j, 1]])
        F = lift_disc(f)
        for zeta in circle_nodes(16):
            assert fs_distance(project(F.evaluate(zeta)), f.point(zeta)) < 1e-12


class TestBoundedLifting:
    def test_line_disc(self):
        assert blp_constant([RationalDisc([[1, 0], [0, 1]], mode="affine")]) == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_constant_disc(self):
        assert blp_constant([RationalDisc([[1], [2j]], mode="affine")]) == pytest.approx(1.0)

    def test_half_line_disc(self):
        F = RationalDisc([[1, 0], [0, 0.5]], mode="affine")
        assert blp_constant([F]) == pytest.approx(math.sqrt(5) / 2, abs=1e-12)

    def test_supremum_over_family(self):
        discs = [RationalDisc([[1, 0], [0, 0.5]], mode="affine"), RationalDisc([[1, 0], [0, 1]], mode="affine")]
        assert blp_constant(discs) == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_empty_family(self):
        with pytest.raises(InvalidInputError):
            blp_constant([])
