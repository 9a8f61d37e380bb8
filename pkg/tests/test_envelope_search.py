import math

import numpy as np
import pytest

from engines.envelope_search import (
    SearchConfig,
    cancel_sequence,
    disc_points,
    disc_search_envelope,
    envelope_sequence,
    pole_parameters,
)
from tools.discs import BOUNDARY_MARGIN, RationalDisc, boundary_distances, j_functional
from tools.errors import DimensionMismatchError, InvalidInputError
from tools.fixtures import generate
from tools.polyspace import affine_extremal

FAST = SearchConfig(restarts=3, iterations=800)


@pytest.fixture(scope="module")
def annulus_result(annulus_compact):
    return disc_search_envelope(annulus_compact, [6.0], FAST, margin=0.1)


class TestParameters:
    def test_disc_points_stay_inside(self, rng):
        u = 10 * (rng.normal(size=50) + 1j * rng.normal(size=50))
        assert np.all(np.abs(disc_points(u)) < 1)

    def test_large_parameters_keep_poles_off_the_circle(self):
        a = disc_points(np.array([20.0, 40j, -1e3 + 1e3j]))
        assert np.all(np.abs(a) <= 1 - BOUNDARY_MARGIN)
        f = RationalDisc([np.polynomial.polynomial.polyfromroots(a), [1, 0, 0, 0]])
        assert math.isfinite(j_functional(f, [1, 0]))

    def test_round_trip(self):
        a = np.array([0.3, -0.5j, 0.0])
        assert np.allclose(disc_points(pole_parameters(a)), a)


class TestEnvelopeSearch:
    def test_annulus_attains_mobius_bound(self, annulus_result):
        assert annulus_result.feasible
        assert annulus_result.boundary_distance < 0.1
        assert annulus_result.j_value <= math.log(3) + 0.05
        assert annulus_result.j_value >= math.log(6 / 2.6) - 0.05

    def test_reported_values_are_reevaluated(self, annulus_result, annulus_compact):
        assert j_functional(annulus_result.disc, [1, 0]) == pytest.approx(annulus_result.j_value, abs=1e-9)
        distance = boundary_distances(annulus_result.disc, annulus_compact, 1024).max()
        assert distance == pytest.approx(annulus_result.boundary_distance, abs=1e-12)
        assert np.allclose(annulus_result.disc.point(0.0).to_affine(), [6.0])

    def test_sandwich_with_extremal_function(self, annulus_result, annulus_compact):
        v = affine_extremal(annulus_compact, [6.0], 6).v_values[-1]
        assert v - 0.05 <= annulus_result.j_value

    def test_hyperplane_at_infinity_is_accepted(self, annulus_compact):
        result = disc_search_envelope(annulus_compact, [2.0], FAST, hyperplane=[2, 0])
        assert result.j_value == 0.0

    @pytest.mark.parametrize("hyperplane", [[0, 1], [1, 0.5]])
    def test_other_hyperplanes_are_rejected(self, annulus_compact, hyperplane):
        with pytest.raises(InvalidInputError):
            disc_search_envelope(annulus_compact, [6.0], FAST, hyperplane=hyperplane)

    def test_hyperplane_length(self, annulus_compact):
        with pytest.raises(DimensionMismatchError):
            disc_search_envelope(annulus_compact, [6.0], FAST, hyperplane=[1, 0, 0])

    def test_center_in_neighbourhood(self, annulus_compact):
        result = disc_search_envelope(annulus_compact, [2.0], FAST)
        assert result.j_value == 0.0
        assert result.iterations == 0
        assert result.feasible

    def test_circle_neighbourhood_from_origin(self, unit_circle_compact):
        result = disc_search_envelope(unit_circle_compact, [0.0], SearchConfig(restarts=4, iterations=800))
        assert result.feasible
        assert result.j_value < 0.05

    def test_deterministic_for_fixed_seed(self, annulus_compact):
        config = SearchConfig(restarts=2, iterations=300, seed=11)
        first = disc_search_envelope(annulus_compact, [4.0 + 1j], config)
        second = disc_search_envelope(annulus_compact, [4.0 + 1j], config)
        assert np.array_equal(first.disc.coeffs, second.disc.coeffs)
        assert first.j_value == second.j_value

    def test_infeasible_is_flagged(self, unit_circle_compact):
        result = disc_search_envelope(unit_circle_compact, [10.0], SearchConfig(restarts=2, degree=0))
        assert result.flags == ["infeasible"]
        assert not result.feasible
        assert result.boundary_distance == pytest.approx(9.0, abs=1e-9)

    def test_needs_affine_sample(self, circle_compact):
        with pytest.raises(InvalidInputError):
            disc_search_envelope(circle_compact, [1.0, 0.0], FAST)

    def test_center_dimension(self, annulus_compact):
        with pytest.raises(DimensionMismatchError):
            disc_search_envelope(annulus_compact, [1.0, 2.0], FAST)

    def test_margin_must_be_positive(self, annulus_compact):
        with pytest.raises(InvalidInputError):
            disc_search_envelope(annulus_compact, [6.0], FAST, margin=0.0)


def _blaschke_quotient(rng, modulus):
    """f = c B1/B2 with |c| = modulus, so f maps the circle onto the circle of that radius."""
    zeros = 0.9 * np.sqrt(rng.uniform(size=int(rng.integers(0, 3))))
    zeros = zeros * np.exp(2j * np.pi * rng.uniform(size=zeros.size))
    poles = rng.uniform(0.3, 0.95, size=int(rng.integers(1, 3)))
    poles = poles * np.exp(2j * np.pi * rng.uniform(size=poles.size))
    q = np.polynomial.polynomial.polyfromroots(poles)
    P = modulus * np.exp(2j * np.pi * rng.uniform()) * np.ones(1, dtype=complex)
    for a in zeros:
        q = np.polynomial.polynomial.polymul(q, [1.0, -np.conj(a)])
        P = np.polynomial.polynomial.polymul(P, [-a, 1.0])
    for b in poles:
        P = np.polynomial.polynomial.polymul(P, [1.0, -np.conj(b)])
    coeffs = np.zeros((2, max(q.size, P.size)), dtype=complex)
    coeffs[0, :q.size], coeffs[1, :P.size] = q, P
    return RationalDisc(coeffs), poles


class TestEnvelopeInequality:
    def test_random_blaschke_quotients_on_circle(self, rng):
        K = generate("unit-circle", {"samples": 128}).compact
        for _ in range(20):
            f, poles = _blaschke_quotient(rng, 1.0)
            j = j_functional(f, [1, 0])
            assert j == pytest.approx(-np.sum(np.log(np.abs(poles))), rel=1e-8)
            assert boundary_distances(f, K).max() < 0.03
            v = affine_extremal(K, f.point(0.0).to_affine(), 12).v_values[-1]
            assert v <= j + 0.05

    def test_random_blaschke_quotients_on_annulus(self, rng):
        K = generate("annulus", {"samples": 64}).compact
        for _ in range(20):
            f, poles = _blaschke_quotient(rng, rng.uniform(1.5, 2.5))
            j = j_functional(f, [1, 0])
            assert j == pytest.approx(-np.sum(np.log(np.abs(poles))), rel=1e-8)
            assert boundary_distances(f, K).max() < 0.15
            v = affine_extremal(K, f.point(0.0).to_affine(), 12).v_values[-1]
            assert v <= j + 0.05


class TestEnvelopeSandwich:
    def test_random_instances(self, rng):
        """Every feasible disc found for Omega = {dist(., K) < margin} has J >= V_Omega(p)."""
        compacts = {"unit-circle": (generate("unit-circle", {"samples": 128}).compact, 1.0, (1.5, 4.0)),
                    "annulus": (generate("annulus", {"samples": 128}).compact, 2.5, (3.0, 8.0))}
        margin = 0.1
        checked = 0
        for i in range(20):
            K, outer, (lo, hi) = compacts["annulus" if i % 2 else "unit-circle"]
            p = rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform())
            result = disc_search_envelope(K, [p], SearchConfig(restarts=2, iterations=300, seed=i), margin=margin)
            if not result.feasible:
                continue
            checked += 1
            v = affine_extremal(K, [p], 6).v_values[-1]
            # V of the neighbourhood sits below V of K by at most log(1 + margin / outer)
            assert v <= result.j_value + math.log(1 + margin / outer) + 0.05
        assert checked >= 10


class TestSequences:
    def test_schedule_must_decrease(self, annulus_compact):
        with pytest.raises(InvalidInputError):
            envelope_sequence(annulus_compact, [6.0], [0.1, 0.2], FAST)
        with pytest.raises(InvalidInputError):
            envelope_sequence(annulus_compact, [6.0], [], FAST)

    def test_cancelled_lifts(self, annulus_result):
        (lift,) = cancel_sequence([annulus_result])
        assert lift.blaschke_at_zero == pytest.approx(math.exp(-annulus_result.j_value), rel=1e-10)
        assert lift.boundary_scale == pytest.approx(math.exp(annulus_result.j_value), rel=1e-10)
        assert lift.lift.mode == "affine"
