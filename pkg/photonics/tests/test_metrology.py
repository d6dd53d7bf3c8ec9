"""
Tests for detection operators, visibilities, phase sensitivity and thresholds
"""

import itertools
import math

import numpy as np
import pytest

from photonics.exceptions import (
    BasisError,
    ConfigurationError,
    IndexRangeError,
    InvalidStateError,
)
from photonics.fock import BasisState, FockBasis, expectation, make_mm_state
from photonics.loss_channel import ArmLoss, LossyInterferometer, reduced_density_matrix
from photonics.metrology import (
    PhaseEstimator,
    db_from_loss,
    detection_operator,
    detection_visibility,
    expectation_vs_phase,
    fundamental_visibility,
    golden_section_search,
    limits,
    loss_from_db,
    loss_threshold_to_snl,
    min_phase_sensitivity,
    noon_detection_operator,
    phase_response,
    phase_sensitivity,
    sensitivity_curve,
    truncated_detection_operator,
)

T_GRID = [0.25, 0.5, 0.75, 1.0]

# m, m', visibility in percent, minimum detectable phase; long arm at 50% loss
TABLE_ROWS = [
    (10, 0, 3.13, 2.264),
    (11, 1, 6.74, 1.051),
    (12, 2, 10.96, 0.652),
    (14, 4, 19.85, 0.372),
    (16, 6, 28.11, 0.279),
    (18, 8, 35.19, 0.238),
    (20, 10, 41.11, 0.254),
]


def _config(m, m_prime, ta=1.0, tb=1.0, phi=0.0):
    return LossyInterferometer(m, m_prime, ArmLoss(ta), ArmLoss(tb), phi)


class TestDetectionOperator:
    def test_noon_case_has_two_entries(self):
        op = detection_operator(6, 0)
        assert op.nonzero_count() == 2
        assert op.entry(BasisState(0, 6), BasisState(6, 0)) == 1.0
        assert op.entry(BasisState(6, 0), BasisState(0, 6)) == 1.0
        np.testing.assert_array_equal(op.matrix, noon_detection_operator(6).matrix)

    def test_dyad_count(self):
        op = detection_operator(2, 1)
        assert op.nonzero_count() == 8
        assert op.is_hermitian()

    def test_square_returns_lossless_state(self):
        op = detection_operator(5, 2)
        rho = make_mm_state(5, 2).projector()
        assert expectation(op.squared(), rho) == pytest.approx(1.0)
        assert expectation(op, rho) == pytest.approx(1.0)

    def test_overlapping_families_double_count(self):
        # m = 2m': |10,10> is a column of both dyad families
        squared = detection_operator(20, 10).squared()
        assert squared.entry(BasisState(10, 10), BasisState(10, 10)) == 2.0
        assert squared.entry(BasisState(20, 5), BasisState(20, 5)) == 1.0

    def test_invalid_pairs(self):
        with pytest.raises(InvalidStateError):
            detection_operator(3, 3)
        with pytest.raises(BasisError):
            detection_operator(4, 1, FockBasis(3))
        with pytest.raises(InvalidStateError):
            noon_detection_operator(0)

    def test_truncated_operator(self):
        op = truncated_detection_operator(4, 2, 3)
        assert op.nonzero_count() == 6
        full = truncated_detection_operator(4, 2, 9)
        np.testing.assert_array_equal(full.matrix, detection_operator(4, 2).matrix)
        assert full.label != detection_operator(4, 2).label
        with pytest.raises(IndexRangeError):
            truncated_detection_operator(4, 2, 10)


class TestFringes:
    @pytest.mark.parametrize("m", range(1, 13))
    def test_expectation_is_visibility_times_cosine(self, m):
        phi = np.linspace(0, 2 * math.pi, 1024)
        for m_prime in range(m):
            op = detection_operator(m, m_prime)
            for ta, tb in itertools.product(T_GRID, T_GRID):
                config = _config(m, m_prime, ta, tb)
                series = expectation_vs_phase(config, op, phi)
                expected = fundamental_visibility(config) * np.cos((m - m_prime) * phi)
                assert np.max(np.abs(series - expected)) < 1e-10

    @pytest.mark.parametrize("n", range(1, 11))
    def test_noon_closed_form(self, n):
        phi = np.linspace(0, 2 * math.pi, 256)
        op = noon_detection_operator(n)
        for ta, tb in itertools.product(T_GRID, T_GRID):
            series = expectation_vs_phase(_config(n, 0, ta, tb), op, phi)
            expected = (ta * tb) ** (n / 2) * np.cos(n * phi)
            assert np.max(np.abs(series - expected)) < 1e-12

    def test_fitted_amplitude_equals_visibility(self):
        config = _config(9, 4, 0.7, 0.45)
        response = phase_response(config, detection_operator(9, 4))
        assert response.amplitude == pytest.approx(fundamental_visibility(config), abs=1e-10)
        assert response.constant == pytest.approx(0.0, abs=1e-15)

    def test_response_matches_direct_trace(self):
        config = _config(4, 1, 0.6, 0.8, phi=0.37)
        op = truncated_detection_operator(4, 1, 2)
        direct = expectation(op, reduced_density_matrix(config)).real
        assert phase_response(config, op).value(0.37) == pytest.approx(direct, abs=1e-14)

    def test_basis_mismatch(self):
        with pytest.raises(BasisError):
            expectation_vs_phase(_config(3, 1), detection_operator(4, 1), [0.0])

    @pytest.mark.parametrize("m, m_prime, visibility, _delta", TABLE_ROWS)
    def test_visibility_at_half_loss(self, m, m_prime, visibility, _delta):
        config = _config(m, m_prime, 1.0, 0.5)
        assert 100 * fundamental_visibility(config) == pytest.approx(visibility, abs=0.05)

    def test_resolution_amplitudes(self):
        assert fundamental_visibility(_config(10, 0, 1.0, 0.5)) == pytest.approx(
            0.03125, abs=1e-12
        )
        assert fundamental_visibility(_config(20, 10, 1.0, 0.5)) == pytest.approx(0.4111, abs=1e-3)

    def test_lossless_visibility_is_one(self):
        for m, m_prime in [(1, 0), (5, 3), (20, 10)]:
            assert fundamental_visibility(_config(m, m_prime)) == pytest.approx(1.0)

    @pytest.mark.parametrize("m, m_prime", [(10, 0), (12, 2), (20, 10)])
    def test_visibility_monotone_in_each_arm(self, m, m_prime):
        grid = np.linspace(0, 1, 21)
        for fixed in (0.0, 0.3):
            along_b = [fundamental_visibility(_config(m, m_prime, 1 - fixed, 1 - x)) for x in grid]
            along_a = [fundamental_visibility(_config(m, m_prime, 1 - x, 1 - fixed)) for x in grid]
            assert np.all(np.diff(along_b) <= 1e-15)
            assert np.all(np.diff(along_a) <= 1e-15)


class TestDetectionVisibility:
    def test_matched_operator_gives_fundamental(self):
        config = _config(7, 3, 0.6, 0.9)
        assert detection_visibility(config, detection_operator(7, 3)) == pytest.approx(
            fundamental_visibility(config), abs=1e-14
        )

    def test_lossless(self):
        assert detection_visibility(_config(6, 2), detection_operator(6, 2)) == pytest.approx(1.0)

    def test_noon_detector_on_mm_state_is_worse(self):
        config = _config(2, 1, 0.8, 0.5)
        op = noon_detection_operator(1, FockBasis(2))
        assert detection_visibility(config, op) < fundamental_visibility(config)

    def test_truncations_never_beat_fundamental(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            m = int(rng.integers(2, 9))
            m_prime = int(rng.integers(1, m))
            config = LossyInterferometer(
                m,
                m_prime,
                ArmLoss(rng.uniform(), rng.uniform(0, 2 * math.pi)),
                ArmLoss(rng.uniform(), rng.uniform(0, 2 * math.pi)),
            )
            v_f = fundamental_visibility(config)
            terms = int(rng.integers(1, (m_prime + 1) ** 2 + 1))
            op = truncated_detection_operator(m, m_prime, terms)
            assert detection_visibility(config, op) <= v_f + 1e-12


class TestPhaseSensitivity:
    def test_lossless_at_quarter_fringe(self):
        for m, m_prime in [(2, 1), (10, 0), (20, 10)]:
            f = m - m_prime
            op = detection_operator(m, m_prime)
            value = phase_sensitivity(_config(m, m_prime), op, math.pi / (2 * f))
            assert value == pytest.approx(1 / f, rel=1e-9)

    def test_diverges_at_fringe_extremum(self):
        assert phase_sensitivity(_config(4, 1, 0.9, 0.6), detection_operator(4, 1), 0.0) == math.inf

    def test_analytic_and_finite_difference_slopes_agree(self):
        config = LossyInterferometer(6, 2, ArmLoss(0.8, 0.3), ArmLoss(0.55, -0.2))
        analytic = PhaseEstimator(detection_operator(6, 2))
        numeric = PhaseEstimator(truncated_detection_operator(6, 2, 9))
        assert analytic.is_analytic(config) and not numeric.is_analytic(config)
        phi = np.linspace(0.05, 1.5, 40)
        slopes = np.asarray(analytic.derivative(config, phi))
        keep = np.abs(slopes) > 0.1 * np.max(np.abs(slopes))
        numeric_slopes = np.asarray(numeric.derivative(config, phi))
        np.testing.assert_allclose(numeric_slopes[keep], slopes[keep], rtol=1e-6)

    def test_curve_positive_where_finite(self):
        config = _config(20, 10, 1.0, 0.6)
        phi = np.linspace(0, math.pi / 5, 200)
        curve = sensitivity_curve(config, detection_operator(20, 10), phi)
        finite = np.isfinite(curve.delta_phi)
        assert np.all(curve.delta_phi[finite] > 0)
        assert not finite[0]

    @pytest.mark.parametrize("m, m_prime", [(1, 0), (3, 1), (10, 0), (12, 2), (20, 10)])
    def test_lossless_minimum(self, m, m_prime):
        result = min_phase_sensitivity(_config(m, m_prime), detection_operator(m, m_prime))
        assert result.delta_phi == pytest.approx(1 / (m - m_prime), abs=1e-9)
        assert 0 < result.phi < math.pi / (m - m_prime)

    @pytest.mark.parametrize("m, m_prime, _visibility, delta", TABLE_ROWS)
    def test_minimum_at_half_loss(self, m, m_prime, _visibility, delta):
        config = _config(m, m_prime, 1.0, 0.5)
        phi, delta_phi = min_phase_sensitivity(config, detection_operator(m, m_prime))
        assert delta_phi == pytest.approx(delta, abs=0.005)
        # With A^2 above V_f^2 the optimum sits a quarter fringe in
        assert phi == pytest.approx(math.pi / (2 * (m - m_prime)), abs=1e-6)

    def test_no_signal(self):
        result = min_phase_sensitivity(_config(5, 1, 1.0, 0.0), detection_operator(5, 1))
        assert result.no_signal
        assert result.delta_phi == math.inf

    def test_coarse_grid_floor(self):
        with pytest.raises(ConfigurationError):
            min_phase_sensitivity(_config(3, 1), detection_operator(3, 1), coarse_grid=100)


class TestLimits:
    @pytest.mark.parametrize(
        "m, m_prime, hl, snl",
        [(10, 0, 0.100, 0.316), (20, 10, 0.033, 0.183), (11, 1, 0.083, 0.289)],
    )
    def test_values(self, m, m_prime, hl, snl):
        result = limits(m, m_prime)
        assert result.heisenberg == pytest.approx(hl, abs=0.0005)
        assert result.shot_noise == pytest.approx(snl, abs=0.0005)
        assert result.heisenberg <= result.shot_noise <= 1
        assert result.lossless_best >= result.heisenberg

    def test_db_conversion(self):
        assert loss_from_db(3.0) == pytest.approx(0.498813, abs=1e-6)
        assert loss_from_db(3.0, exact_half=True) == 0.5
        assert loss_from_db(0.0) == 0.0
        assert db_from_loss(0.5, exact_half=True) == 3.0
        assert db_from_loss(loss_from_db(7.5)) == pytest.approx(7.5)
        assert db_from_loss(1.0) == math.inf
        with pytest.raises(ConfigurationError):
            loss_from_db(-1.0)


class TestGoldenSection:
    def test_bracket_contains_minimum(self):
        a, b = golden_section_search(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 1e-8)
        assert b - a <= 1e-8
        assert a <= 0.3 <= b

    def test_narrow_interval_returned_as_is(self):
        assert golden_section_search(abs, 0.1, 0.1 + 1e-10, 1e-8) == (0.1, 0.1 + 1e-10)


class TestThreshold:
    def test_noon(self):
        result = loss_threshold_to_snl(10, 0, 0.0)
        assert result.reached
        assert 0.25 <= result.loss <= 0.27
        assert result.sign_changes == 1
        assert result.monotone

    def test_mm_state(self):
        result = loss_threshold_to_snl(20, 10, 0.0)
        assert result.reached
        assert 0.39 <= result.loss <= 0.41
        assert result.shot_noise == pytest.approx(1 / math.sqrt(30))

    def test_lossless_below_snl(self):
        for m, m_prime in [(10, 0), (20, 10)]:
            result = min_phase_sensitivity(_config(m, m_prime), detection_operator(m, m_prime))
            assert result.delta_phi < limits(m, m_prime).shot_noise

    def test_never_reaches(self):
        # 1/(m-m') = 1 is already above 1/sqrt(3)
        result = loss_threshold_to_snl(2, 1, 0.0)
        assert not result.reached
        assert result.loss is None
        assert result.to_dict()["reached"] is False
