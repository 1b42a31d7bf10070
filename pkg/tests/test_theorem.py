import math

import numpy as np
import pytest

from bellsim.core import CorrelationFunction, check_constraints
from bellsim.fourier import coefficients_simple, parseval_check
from bellsim.lhv import (
    LhvModel,
    SimpleFunctionSpec,
    aspect_correlation_function,
    aspect_model,
    correlation_function,
)
from bellsim.quantum import singlet_correlation_function
from bellsim.theorem import (
    MAX_FIRST_HARMONIC_POWER,
    MomentMatrix,
    chsh_score,
    forced_response,
    forced_response_excess_fraction,
    forced_response_unit_points,
    incompatibility_report,
    moment_matrix,
    quantum_target,
    reconstruct_correlation,
    schmidt_spectrum,
)

from helpers import (
    first_harmonic_max_brute,
    first_harmonic_max_dp,
    random_model,
    random_spec,
)

STANDARD_SETTINGS = (0.0, math.pi / 4.0, math.pi / 8.0, 3.0 * math.pi / 8.0)


class TestMomentMatrix:
    def test_symmetric_not_hermitian(self):
        model = random_model(np.random.default_rng(30))
        mm = moment_matrix(model, 4)
        assert np.max(np.abs(mm.entries - mm.entries.T)) <= 1e-12
        # diagonal entries M_nn are generally complex, so M is not Hermitian
        assert mm.entries.dtype == np.complex128

    def test_entry_indexing(self):
        model = random_model(np.random.default_rng(31))
        mm = moment_matrix(model, 3)
        assert mm.entry(1, -1) == mm.entries[4, 2]
        with pytest.raises(ValueError):
            mm.entry(4, 0)

    def test_anti_diagonal_is_per_harmonic_power(self):
        # M_(n,-n) = s * sum_i w_i |f_n(i)|^2
        model = random_model(np.random.default_rng(32))
        mm = moment_matrix(model, 4)
        s = model.pairing_sign
        for n in range(-4, 5):
            power = sum(
                w * abs(coefficients_simple(spec, abs(n)).coefficient(n)) ** 2
                for w, spec in model.atoms
            )
            assert mm.entry(n, -n) == pytest.approx(s * power, abs=1e-12)

    def test_parseval_trace_identity_and_band(self):
        # trace == pairing * pi * (weighted captured fraction) exactly, and
        # the captured fraction at N=512 is within 1% of complete
        rng = np.random.default_rng(33)
        for _ in range(5):
            model = random_model(rng, max_atoms=8)
            mm = moment_matrix(model, 512)
            weighted_fraction = sum(
                w * parseval_check(spec, 512) for w, spec in model.atoms
            )
            expected = model.pairing_sign * math.pi * weighted_fraction
            assert mm.parseval_trace() == pytest.approx(expected, abs=1e-9)
            assert abs(mm.parseval_trace() - model.pairing_sign * math.pi) <= (
                0.01 * math.pi
            )

    def test_matches_2d_spectrum_of_model(self):
        # the moment matrix is the 2D coefficient matrix of the model
        # correlation; check through the independent quadrature route
        from bellsim.fourier import coefficients_2d

        model = random_model(np.random.default_rng(34), max_atoms=4, max_intervals=5)
        mm = moment_matrix(model, 2)
        sp = coefficients_2d(correlation_function(model), n_max=2, resolution=2048)
        assert np.max(np.abs(sp.coefficients - mm.entries)) <= 5e-3

    def test_validation(self):
        with pytest.raises(ValueError):
            MomentMatrix(np.zeros((2, 2), dtype=complex))
        with pytest.raises(ValueError):
            moment_matrix(random_model(np.random.default_rng(0)), -1)


class TestQuantumTarget:
    def test_structure(self):
        tgt = quantum_target(3)
        assert tgt.entry(1, -1) == -math.pi / 2.0
        assert tgt.entry(-1, 1) == -math.pi / 2.0
        mask = np.ones((7, 7), dtype=bool)
        mask[4, 2] = mask[2, 4] = False
        assert np.all(tgt.entries[mask] == 0.0)

    def test_reconstructs_to_singlet_exactly(self):
        # the target is band-limited, so its reconstruction is the exact
        # quantum correlation, not an approximation
        corr = reconstruct_correlation(quantum_target(4))
        quantum = singlet_correlation_function()
        grid = np.linspace(-1.0, 4.0, 23)
        gap = np.max(
            np.abs(corr(grid[:, None], grid[None, :]) - quantum(grid[:, None], grid[None, :]))
        )
        assert gap <= 1e-12

    def test_window_validation(self):
        with pytest.raises(ValueError):
            quantum_target(0)


class TestFirstHarmonicBound:
    def test_dp_matches_brute_force(self):
        for n_cells, blocks in ((10, 3), (12, 4)):
            brute = first_harmonic_max_brute(n_cells, blocks)
            dp, upper = first_harmonic_max_dp(n_cells, blocks, n_phases=4096)
            assert dp == pytest.approx(brute, abs=1e-12)
            assert brute <= upper + 1e-12

    def test_grid_search_confirms_four_over_pi(self):
        best, upper = first_harmonic_max_dp(n_cells=256, max_blocks=8, n_phases=2048)
        assert best**2 == pytest.approx(MAX_FIRST_HARMONIC_POWER, abs=1e-9)
        assert upper**2 <= MAX_FIRST_HARMONIC_POWER + 1e-4

    def test_random_specs_respect_bound(self):
        rng = np.random.default_rng(35)
        for _ in range(100):
            spec = random_spec(rng)
            power = abs(coefficients_simple(spec, 1).coefficient(1)) ** 2
            assert power <= MAX_FIRST_HARMONIC_POWER + 1e-12

    def test_square_wave_attains_bound(self):
        power = abs(
            coefficients_simple(SimpleFunctionSpec((math.pi / 2.0,), 1), 1).coefficient(1)
        ) ** 2
        assert power == pytest.approx(MAX_FIRST_HARMONIC_POWER, abs=1e-14)


class TestIncompatibilityReport:
    def test_correlated_floor(self):
        rng = np.random.default_rng(36)
        for _ in range(50):
            report = incompatibility_report(random_model(rng, pairing="correlated"))
            assert report.residual_inf >= math.pi / 2.0 - 1e-12
            assert not report.compatible

    def test_anti_correlated_floor(self):
        rng = np.random.default_rng(37)
        floor = math.pi / 2.0 - 4.0 / math.pi - 1e-9
        for _ in range(50):
            report = incompatibility_report(
                random_model(rng, pairing="anti-correlated")
            )
            assert report.residual_inf >= floor
            assert not report.compatible

    def test_aspect_saturates_anti_floor(self):
        # every rotated square-wave response carries first-harmonic power
        # exactly 4/pi, so the mixture hits the bound with equality
        for n_atoms in (8, 33, 64):
            report = incompatibility_report(aspect_model(n_atoms))
            gap = math.pi / 2.0 - 4.0 / math.pi
            assert report.residual_inf == pytest.approx(gap, abs=1e-12)
            witness = report.witnesses[0]
            assert witness.value == pytest.approx(-4.0 / math.pi, abs=1e-12)

    def test_report_fields_and_str(self):
        report = incompatibility_report(aspect_model(16), n_max=3, tol=1e-6)
        assert report.pairing == "anti-correlated"
        assert report.n_max == 3
        assert report.verdict == "incompatible"
        assert {(w.n, w.m) for w in report.witnesses} == {(1, -1), (-1, 1)}
        text = str(report)
        assert "incompatible" in text and "residual" in text

    def test_validation(self):
        model = random_model(np.random.default_rng(38))
        with pytest.raises(ValueError):
            incompatibility_report(model, n_max=1)
        with pytest.raises(ValueError):
            incompatibility_report(model, tol=0.0)


class TestReconstruction:
    def test_single_square_atom_away_from_jumps(self):
        spec = SimpleFunctionSpec((math.pi / 2.0,), 1)
        model = LhvModel(((1.0, spec),), pairing="correlated")
        corr = correlation_function(model)
        recon = reconstruct_correlation(moment_matrix(model, 128))
        axis = np.linspace(0.0, math.pi, 161, endpoint=False)
        jumps = np.array([0.0, math.pi / 2.0, math.pi])
        dist = np.min(np.abs(axis[:, None] - jumps[None, :]), axis=1)
        keep = axis[dist > 0.05]
        gap = np.max(
            np.abs(
                recon(keep[:, None], keep[None, :]) - corr(keep[:, None], keep[None, :])
            )
        )
        assert gap <= 0.12

    def test_constraints_preserved(self):
        model = random_model(np.random.default_rng(39), max_atoms=4)
        recon = reconstruct_correlation(moment_matrix(model, 16))
        assert check_constraints(recon, grid_size=8).passed


class TestForcedResponse:
    def test_amplitude_and_shape(self):
        profile = forced_response(0.0)
        assert profile(0.0) == pytest.approx(math.sqrt(2.0), abs=1e-15)
        theta = np.linspace(0.0, math.pi, 100)
        assert np.max(np.abs(profile(theta))) <= math.sqrt(2.0) + 1e-12

    def test_first_harmonic_power_is_half_pi(self):
        # the profile packs |f_1|^2 = pi/2, which no +/-1 response can reach
        from bellsim.fourier import coefficients_quadrature

        profile = forced_response(0.3)
        sp = coefficients_quadrature(profile, 1, resolution=64)
        assert abs(sp.coefficient(1)) ** 2 == pytest.approx(math.pi / 2.0, abs=1e-10)
        assert math.pi / 2.0 > MAX_FIRST_HARMONIC_POWER

    def test_unit_points_bracketed_on_grid(self):
        rng = np.random.default_rng(40)
        grid = np.linspace(0.0, math.pi, 4097)
        for _ in range(20):
            phase = float(rng.uniform(0.0, 2.0 * math.pi))
            profile = forced_response(phase)
            vals = np.abs(profile(grid)) - 1.0
            crossings = int(np.sum(np.sign(vals[1:]) != np.sign(vals[:-1])))
            assert crossings == 4
            points = forced_response_unit_points(phase)
            assert points.shape == (4,)
            assert np.all((0.0 <= points) & (points < math.pi))
            assert np.max(np.abs(np.abs(profile(points)) - 1.0)) <= 1e-12
            spacing = np.diff(points)
            assert np.allclose(spacing, math.pi / 4.0, atol=1e-9)

    def test_excess_fraction(self):
        rng = np.random.default_rng(41)
        for _ in range(5):
            frac = forced_response_excess_fraction(float(rng.uniform(0.0, math.pi)))
            assert frac > 0.98

    def test_validation(self):
        with pytest.raises(ValueError):
            forced_response_excess_fraction(0.0, n_points=0)


class TestSchmidtSpectrum:
    def test_quantum_has_exactly_two_weights(self):
        spectrum = schmidt_spectrum(singlet_correlation_function(), n_max=8)
        assert spectrum.count_above == 2
        assert spectrum.weight(1) == pytest.approx(math.pi / 2.0, abs=1e-9)
        assert spectrum.weight(-1) == pytest.approx(math.pi / 2.0, abs=1e-9)

    def test_triangle_has_odd_harmonic_ladder(self):
        spectrum = schmidt_spectrum(aspect_correlation_function(), n_max=8)
        assert spectrum.count_above >= 6
        assert spectrum.weight(3) / spectrum.weight(1) == pytest.approx(
            1.0 / 9.0, abs=1e-6
        )
        assert spectrum.weight(5) / spectrum.weight(1) == pytest.approx(
            1.0 / 25.0, abs=1e-6
        )
        for n in (0, 2, 4, 6, 8):
            assert spectrum.weight(n) <= 1e-9

    def test_non_stationary_rejected(self):
        lumpy = CorrelationFunction(
            fn=lambda a, b: -np.cos(2.0 * a) * np.cos(2.0 * b),
            kind="lhv-exact",
            description="product form",
        )
        with pytest.raises(ValueError, match="stationary"):
            schmidt_spectrum(lumpy, n_max=3, resolution=256)

    def test_accepts_precomputed_spectrum(self):
        from bellsim.fourier import coefficients_2d

        sp = coefficients_2d(singlet_correlation_function(), n_max=4, resolution=256)
        spectrum = schmidt_spectrum(sp)
        assert spectrum.count_above == 2

    def test_weight_indexing(self):
        spectrum = schmidt_spectrum(singlet_correlation_function(), n_max=3)
        with pytest.raises(ValueError):
            spectrum.weight(4)


class TestChshScore:
    def test_quantum_reaches_tsirelson_value(self):
        score = chsh_score(singlet_correlation_function(), *STANDARD_SETTINGS)
        assert score == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-12)

    def test_triangle_reaches_two(self):
        score = chsh_score(aspect_correlation_function(), *STANDARD_SETTINGS)
        assert score == pytest.approx(2.0, abs=1e-12)

    def test_models_stay_at_or_below_two(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            corr = correlation_function(random_model(rng))
            assert chsh_score(corr, *STANDARD_SETTINGS) <= 2.0 + 1e-12

    def test_other_settings_change_score(self):
        corr = singlet_correlation_function()
        assert chsh_score(corr, 0.0, 0.0, 0.0, 0.0) == pytest.approx(2.0, abs=1e-12)
