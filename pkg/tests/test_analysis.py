"""Expected site volume, box schedule, and the two fitting routines."""

import numpy as np
import pytest

from breatherkit import (BaseSet, IDSCurve, ScaleDistribution, bernstein_fit,
                         choose_L, concentration_probability, fit_tail, mean_s,
                         proof_tail_constant, scheduled_ids)
from breatherkit.analysis import mean_power_quadrature, mean_scale_power
from breatherkit.errors import PreconditionError

UNIFORM = ScaleDistribution.uniform01()


def synthetic_curve(energies, values):
    energies = np.asarray(energies, dtype=float)
    values = np.asarray(values, dtype=float)
    return IDSCurve(energies, values, np.zeros_like(values), 1, 1, 1, 1, 0)


class TestMeanS:
    def test_uniform_d1(self, interval_base):
        assert mean_s(UNIFORM, interval_base, 1) == pytest.approx(0.25,
                                                                  abs=1e-15)

    def test_uniform_d2_with_vol_03(self):
        mask = np.zeros((10, 10), dtype=bool)
        mask.ravel()[:30] = True
        base = BaseSet(mask)
        assert mean_s(UNIFORM, base, 2) == pytest.approx(0.1, abs=1e-15)

    def test_point_mass_one_returns_volume(self, interval_base):
        pm1 = ScaleDistribution.point_mass(1.0)
        assert mean_s(pm1, interval_base, 1) == 0.5

    def test_degenerate_zero_warns(self, interval_base):
        with pytest.warns(UserWarning, match="zero"):
            value = mean_s(ScaleDistribution.point_mass(0.0), interval_base, 1)
        assert value == 0.0

    def test_linear_in_volume(self):
        quarter = BaseSet(np.array([True, False, False, False]))
        half = BaseSet(np.array([True, True, False, False]))
        assert mean_s(UNIFORM, half, 1) == pytest.approx(
            2 * mean_s(UNIFORM, quarter, 1), abs=1e-15)

    def test_dimension_mismatch_rejected(self, interval_base):
        with pytest.raises(ValueError, match="dimension"):
            mean_s(UNIFORM, interval_base, 2)

    @pytest.mark.parametrize("dist", [
        UNIFORM,
        ScaleDistribution.bernoulli_uniform(0.3),
        ScaleDistribution.point_mass(0.6),
    ])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_quadrature_matches_analytic(self, dist, d):
        assert mean_power_quadrature(dist, d) == pytest.approx(
            mean_scale_power(dist, d), abs=1e-10)


class TestChooseL:
    def test_schedule_examples(self):
        assert choose_L(0.01, 0.25) == (2, True)
        assert choose_L(0.001, 0.25) == (8, True)

    def test_large_energy_is_inadmissible(self):
        choice = choose_L(0.5, 0.25)
        assert choice.L in (0, 1)
        assert not choice.admissible

    def test_monotone_nonincreasing_in_energy(self):
        boxes = [choose_L(e, 0.25).L for e in np.geomspace(1e-5, 1.0, 30)]
        assert all(b >= a for a, b in zip(boxes[1:], boxes))

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            choose_L(0.0, 0.25)
        with pytest.raises(ValueError):
            choose_L(0.1, 0.0)


class TestBernsteinFit:
    def test_exact_log_linear_table(self):
        table = [(L, float(np.exp(-0.3 * 2 * L))) for L in (1, 2, 3)]
        fit = bernstein_fit(table, 1)
        assert fit.decay_rate == pytest.approx(0.3, abs=1e-12)
        assert fit.residual_norm == pytest.approx(0.0, abs=1e-10)
        assert fit.positive

    def test_constant_probabilities_flagged(self):
        fit = bernstein_fit([(1, 0.2), (2, 0.2), (3, 0.2)], 1)
        assert fit.decay_rate == pytest.approx(0.0, abs=1e-12)
        assert not fit.positive

    def test_too_few_nonzero_points(self):
        with pytest.raises(PreconditionError, match=">= 3"):
            bernstein_fit([(1, 0.5), (2, 0.1), (4, 0.0)], 1)

    def test_monte_carlo_table(self, interval_base):
        table = concentration_probability(interval_base, UNIFORM, 1, [2, 3, 4],
                                          2000, 7)
        fit = bernstein_fit([(L, p.estimate) for L, p in table], 1)
        assert fit.positive
        assert fit.residual_norm >= 0.0


class TestFitTail:
    def test_pure_stretched_exponential_is_exact(self):
        e = np.geomspace(0.001, 0.1, 40)
        curve = synthetic_curve(e, np.exp(-e**-0.5))
        fit = fit_tail(curve, 0.0, 1, (0.0005, 0.1))
        assert fit.slope == pytest.approx(-0.5, abs=1e-12)
        assert fit.n_points == 40

    def test_prefactored_synthetic_frozen_value(self):
        # the polynomial prefactor biases the estimator towards ~ -0.45 on
        # this window; value frozen from an independent least-squares fit
        e = np.geomspace(0.001, 0.1, 40)
        curve = synthetic_curve(e, e**0.5 * np.exp(-e**-0.5))
        fit = fit_tail(curve, 0.0, 1, (0.001, 0.1))
        inside = e > 0.001
        oracle = np.polyfit(np.log(e[inside]),
                            np.log(-np.log(curve.estimates[inside])), 1)[0]
        assert fit.slope == pytest.approx(oracle, rel=1e-12)
        assert fit.slope == pytest.approx(-0.45172204925728254, rel=1e-10)

    def test_window_filters_energies(self):
        e = np.linspace(0.01, 0.2, 20)
        curve = synthetic_curve(e, np.exp(-e**-0.5))
        fit = fit_tail(curve, 0.0, 1, (0.05, 0.15))
        assert fit.n_points == np.count_nonzero((e > 0.05) & (e <= 0.15))

    def test_degenerate_curve_has_no_usable_window(self):
        # all estimates at 0 (energies below the spectrum): nothing to fit
        e = np.array([-0.3, -0.2, -0.1])
        curve = synthetic_curve(e, np.zeros(3))
        with pytest.raises(PreconditionError, match="usable"):
            fit_tail(curve, 0.0, 1, (-0.4, -0.05))

    def test_saturated_estimates_excluded(self):
        e = np.geomspace(0.01, 0.1, 10)
        values = np.exp(-e**-0.5)
        values[-3:] = 1.0
        curve = synthetic_curve(e, values)
        fit = fit_tail(curve, 0.0, 1, (0.005, 0.1))
        assert fit.n_points == 7


def test_proof_constant_consistency_on_desk_run(interval_base):
    """The concentration-rate constant must not exceed the observed decay."""
    table = concentration_probability(interval_base, UNIFORM, 1, [2, 3, 4],
                                      2000, 7)
    c_ld = bernstein_fit([(L, p.estimate) for L, p in table], 1).decay_rate
    ms = mean_s(UNIFORM, interval_base, 1)
    proof = proof_tail_constant(c_ld, ms, 1)
    assert proof > 0.0

    energies = [float(e) for e in np.geomspace(0.02, 0.2, 12)]
    curve, _ = scheduled_ids(interval_base, UNIFORM, 1, 8, energies, 800, 2024)
    fit = fit_tail(curve, 0.0, 1, (0.0, 0.2))
    assert fit.c_exp >= 0.5 * proof
