"""Closed-form error rates against frozen high-precision oracle values.

Expected values were computed with mpmath at 40 decimal digits
(mp.erfc/mp.e on the formulas stated in the docstrings) and frozen here.
"""

import math

import numpy as np
import pytest
import scipy.stats

from kennedyrx import bounds
from kennedyrx.bounds import (
    FitUnderdeterminedError,
    ImperfectionParams,
    SignalParams,
    compute_bounds_curve,
    error_helstrom,
    error_kennedy_ideal,
    error_kennedy_real,
    error_sql,
    extinction_db_to_linear,
    fit_imperfections,
    poisson_pmf,
)

DEMO_IMP = ImperfectionParams(extinction_linear=1250.0, dark_prob_per_bin=1.5e-3)

# mpmath oracle values (40 dps)
E_KENNEDY = {0.0: 0.5, 0.5: 0.067667641618306345947, 1.3: 0.002758282210380386209,
             3.0: 3.0721061766641048793e-6}
E_SQL = {0.0: 0.5, 0.5: 0.078649603525142565329, 1.3: 0.011293444082089844542,
         3.0: 2.6600275256962484964e-4}
E_HELSTROM = {0.0: 0.5, 0.5: 0.035063252483903110631, 1.3: 0.0013810483998729848363,
              3.0: 1.5360554477983911508e-6}
EQ_REAL_13 = 0.0055802883991484067547
EQ_REAL_0 = 0.50074943778114456288
NORM_REAL_13 = 0.49411750380011426827
CROSSOVER_M = 0.38409927839541491255


class TestPoissonPmf:
    def test_empty_process_identity(self):
        assert poisson_pmf(0, 0.0) == 1.0
        assert poisson_pmf(3, 0.0) == 0.0

    def test_zero_count_oracle(self):
        assert poisson_pmf(0, 2.0) == pytest.approx(0.13533528323661269189, rel=1e-14)

    def test_normalization(self):
        total = sum(poisson_pmf(n, 5.2) for n in range(201))
        assert abs(total - 1.0) < 1e-12

    @pytest.mark.parametrize("mu", [0.1, 1.0, 5.2])
    def test_mean_identity(self, mu):
        mean = sum(n * poisson_pmf(n, mu) for n in range(400))
        assert abs(mean - mu) < 1e-9

    def test_large_argument_stability(self):
        # log-space evaluation keeps mean, n up to 1e3 finite and sane
        p = poisson_pmf(1000, 1000.0)
        assert 0.0 < p < 1.0
        assert p == pytest.approx(scipy.stats.poisson.pmf(1000, 1000.0), rel=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            poisson_pmf(-1, 2.0)
        with pytest.raises(ValueError):
            poisson_pmf(2, -0.5)


class TestClosedForms:
    @pytest.mark.parametrize("m", [0.0, 0.5, 1.3, 3.0])
    def test_kennedy_ideal_oracle(self, m):
        assert error_kennedy_ideal(SignalParams(m)) == pytest.approx(E_KENNEDY[m], rel=1e-12)

    @pytest.mark.parametrize("m", [0.0, 0.5, 1.3, 3.0])
    def test_sql_oracle(self, m):
        assert error_sql(SignalParams(m)) == pytest.approx(E_SQL[m], rel=1e-12)

    @pytest.mark.parametrize("m", [0.0, 0.5, 1.3, 3.0])
    def test_helstrom_oracle(self, m):
        assert error_helstrom(SignalParams(m)) == pytest.approx(E_HELSTROM[m], rel=1e-12)

    def test_sql_monotone(self):
        assert error_sql(2.0) < error_sql(1.0)

    def test_kennedy_real_oracle(self):
        assert error_kennedy_real(1.3, DEMO_IMP) == pytest.approx(EQ_REAL_13, rel=1e-12)

    def test_kennedy_real_exceeds_half_at_zero_signal(self):
        # dark counts push the click branch above the coin-flip rate at m = 0
        v = error_kennedy_real(0.0, DEMO_IMP)
        assert v == pytest.approx(EQ_REAL_0, rel=1e-12)
        assert v > 0.5

    def test_kennedy_real_degenerates_to_ideal(self):
        clean = ImperfectionParams(extinction_linear=1e12, dark_prob_per_bin=0.0)
        m = np.linspace(0.0, 10.0, 1001)
        gap = np.abs(error_kennedy_real(m, clean) - error_kennedy_ideal(m))
        assert gap.max() < 1e-10

    def test_ordering_and_range_on_dense_grid(self):
        m = np.linspace(0.0, 10.0, 2001)
        e_k, e_s, e_h = error_kennedy_ideal(m), error_sql(m), error_helstrom(m)
        assert np.all(e_h <= e_s + 1e-18)
        assert np.all(e_h <= e_k + 1e-18)
        for e in (e_k, e_s, e_h):
            assert np.all((e > 0.0) & (e <= 0.5))
            assert np.all(np.diff(e) < 0.0)

    def test_helstrom_stable_in_deep_tail(self):
        # 1 - sqrt(1-x) would round to zero here; the stable form must not
        assert error_helstrom(20.0) == pytest.approx(0.25 * math.exp(-80.0), rel=1e-10)

    def test_crossover_location(self):
        f = lambda m: error_kennedy_ideal(m) - error_sql(m)
        lo, hi = 0.1, 1.0
        while hi - lo > 1e-6:
            mid = 0.5 * (lo + hi)
            if (f(lo) > 0) == (f(mid) > 0):
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        assert 0.35 <= root <= 0.45
        assert root == pytest.approx(CROSSOVER_M, abs=2e-6)

    def test_rejects_invalid_mean(self):
        with pytest.raises(ValueError):
            error_sql(-0.1)
        with pytest.raises(ValueError):
            SignalParams(float("nan"))
        with pytest.raises(ValueError):
            SignalParams(-1.0)


class TestExtinctionConversion:
    def test_reference_points(self):
        assert extinction_db_to_linear(0.0) == 1.0
        assert extinction_db_to_linear(30.0) == pytest.approx(1000.0, rel=1e-12)
        assert extinction_db_to_linear(30.969) == pytest.approx(1249.97118058, rel=1e-9)


class TestBoundsCurve:
    def test_single_zero_point(self):
        curve = compute_bounds_curve([0.0], DEMO_IMP)
        assert curve.norm_kennedy_ideal[0] == pytest.approx(1.0, rel=1e-14)
        assert curve.norm_kennedy_real[0] == pytest.approx(EQ_REAL_0 / 0.5, rel=1e-12)

    def test_normalized_real_at_best_point(self):
        curve = compute_bounds_curve([1.3], DEMO_IMP)
        assert curve.norm_kennedy_real[0] == pytest.approx(NORM_REAL_13, rel=1e-12)

    def test_sub_sql_window_points(self):
        curve = compute_bounds_curve([0.5, 1.0, 1.6], DEMO_IMP)
        assert np.all(curve.norm_kennedy_real < 1.0)

    def test_rejects_bad_grids(self):
        with pytest.raises(ValueError):
            compute_bounds_curve([], DEMO_IMP)
        with pytest.raises(ValueError):
            compute_bounds_curve([0.5, 0.4], DEMO_IMP)
        with pytest.raises(ValueError):
            compute_bounds_curve([-0.1, 0.5], DEMO_IMP)

    def test_invariants_on_grid(self):
        curve = compute_bounds_curve(np.linspace(0.0, 5.0, 101), DEMO_IMP)
        for field in ("e_kennedy_ideal", "e_sql", "e_helstrom", "e_kennedy_real"):
            v = getattr(curve, field)
            assert np.all((v >= 0.0) & (v <= 1.0))


class TestImperfectionParams:
    def test_rejects_subunity_extinction(self):
        with pytest.raises(ValueError):
            ImperfectionParams(extinction_linear=0.5, dark_prob_per_bin=0.0)

    def test_rejects_negative_dark(self):
        with pytest.raises(ValueError):
            ImperfectionParams(extinction_linear=10.0, dark_prob_per_bin=-1e-4)


class TestFit:
    M_POINTS = np.array([0.25, 0.5, 1.0, 1.5, 2.0, 2.5])

    def _synthetic(self, noise=None, seed=None):
        err = error_kennedy_real(self.M_POINTS, DEMO_IMP)
        if noise:
            gen = np.random.default_rng(seed)
            err = err * (1.0 + noise * gen.standard_normal(err.size))
        return np.column_stack([self.M_POINTS, err])

    def test_noiseless_recovery(self):
        result = fit_imperfections(self._synthetic())
        c = result.imperfections.extinction_linear
        dc = result.imperfections.dark_prob_per_bin
        assert c == pytest.approx(1250.0, rel=1e-2)
        assert dc == pytest.approx(1.5e-3, rel=1e-2)
        assert result.residual < 1e-10

    def test_noisy_recovery_within_25_percent(self):
        result = fit_imperfections(self._synthetic(noise=0.05, seed=20240229))
        assert result.imperfections.extinction_linear == pytest.approx(1250.0, rel=0.25)
        assert result.imperfections.dark_prob_per_bin == pytest.approx(1.5e-3, rel=0.25)

    def test_weights_accepted(self):
        pts = self._synthetic()
        w = np.ones(len(pts))
        assert fit_imperfections(pts, weights=w).residual < 1e-10

    def test_single_point_underdetermined(self):
        with pytest.raises(FitUnderdeterminedError):
            fit_imperfections([(1.0, 0.01)])

    def test_degenerate_m_underdetermined(self):
        with pytest.raises(FitUnderdeterminedError):
            fit_imperfections([(1.0, 0.01), (1.0, 0.02), (1.0, 0.03)])

    def test_rejects_out_of_range_errors(self):
        with pytest.raises(ValueError):
            fit_imperfections([(0.5, 0.0), (1.0, 0.01)])
        with pytest.raises(ValueError):
            fit_imperfections([(0.5, 0.1), (1.0, 1.0)])
        with pytest.raises(ValueError):
            fit_imperfections([(-0.5, 0.1), (1.0, 0.5)])


def test_signal_params_is_pure_value():
    s = SignalParams(1.3)
    assert bounds._mean(s) == 1.3
    with pytest.raises(Exception):
        s.mean_photons = 2.0  # frozen
