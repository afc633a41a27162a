"""Receiver-model click rates, exact error form, and sub-SQL window."""

import numpy as np
import pytest

from kennedyrx.bounds import SignalParams, error_kennedy_ideal, error_sql
from kennedyrx.model import (
    DetectorModel,
    DisplacementModel,
    ReceiverModel,
    TimingConfig,
    click_probability,
    default_receiver,
    exact_error_rate,
    mean_counts,
    sub_sql_window,
)

# mpmath oracle values (40 dps), demonstration parameters c=1250, dc=1.5e-3
EXACT_13 = 0.0055761540773493707606
CLICK_BRIGHT_13 = 0.99449170422283729957
CLICK_NULLED_13 = 0.0056440123775360410914
WINDOW_LO = 0.39363208745681074124
WINDOW_HI = 1.7593974231573286252


def test_timing_bin_duration():
    t = TimingConfig(rep_rate_hz=100_000.0, n_bits=10)
    assert t.bin_duration_ps == 5_000_000
    assert t.span_ps == 50_000_000


def test_timing_validation():
    with pytest.raises(ValueError):
        TimingConfig(rep_rate_hz=0.0, n_bits=1)
    with pytest.raises(ValueError):
        TimingConfig(rep_rate_hz=1e5, n_bits=0)
    with pytest.raises(ValueError):
        TimingConfig(rep_rate_hz=1e5, n_bits=1, start_offset_ps=-1)


def test_detector_validation():
    with pytest.raises(ValueError):
        DetectorModel(efficiency=1.2)
    with pytest.raises(ValueError):
        DetectorModel(dark_rate_hz=-1.0)
    with pytest.raises(ValueError):
        DetectorModel(timing_resolution_ps=0)


def test_displacement_validation():
    with pytest.raises(ValueError):
        DisplacementModel(transmissivity=0.0)
    with pytest.raises(ValueError):
        DisplacementModel(extinction_linear=0.9)


def test_receiver_defaults_match_demonstration_setup():
    r = default_receiver(n_bits=100)
    assert r.detector.efficiency == 0.65
    assert r.detector.dark_rate_hz == 300.0
    assert r.detector.dead_time_ps == 10_000
    assert r.detector.timing_resolution_ps == 25
    assert r.displacement.extinction_linear == 1250.0
    assert r.timing.bin_duration_ps == 5_000_000
    assert r.dark_prob_per_bin == pytest.approx(1.5e-3, rel=1e-12)


def test_mean_counts_bright_and_nulled():
    r = default_receiver(n_bits=100)
    s = SignalParams(1.3)
    assert mean_counts(1, s, r) == pytest.approx(5.2015, rel=1e-12)
    assert mean_counts(0, s, r) == pytest.approx(5.66e-3, rel=1e-12)


def test_mean_counts_vacuum():
    r = default_receiver(n_bits=100, detector=DetectorModel(dark_rate_hz=0.0))
    assert mean_counts(0, SignalParams(0.0), r) == 0.0
    assert mean_counts(1, SignalParams(0.0), r) == 0.0


def test_mean_counts_bright_never_dimmer():
    for m in (0.0, 0.3, 1.3, 4.0):
        for c in (1.0, 20.0, 1250.0):
            r = default_receiver(
                n_bits=10, displacement=DisplacementModel(extinction_linear=c)
            )
            s = SignalParams(m)
            assert mean_counts(1, s, r) >= mean_counts(0, s, r)


def test_mean_counts_rejects_bad_bit():
    r = default_receiver(n_bits=10)
    with pytest.raises(ValueError):
        mean_counts(2, SignalParams(1.0), r)


def test_click_probability():
    assert click_probability(0.0) == 0.0
    assert click_probability(5.2015) == pytest.approx(CLICK_BRIGHT_13, rel=1e-12)
    assert click_probability(5.66e-3) == pytest.approx(CLICK_NULLED_13, rel=1e-12)
    with pytest.raises(ValueError):
        click_probability(-0.1)


def test_exact_error_rate_oracle():
    r = default_receiver(n_bits=100)
    assert exact_error_rate(SignalParams(1.3), r) == pytest.approx(EXACT_13, rel=1e-12)


def test_exact_error_degenerates_to_ideal():
    r = default_receiver(
        n_bits=100,
        detector=DetectorModel(dark_rate_hz=0.0),
        displacement=DisplacementModel(extinction_linear=1e12),
    )
    m = np.linspace(0.0, 10.0, 501)
    assert np.abs(exact_error_rate(m, r) - error_kennedy_ideal(m)).max() < 1e-10


def test_exact_error_bounded():
    r = default_receiver(n_bits=100)
    m = np.linspace(0.0, 10.0, 501)
    v = exact_error_rate(m, r)
    assert np.all((v >= 0.0) & (v <= 1.0))
    assert np.all(v < 0.5 + r.dark_prob_per_bin)


def test_exact_error_balanced_at_zero_signal():
    # both bins see the same dark mean at m = 0, so the channel is a fair coin
    r = default_receiver(n_bits=100)
    assert exact_error_rate(SignalParams(0.0), r) == pytest.approx(0.5, abs=1e-15)


def test_exact_model_normalized_minimum():
    r = default_receiver(n_bits=100)
    grid = np.arange(0.05, 3.0 + 1e-9, 0.05)
    ratio = exact_error_rate(grid, r) / error_sql(grid)
    i = int(np.argmin(ratio))
    assert 1.0 <= grid[i] <= 1.4
    assert 0.45 <= ratio[i] <= 0.55


def test_closed_form_gap_bounded_by_half_dark_prob():
    from kennedyrx.bounds import error_kennedy_real

    r = default_receiver(n_bits=100)
    m = np.linspace(0.0, 5.0, 1001)
    gap = np.abs(error_kennedy_real(m, r.imperfections()) - exact_error_rate(m, r))
    assert gap.max() <= 0.5 * r.dark_prob_per_bin


def test_source_referred_equals_rescaled_detector_referred():
    det = default_receiver(n_bits=100, photon_reference="detector_referred")
    src = default_receiver(n_bits=100, photon_reference="source_referred")
    eta_t = src.detector.efficiency * src.displacement.transmissivity
    for m in (0.1, 0.7, 1.3, 3.2):
        a = exact_error_rate(SignalParams(m), src)
        b = exact_error_rate(SignalParams(m * eta_t), det)
        assert a == b  # bit-exact: source-referred folds into an m rescale


def test_photon_reference_validation():
    with pytest.raises(ValueError):
        ReceiverModel(photon_reference="sideways_referred")


class TestSubSqlWindow:
    def test_demonstration_parameters(self):
        r = default_receiver(n_bits=100)
        window = sub_sql_window(r)
        assert window is not None
        lo, hi = window
        assert lo == pytest.approx(WINDOW_LO, abs=1e-9)
        assert hi == pytest.approx(WINDOW_HI, abs=1e-9)
        assert lo < 0.5 and hi > 1.6  # covers the high-sensitivity range

    def test_endpoints_are_roots(self):
        r = default_receiver(n_bits=100)
        lo, hi = sub_sql_window(r)
        for m in (lo, hi):
            assert abs(exact_error_rate(SignalParams(m), r) - error_sql(m)) < 1e-12

    def test_low_extinction_has_no_window(self):
        r = default_receiver(
            n_bits=100, displacement=DisplacementModel(extinction_linear=10.0)
        )
        assert sub_sql_window(r) is None

    def test_ideal_receiver_window_reaches_bracket_end(self):
        r = default_receiver(
            n_bits=100,
            detector=DetectorModel(dark_rate_hz=0.0),
            displacement=DisplacementModel(extinction_linear=1e12),
        )
        lo, hi = sub_sql_window(r)
        assert 0.35 <= lo <= 0.45  # ideal-Kennedy crossover
        assert hi == 10.0
