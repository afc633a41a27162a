"""Closed-form discrimination error rates for the BPSK coherent alphabet.

All formulas are functions of the mean photon number per signal bin,
m = alpha^2, in the detector-referred convention: m counts the photons the
detector would register, with optical loss and quantum efficiency already
folded in (source-referred conversion lives in :mod:`kennedyrx.model`).

Receivers compared here:

* ideal Kennedy receiver (exact-nulling displacement + click/no-click
  detection): error 0.5 * exp(-4m), the no-click probability of the
  displaced bright state |2*alpha>;
* heterodyne receiver, whose error 0.5 * erfc(sqrt(2m)) is the shot-noise
  (standard quantum) limit for Gaussian measurements;
* Helstrom bound 0.5 * (1 - sqrt(1 - exp(-4m))), the quantum-mechanical
  optimum for the binary alphabet;
* Kennedy receiver with finite interference extinction c = I_max/I_min and
  mean dark counts dc per bin:
  0.5 * exp(-4m) + 0.5 * (1 - exp(-dc - 4m/c)).
  This is the conventional fitted form; it omits dark counts in the bright
  term, so it exceeds the exact click model by at most 0.5*dc (the exact
  form is :func:`kennedyrx.model.exact_error_rate`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import erfc


class FitUnderdeterminedError(ValueError):
    """Fit rejected: fewer than two distinct signal levels."""


@dataclass(frozen=True)
class SignalParams:
    """BPSK signal strength: mean photon number m = alpha^2 per signal bin."""

    mean_photons: float

    def __post_init__(self):
        m = self.mean_photons
        if not (isinstance(m, (int, float)) and math.isfinite(m) and m >= 0):
            raise ValueError(f"mean_photons must be finite and >= 0, got {m!r}")


@dataclass(frozen=True)
class ImperfectionParams:
    """Receiver imperfections: linear extinction c >= 1, dark counts per bin."""

    extinction_linear: float
    dark_prob_per_bin: float

    def __post_init__(self):
        if not (math.isfinite(self.extinction_linear) and self.extinction_linear >= 1.0):
            raise ValueError(
                f"extinction_linear must be >= 1, got {self.extinction_linear!r}"
            )
        if not (math.isfinite(self.dark_prob_per_bin) and self.dark_prob_per_bin >= 0.0):
            raise ValueError(
                f"dark_prob_per_bin must be >= 0, got {self.dark_prob_per_bin!r}"
            )


def _mean(s) -> float | np.ndarray:
    """Mean photon number from SignalParams, a scalar, or an array."""
    if isinstance(s, SignalParams):
        return s.mean_photons
    m = np.asarray(s, dtype=np.float64)
    if not (np.all(np.isfinite(m)) and np.all(m >= 0)):
        raise ValueError("mean photon number must be finite and >= 0")
    return float(m) if m.ndim == 0 else m


def poisson_pmf(n: int, mean: float) -> float:
    """P(N = n) for N ~ Poisson(mean), evaluated in log space for stability."""
    n = int(n)
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    if not (math.isfinite(mean) and mean >= 0):
        raise ValueError(f"mean must be finite and >= 0, got {mean!r}")
    if mean == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-mean + n * math.log(mean) - math.lgamma(n + 1))


def error_kennedy_ideal(s) -> float | np.ndarray:
    """Ideal Kennedy receiver error 0.5 * exp(-4m)."""
    return 0.5 * np.exp(-4.0 * _mean(s))


def error_sql(s) -> float | np.ndarray:
    """Shot-noise (heterodyne) limit 0.5 * erfc(sqrt(2m))."""
    # erfc avoids the 1 - erf cancellation for large m
    return 0.5 * erfc(np.sqrt(2.0 * _mean(s)))


def error_helstrom(s) -> float | np.ndarray:
    """Helstrom bound 0.5 * (1 - sqrt(1 - exp(-4m)))."""
    m = _mean(s)
    x = np.exp(-4.0 * m)
    # 1 - sqrt(1-x) == x / (1 + sqrt(1-x)); exact at m = 0, no cancellation
    # for large m where x underflows the subtraction
    root = np.sqrt(-np.expm1(-4.0 * m))
    return 0.5 * x / (1.0 + root)


def error_kennedy_real(s, p: ImperfectionParams) -> float | np.ndarray:
    """Kennedy error with finite extinction and dark counts (fitted form)."""
    m = _mean(s)
    leak = p.dark_prob_per_bin + 4.0 * m / p.extinction_linear
    return 0.5 * np.exp(-4.0 * m) + 0.5 * (-np.expm1(-leak))


def extinction_db_to_linear(db: float) -> float:
    """Convert an extinction ratio in dB to the linear ratio I_max/I_min."""
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class BoundsCurve:
    """Error-rate curves over a grid of m, plus their SQL-normalized ratios."""

    m: np.ndarray
    e_kennedy_ideal: np.ndarray
    e_sql: np.ndarray
    e_helstrom: np.ndarray
    e_kennedy_real: np.ndarray
    norm_kennedy_ideal: np.ndarray
    norm_helstrom: np.ndarray
    norm_kennedy_real: np.ndarray

    def __len__(self) -> int:
        return self.m.size


def compute_bounds_curve(grid, p: ImperfectionParams) -> BoundsCurve:
    """Evaluate all four error formulas and their SQL ratios over ``grid``.

    The grid must be non-empty, strictly increasing and nonnegative.  At
    m = 0 every absolute error is 0.5, so the normalization is regular
    there (e_sql(0) = 0.5).
    """
    m = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    if m.size == 0:
        raise ValueError("grid must be non-empty")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        raise ValueError("grid values must be finite and >= 0")
    if m.size > 1 and not np.all(np.diff(m) > 0):
        raise ValueError("grid must be strictly increasing")
    e_ideal = error_kennedy_ideal(m)
    e_sql_v = error_sql(m)
    e_hel = error_helstrom(m)
    e_real = error_kennedy_real(m, p)
    return BoundsCurve(
        m=m,
        e_kennedy_ideal=e_ideal,
        e_sql=e_sql_v,
        e_helstrom=e_hel,
        e_kennedy_real=e_real,
        norm_kennedy_ideal=e_ideal / e_sql_v,
        norm_helstrom=e_hel / e_sql_v,
        norm_kennedy_real=e_real / e_sql_v,
    )


@dataclass(frozen=True)
class FitResult:
    """Outcome of :func:`fit_imperfections`: parameters and residual sum of squares."""

    imperfections: ImperfectionParams
    residual: float


_FIT_C_RANGE = (1.0, 6.0)  # log10 bounds of the coarse extinction grid
_FIT_DC_RANGE = (-6.0, -1.0)  # log10 bounds of the coarse dark-count grid
_FIT_GRID_POINTS = 41


def fit_imperfections(points, weights=None) -> FitResult:
    """Fit (extinction, dark counts) to measured (m, error) points.

    Minimizes the weighted sum of squared log-residuals
    sum_i w_i * (log e'(m_i; c, dc) - log err_i)^2 -- log space weights the
    low-error tail where extinction dominates.  A coarse log-spaced grid
    over c in [10, 1e6] x dc in [1e-6, 1e-1] seeds a Nelder-Mead refinement
    in (log10 c, log10 dc).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a sequence of (m, error) pairs")
    if pts.shape[0] < 2:
        raise FitUnderdeterminedError("need at least 2 points to fit (c, dc)")
    m = pts[:, 0]
    err = pts[:, 1]
    if np.unique(m).size < 2:
        raise FitUnderdeterminedError("all points share one m; fit is underdetermined")
    if np.any(m <= 0):
        raise ValueError("all m must be > 0")
    if np.any(err <= 0) or np.any(err >= 1):
        raise ValueError("all measured errors must lie in (0, 1)")
    if weights is None:
        w = np.ones_like(m)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != m.shape or np.any(w < 0):
            raise ValueError("weights must be nonnegative, one per point")

    log_err = np.log(err)
    bright = 0.5 * np.exp(-4.0 * m)

    def ssr(log10_c: float, log10_dc: float) -> float:
        if log10_c < 0.0:  # keep c >= 1
            return math.inf
        c = 10.0 ** log10_c
        dc = 10.0 ** log10_dc
        model = bright + 0.5 * (-np.expm1(-(dc + 4.0 * m / c)))
        r = np.log(model) - log_err
        return float(np.sum(w * r * r))

    # coarse grid seed
    cs = np.linspace(*_FIT_C_RANGE, _FIT_GRID_POINTS)
    dcs = np.linspace(*_FIT_DC_RANGE, _FIT_GRID_POINTS)
    best = (math.inf, cs[0], dcs[0])
    for lc in cs:
        for ldc in dcs:
            v = ssr(lc, ldc)
            if v < best[0]:
                best = (v, lc, ldc)

    res = minimize(
        lambda x: ssr(x[0], x[1]),
        x0=np.array(best[1:]),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-16, "maxiter": 4000, "maxfev": 8000},
    )
    lc, ldc = (res.x if res.fun <= best[0] else np.array(best[1:]))
    residual = min(float(res.fun), best[0])
    params = ImperfectionParams(
        extinction_linear=10.0 ** float(lc), dark_prob_per_bin=10.0 ** float(ldc)
    )
    return FitResult(imperfections=params, residual=residual)
