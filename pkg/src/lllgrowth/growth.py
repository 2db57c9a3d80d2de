"""Growth exponents, upper-bound ratios and operator-norm diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .exact import TravelingWaveOracle, oracle_coeffs
from .fock import SobolevScale, htilde_eigenvalues
from .operators import ltilde_matrix, spectral_norm, weighted_operator_norm
from .propagator import NormSeries


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    n: int

    def __iter__(self):
        return iter((self.slope, self.stderr))


def fit_slope(t, values, window: tuple[float, float] | None = None, min_samples: int = 10) -> SlopeFit:
    """Least-squares slope of log(value) against log(t) inside the window."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, values = t[keep], values[keep]
    if t.size < min_samples:
        raise FitError(f"need at least {min_samples} samples in the window, got {t.size}")
    if np.any(values <= 0) or np.any(t <= 0):
        raise FitError("log-log fit needs positive times and values")
    res = linregress(np.log(t), np.log(values))
    return SlopeFit(float(res.slope), float(res.stderr), int(t.size))


def fit_series(series: NormSeries, column: str, window=None) -> SlopeFit:
    return fit_slope(series.t, series.column(column), window)


def bracket(x):
    return np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)


def upper_bound_ratio(t, values, s: float, C0: float) -> np.ndarray:
    """value(t) / (value(0) <C0 t>^s) along the series."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    return values / (values[0] * bracket(C0 * t) ** s)


def check_upper_bound(series: NormSeries, s: float, C0: float, column: str | None = None,
                      drift_tolerance: float = 0.05) -> tuple[float, bool]:
    """sup_t of the upper-bound ratio, and whether it is finite and stable when the horizon halves."""
    column = column or f"bracket_s{float(s):g}"
    t = series.t
    ratio = upper_bound_ratio(t, series.column(column), s, C0)
    full = float(np.max(ratio))
    half = float(np.max(ratio[t <= t[-1] / 2]))
    ok = bool(np.isfinite(full) and abs(full - half) <= drift_tolerance * half)
    return full, ok


def decay_growth_constant(series: NormSeries, k: int) -> float:
    """sup_t (||<z>^k u(t)||^2 - ||<z>^k u_0||^2) / (t ||u_0||^2), the decay-case linear rate."""
    t = series.t
    b = series.column(f"bracket_s{float(k):g}")
    l2 = series.column("l2")
    keep = t > 0
    return float(np.max((b[keep] ** 2 - b[0] ** 2) / (t[keep] * l2[0] ** 2)))


def compare_to_oracle(states, oracle: TravelingWaveOracle) -> float:
    """Max l2 distance between simulated coefficients and the exact solution, phase included."""
    worst = 0.0
    for t, c in states:
        c = np.asarray(c)
        ref = oracle_coeffs(oracle, t, c.size, tail_tolerance=None)
        worst = max(worst, float(np.linalg.norm(c - ref)))
    return worst


def operator_norm_diagnostics(v, t: float, scale: SobolevScale, N: int, alpha: complex,
                              s_values=(0, 1, 2), **kw) -> dict:
    """Weighted norms of the conjugated operator L(t) and of [Lambda, L(t)] Lambda^{-tau}.

    Lambda = diag((2n+3)^rho). Finite-N numbers; compare across N rather
    than reading them as bounds on the full space.
    """
    L = ltilde_matrix(t, scale, v, alpha, N)
    lam = htilde_eigenvalues(N, scale.rho)
    out = {f"norm_L_{s:g}": weighted_operator_norm(L, lam, s, **kw) for s in s_values}
    comm = (lam[:, None] - lam[None, :]) * L * (lam ** -scale.tau)[None, :]
    out["comm_norm"] = spectral_norm(comm, **kw)
    return out


def time_derivative_norm(v, t: float, scale: SobolevScale, N: int, alpha: complex, h: float = 1e-4,
                         s: float = 1.0, **kw) -> float:
    """Norm of the centred difference of L(t) as a map from the s-space to the (s - tau)-space."""
    dL = (ltilde_matrix(t + h, scale, v, alpha, N) - ltilde_matrix(t - h, scale, v, alpha, N)) / (2 * h)
    lam = htilde_eigenvalues(N, scale.rho)
    return weighted_operator_norm(dL, lam, s - scale.tau, s, **kw)
