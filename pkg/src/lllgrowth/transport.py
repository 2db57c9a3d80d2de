"""Free transport u(t, x) = u_0(x - eps t) on the line, measured in oscillator Sobolev scales.

The norm used is ||<x>^{rho s} u||_{L^2} + ||(-d_x^2)^{rho s / 2} u||_{L^2}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .fock import SobolevScale
from .growth import bracket, fit_slope


class GridOverflow(ValueError):
    pass


@dataclass(frozen=True)
class Profile1D:
    x: np.ndarray
    samples: np.ndarray
    epsilon: float = 1.0
    analytic: str | None = None

    @property
    def half_width(self) -> float:
        return float(self.x[-1])

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def support(self) -> float:
        """Radius outside which |u_0| < 1e-14."""
        big = np.abs(self.x[np.abs(self.samples) >= 1e-14])
        return float(big.max()) if big.size else 0.0


def gaussian_profile(epsilon: float = 1.0, half_width: float = 20.0, spacing: float = 0.05) -> Profile1D:
    """pi^{-1/4} exp(-x^2/2) on a uniform grid over [-half_width, half_width)."""
    points = 2 * int(np.ceil(half_width / spacing))
    x = np.linspace(-half_width, half_width, points, endpoint=False)
    u0 = np.pi ** -0.25 * np.exp(-x ** 2 / 2)
    if abs(u0[0]) > 1e-14:
        raise ValueError("grid does not cover the Gaussian's support")
    return Profile1D(x, u0, epsilon, analytic="gaussian")


def homogeneous_seminorm(p: Profile1D, order: float) -> float:
    """||(-d_x^2)^{order/2} u_0|| via the discrete Fourier multiplier |xi|^order."""
    n = p.x.size
    xi = 2 * np.pi * np.fft.fftfreq(n, d=p.spacing)
    U = np.fft.fft(p.samples)
    # discrete Parseval: sum |u|^2 h = (h / n) sum |U|^2
    return float(np.sqrt(p.spacing / n * np.sum(np.abs(xi) ** (2 * order) * np.abs(U) ** 2)))


def weighted_part(p: Profile1D, shift: float, order: float) -> float:
    """||<x>^order u_0(. - shift)||, integrated in the co-moving variable y = x - shift."""
    integrand = bracket(p.x + shift) ** (2 * order) * np.abs(p.samples) ** 2
    return float(np.sqrt(trapezoid(integrand, p.x)))


def transport_norm(p: Profile1D, t: float, scale: SobolevScale, parts: bool = False):
    shift = p.epsilon * t
    if abs(shift) + p.support > p.half_width:
        raise GridOverflow(f"shift {shift:g} leaves the domain [-{p.half_width:g}, {p.half_width:g}]")
    order = scale.rho * scale.s
    w = weighted_part(p, shift, order)
    h = homogeneous_seminorm(p, order)
    return (w, h) if parts else w + h


@dataclass
class TransportCheck:
    slope: float
    stderr: float
    c_lower: float
    c_upper: float
    bounds_pass: bool
    ratios: np.ndarray


def transport_growth_check(p: Profile1D, scale: SobolevScale, times, tail_fraction: float = 0.5,
                           stability: float = 0.05) -> TransportCheck:
    """Log-log slope on the tail of the time window plus two-sided bound constants.

    The constants c, C are min/max of ||u(t)|| / (<eps t>^{s rho} ||u_0||);
    they must move by less than `stability` when the window is cut in half.
    """
    times = np.asarray(times, dtype=float)
    norms = np.array([transport_norm(p, t, scale) for t in times])
    n0 = transport_norm(p, 0.0, scale)
    expo = scale.s * scale.rho
    ratios = norms / (bracket(p.epsilon * times) ** expo * n0)
    t_lo, t_hi = times.min(), times.max()
    split = np.exp(np.log(t_lo) + (1 - tail_fraction) * (np.log(t_hi) - np.log(t_lo)))
    if expo == 0:
        fit = fit_slope(times, norms, (split, t_hi), min_samples=3)
    else:
        fit = fit_slope(times, norms, (split, t_hi))
    half = times <= np.exp(0.5 * (np.log(t_lo) + np.log(t_hi)))
    c_lo, c_hi = ratios.min(), ratios.max()
    c_lo_half, c_hi_half = ratios[half].min(), ratios[half].max()
    stable = abs(c_lo - c_lo_half) <= stability * c_lo_half and abs(c_hi - c_hi_half) <= stability * c_hi_half
    ok = bool(stable and c_lo > 0 and np.isfinite(c_hi))
    return TransportCheck(fit.slope, fit.stderr, float(c_lo), float(c_hi), ok, ratios)
