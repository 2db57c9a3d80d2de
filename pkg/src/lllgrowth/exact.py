"""Closed-form traveling-wave solution u(t) = e^{-i(lam + 2 delta) t} L_{-2 delta t} R_{alpha t} U."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockCoefficients, SobolevScale
from .operators import TruncationError, displacement_columns, poisson_tail, rotation_phases
from .potentials import SQRT3, traveling_wave_drift
from .propagator import NormSeries, norm_row, series_columns


@dataclass(frozen=True)
class TravelingWaveOracle:
    epsilon: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @property
    def u_coeffs(self) -> np.ndarray:
        return np.sqrt(self.epsilon) * np.array([0.5, 0.5j * SQRT3])

    @property
    def lam(self) -> float:
        return 7.0 * self.epsilon / (32.0 * np.pi)

    @property
    def mu(self) -> float:
        return -self.lam

    @property
    def alpha(self) -> float:
        return traveling_wave_drift(self.epsilon)


def adaptive_size(oracle: TravelingWaveOracle, t: float) -> int:
    """Basis size keeping the coherent tail of R_{alpha t} negligible."""
    x = (oracle.alpha * t) ** 2
    return int(math.ceil(x + 10.0 * math.sqrt(x + 1.0) + 32))


def oracle_coeffs(oracle: TravelingWaveOracle, t: float, N: int | None = None,
                  tail_tolerance: float | None = 1e-12) -> FockCoefficients:
    N = adaptive_size(oracle, t) if N is None else N
    beta = oracle.alpha * t
    if tail_tolerance is not None:
        tail = poisson_tail(beta ** 2, N)
        if tail > tail_tolerance:
            raise TruncationError(f"Poisson tail {tail:.3e} at N={N} exceeds {tail_tolerance:.1e}")
    cols = displacement_columns(beta, N, 2)
    u = cols @ oracle.u_coeffs
    u = u * rotation_phases(-2.0 * oracle.delta * t, N)
    return FockCoefficients(np.exp(-1j * (oracle.lam + 2 * oracle.delta) * t) * u)


def oracle_moment1(oracle: TravelingWaveOracle, t: float) -> float:
    """Integral of |z|^2 |u(t)|^2: eps (7/4 + alpha^2 t^2)."""
    return oracle.epsilon * (1.75 + (oracle.alpha * t) ** 2)


def oracle_norm_series(oracle: TravelingWaveOracle, times, tau: float = 0.5, s_list=(1.0,), k_list=(1,),
                       tail_tolerance: float = 1e-12) -> NormSeries:
    """Norm series of the exact solution, sized per time point; no time stepping."""
    SobolevScale(tau)  # validates tau
    series = NormSeries(series_columns(k_list, s_list),
                        header={"source": "oracle", "epsilon": oracle.epsilon, "delta": oracle.delta, "tau": tau})
    for t in times:
        N = adaptive_size(oracle, t)
        c = oracle_coeffs(oracle, t, N, tail_tolerance)
        series.append(norm_row(float(t), c, tau, k_list, s_list))
    return series
