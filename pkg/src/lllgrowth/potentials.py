"""Time-dependent potentials W(t, z) and their matrices on the Fock basis.

Kinds:
    traveling_wave  W = |L_{-2 delta t} R_{alpha t} V|^2 with V = sqrt(eps)(phi_0/2 - i sqrt(3)/2 phi_1)
    modulus         the same construction for an arbitrary V (coefficients v) and drift
    gaussian_decay  W = eps (1 + cos t)/2 exp(-|z - center|^2 / width^2)
    custom          any real sampler (t, z) -> W, assembled by quadrature only
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .fock import FockCoefficients, as_coeffs, basis_values
from .operators import (
    conjugated_generator,
    displacement_columns,
    displacement_matrix,
    poisson_tail,
    potential_matrix,
    rotation_phases,
    TruncationWarning,
)
from .quadrature import DEFAULT_GRID, GaussPoly, PolarGrid, wirtinger

import warnings

TRAVELING_WAVE = "traveling_wave"
MODULUS = "modulus"
GAUSSIAN_DECAY = "gaussian_decay"
CUSTOM = "custom"
KINDS = (TRAVELING_WAVE, MODULUS, GAUSSIAN_DECAY, CUSTOM)

SQRT3 = np.sqrt(3.0)


def traveling_wave_drift(epsilon: float) -> float:
    return SQRT3 * epsilon / (32.0 * np.pi)


def v_coefficients(epsilon: float) -> np.ndarray:
    """V = sqrt(eps) (phi_0 / 2 - i sqrt(3)/2 phi_1)."""
    return np.sqrt(epsilon) * np.array([0.5, -0.5j * SQRT3])


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    epsilon: float = 1.0
    delta: float = 0.0
    v: tuple = ()
    drift: complex = 0.0
    width: float = 1.0
    center: complex = 0.0
    sampler: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in (TRAVELING_WAVE, GAUSSIAN_DECAY) and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.kind == CUSTOM and self.sampler is None:
            raise ValueError("custom potentials need a sampler")
        if self.kind == GAUSSIAN_DECAY and not self.width > 0:
            raise ValueError("width must be positive")
        if self.kind == TRAVELING_WAVE:
            object.__setattr__(self, "v", tuple(v_coefficients(self.epsilon)))
            object.__setattr__(self, "drift", traveling_wave_drift(self.epsilon))

    @property
    def alpha(self) -> complex:
        return self.drift

    @classmethod
    def traveling_wave(cls, epsilon: float = 1.0, delta: float = 0.0) -> "PotentialSpec":
        return cls(TRAVELING_WAVE, epsilon=epsilon, delta=delta)

    @classmethod
    def modulus(cls, v, drift: complex = 0.0, delta: float = 0.0) -> "PotentialSpec":
        v = as_coeffs(v)
        return cls(MODULUS, epsilon=float(np.sum(np.abs(v) ** 2)), delta=delta, v=tuple(v), drift=drift)

    @classmethod
    def gaussian_decay(cls, epsilon: float = 1.0, width: float = 1.0, center: complex = 0.0) -> "PotentialSpec":
        return cls(GAUSSIAN_DECAY, epsilon=epsilon, width=width, center=center)

    @classmethod
    def custom(cls, sampler, delta: float = 0.0) -> "PotentialSpec":
        return cls(CUSTOM, delta=delta, sampler=sampler)

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls(MODULUS, epsilon=0.0, v=(0j,))


def envelope(t: float) -> float:
    """g(t) = (1 + cos t) / 2."""
    return 0.5 * (1.0 + np.cos(t))


def _moving_frame(spec: PotentialSpec, t: float, z):
    """w = e^{-2i delta t} z + drift t."""
    return np.exp(-2j * spec.delta * t) * np.asarray(z, dtype=complex) + spec.drift * t


def traveling_wave_value(spec: PotentialSpec, t: float, z):
    if spec.kind != TRAVELING_WAVE:
        raise ValueError("traveling_wave_value needs a traveling_wave spec")
    w = _moving_frame(spec, t, z)
    val = spec.epsilon / (4 * np.pi) * np.abs(1 - 1j * SQRT3 * w) ** 2 * np.exp(-np.abs(w) ** 2)
    return val[()] if np.ndim(val) == 0 else val


def gaussian_decay_value(spec: PotentialSpec, t: float, z):
    if spec.kind != GAUSSIAN_DECAY:
        raise ValueError("gaussian_decay_value needs a gaussian_decay spec")
    z = np.asarray(z, dtype=complex)
    val = spec.epsilon * envelope(t) * np.exp(-np.abs(z - spec.center) ** 2 / spec.width ** 2)
    return val[()] if np.ndim(val) == 0 else val


def _base_profile(spec: PotentialSpec) -> GaussPoly:
    """Profile F with W(t, z) = a(t) F(w) in the moving variable w."""
    if spec.kind in (TRAVELING_WAVE, MODULUS):
        return GaussPoly.modulus_squared(np.array(spec.v))
    if spec.kind == GAUSSIAN_DECAY:
        return GaussPoly({(0, 0): spec.epsilon}, decay=1.0 / spec.width ** 2)
    raise ValueError(f"no analytic profile for {spec.kind}")


def potential_value(spec: PotentialSpec, t: float, z):
    """W(t, z) for any kind."""
    if spec.kind == TRAVELING_WAVE:
        return traveling_wave_value(spec, t, z)
    if spec.kind == GAUSSIAN_DECAY:
        return gaussian_decay_value(spec, t, z)
    if spec.kind == MODULUS:
        val = np.real(_base_profile(spec)(_moving_frame(spec, t, z)))
        return val[()] if np.ndim(val) == 0 else val
    return spec.sampler(t, np.asarray(z, dtype=complex))


def potential_coeffs(spec: PotentialSpec, t: float, N: int, tail_tolerance: float | None = None) -> FockCoefficients:
    """Coefficients of V_t = L_{-2 delta t} R_{drift t} V, so that W(t) = |V_t|^2."""
    if spec.kind not in (TRAVELING_WAVE, MODULUS):
        raise ValueError("potential_coeffs needs a traveling_wave or modulus spec")
    v = np.array(spec.v, dtype=complex)
    beta = spec.drift * t
    if tail_tolerance is not None and poisson_tail(abs(beta) ** 2, N) > tail_tolerance:
        warnings.warn(f"Poisson tail of |beta|^2={abs(beta) ** 2:.4g} at N={N} exceeds {tail_tolerance:.1e}",
                      TruncationWarning, stacklevel=2)
    cols = displacement_columns(beta, N, v.size) if v.size <= 4 else displacement_matrix(beta, N)[:, :v.size]
    out = cols @ v[: cols.shape[1]]
    return FockCoefficients(rotation_phases(-2.0 * spec.delta * t, N) * out)


def potential_derivative(spec: PotentialSpec, t: float, j: int, k: int):
    """Sampler for d_zbar^j d_z^k W(t, .). Analytic except for custom kinds."""
    if spec.kind == CUSTOM:
        return wirtinger(lambda z: spec.sampler(t, z), j, k)
    F = _base_profile(spec).derivative(j, k)
    if spec.kind == GAUSSIAN_DECAY:
        amp = envelope(t)
        return lambda z: amp * F(np.asarray(z, dtype=complex) - spec.center)
    # w is holomorphic in z with dw/dz = e^{-2i delta t}
    phase = np.exp(2j * spec.delta * t * (j - k))
    return lambda z: phase * F(_moving_frame(spec, t, z))


def potential_center(spec: PotentialSpec, t: float) -> complex:
    """Point z where the moving variable w vanishes (the potential's anchor)."""
    if spec.kind in (TRAVELING_WAVE, MODULUS):
        return complex(-spec.drift * t * np.exp(2j * spec.delta * t))
    if spec.kind == GAUSSIAN_DECAY:
        return complex(spec.center)
    return 0j


def derivative_sup_estimate(spec: PotentialSpec, t: float, j: int, k: int, radius: float = 6.0,
                            spacing: float = 0.05, weight_power: float = 0.0, h: float | None = None) -> float:
    """Grid maximum of <z>^{weight_power} |d_zbar^j d_z^k W(t, .)| by finite differences.

    The grid is centred on the potential's anchor so that the estimate is
    exactly covariant under the traveling wave's motion.
    """
    if j > 3 or k > 3:
        raise ValueError("derivative orders above 3 are not supported")
    centre = potential_center(spec, t) if weight_power == 0 else 0j
    W = lambda z: potential_value(spec, t, z)
    d = wirtinger(W, j, k, h)
    if weight_power:
        f = lambda z: (1 + np.abs(z) ** 2) ** (weight_power / 2) * np.abs(d(z))
    else:
        f = lambda z: np.abs(d(z))
    xs = np.arange(-radius, radius + spacing / 2, spacing)
    Z = centre + xs[:, None] + 1j * xs[None, :]
    vals = f(Z)
    i = np.unravel_index(np.argmax(vals), vals.shape)
    best = float(vals[i])
    z0 = Z[i] - centre
    res = minimize(lambda p: -float(f(np.array(centre + p[0] + 1j * p[1]))), x0=[z0.real, z0.imag],
                   method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-13, "maxiter": 1000})
    return max(best, -float(res.fun))


class GeneratorFactory:
    """t -> matrix of u -> Pi(W(t) u) on phi_0..phi_{N-1}."""

    def __init__(self, spec: PotentialSpec, N: int, tail_tolerance: float | None = None,
                 grid: PolarGrid = DEFAULT_GRID):
        self.spec = spec
        self.N = N
        self.tail_tolerance = tail_tolerance
        if spec.kind in (TRAVELING_WAVE, MODULUS):
            self._v = np.array(spec.v, dtype=complex)
            self._base = potential_matrix(self._v, N)
        elif spec.kind == GAUSSIAN_DECAY:
            n = np.arange(N)
            # <phi_n, e^{-|z|^2/w^2} phi_n> = (1 + w^{-2})^{-(n+1)}
            diag = (1.0 + spec.width ** -2) ** (-(n + 1.0))
            base = np.diag(diag).astype(complex) * spec.epsilon
            if spec.center != 0:
                D = displacement_matrix(-spec.center, N)
                base = D @ base @ D.conj().T
            self._base = base
        else:
            self._grid = grid
            phis = basis_values(grid.points.ravel(), N)
            self._phis = phis
            self._w = grid.weights.ravel()

    def __call__(self, t: float) -> np.ndarray:
        spec = self.spec
        if spec.kind in (TRAVELING_WAVE, MODULUS):
            return conjugated_generator(self._v, spec.drift * t, -2.0 * spec.delta * t, self.N,
                                        self.tail_tolerance, base=self._base)
        if spec.kind == GAUSSIAN_DECAY:
            return envelope(t) * self._base
        W = spec.sampler(t, self._grid.points.ravel())
        left = np.conj(self._phis) * (self._w * W)[None, :]
        return left @ self._phis.T
