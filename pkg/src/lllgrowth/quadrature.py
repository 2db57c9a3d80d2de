"""Quadrature over the complex plane, used as an independent oracle.

Integrals against Lebesgue measure on C are done in polar form: Gauss-Laguerre
in u = r^2 (weight e^{-c u}) times a uniform angular rule. Functions are
"samplers": callables taking a complex ndarray and returning values of the
same shape.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize
from scipy.special import roots_laguerre

Sampler = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PolarGrid:
    """Polar product rule for integrals of (polynomial) * exp(-decay |z|^2).

    Exact for z^a conj(z)^b exp(-decay |z|^2) with a + b < 2 * order and
    |a - b| < n_angular.
    """

    order: int = 64
    n_angular: int = 256
    decay: float = 1.0
    points: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x, w = roots_laguerre(self.order)
        u = x / self.decay
        with np.errstate(under="ignore"):
            radial_w = np.exp(np.log(w) + x) / (2.0 * self.decay)
        theta = 2.0 * np.pi * np.arange(self.n_angular) / self.n_angular
        pts = np.sqrt(u)[:, None] * np.exp(1j * theta)[None, :]
        wts = radial_w[:, None] * np.full(self.n_angular, 2.0 * np.pi / self.n_angular)[None, :]
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def with_decay(self, decay: float) -> "PolarGrid":
        return PolarGrid(self.order, self.n_angular, decay)

    def integrate(self, f: Sampler) -> complex:
        return complex(np.sum(self.weights * f(self.points)))


DEFAULT_GRID = PolarGrid()


def quad_inner_product(f: Sampler, g: Sampler, grid: PolarGrid = DEFAULT_GRID) -> complex:
    """Integral of f(z) conj(g(z)) dL(z)."""
    z = grid.points
    return complex(np.sum(grid.weights * f(z) * np.conj(g(z))))


def project(f: Sampler, z, grid: PolarGrid = DEFAULT_GRID):
    """(Pi f)(z) through the reproducing kernel (1/pi) e^{-|z|^2/2 + conj(w) z - |w|^2/2}."""
    z = np.asarray(z, dtype=complex)
    w = grid.points.ravel()
    fw = (grid.weights.ravel() * f(w) * np.exp(-np.abs(w) ** 2 / 2))
    zz = z.reshape(-1)
    vals = np.exp(np.outer(zz, np.conj(w))) @ fw
    out = np.exp(-np.abs(zz) ** 2 / 2) * vals / np.pi
    out = out.reshape(z.shape)
    return out[()] if out.ndim == 0 else out


def apply_H_after_project(f: Sampler, z, grid: PolarGrid = DEFAULT_GRID):
    """H(Pi f)(z), differentiating the kernel analytically: H_z K(z, w) = (2 + 2 z conj(w)) K(z, w)."""
    z = np.asarray(z, dtype=complex)
    w = grid.points.ravel()
    fw = grid.weights.ravel() * f(w) * np.exp(-np.abs(w) ** 2 / 2)
    zz = z.reshape(-1)
    K = np.exp(np.outer(zz, np.conj(w)))
    vals = K @ (2.0 * fw) + 2.0 * zz * (K @ (np.conj(w) * fw))
    out = (np.exp(-np.abs(zz) ** 2 / 2) * vals / np.pi).reshape(z.shape)
    return out[()] if out.ndim == 0 else out


def lp_norm(f: Sampler, p: float, grid: PolarGrid = DEFAULT_GRID) -> float:
    """||f||_{L^p(C)} for f of Bargmann type (|f| ~ poly * e^{-|z|^2/2}).

    The radial rule is rescaled to the decay e^{-p|z|^2/2} of |f|^p. For
    p = inf the grid maximum is refined by a local search.
    """
    if np.isinf(p):
        z = grid.points
        vals = np.abs(f(z))
        i = np.unravel_index(np.argmax(vals), vals.shape)
        best = float(vals[i])
        starts = [z[i], 0j]
        for z0 in starts:
            res = minimize(lambda xy: -float(np.abs(f(np.array(xy[0] + 1j * xy[1])))),
                           x0=[z0.real, z0.imag], method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
            best = max(best, -float(res.fun))
        return best
    if p < 1:
        raise ValueError("p must be >= 1")
    g = grid.with_decay(grid.decay * p / 2.0)
    return float(np.sum(g.weights * np.abs(f(g.points)) ** p) ** (1.0 / p))


def basis_sampler(n: int) -> Sampler:
    from .fock import basis_values

    return lambda z: basis_values(z, n + 1)[n]


def state_sampler(c) -> Sampler:
    from .fock import evaluate

    return lambda z: evaluate(c, z)


def matrix_element_quad(W: Callable[[float, np.ndarray], np.ndarray], t: float, m: int, n: int,
                        grid: PolarGrid = DEFAULT_GRID) -> complex:
    """Integral of conj(phi_m) W(t, z) phi_n over C."""
    from .fock import basis_values

    z = grid.points
    phis = basis_values(z, max(m, n) + 1)
    return complex(np.sum(grid.weights * np.conj(phis[m]) * W(t, z) * phis[n]))


def wirtinger(f: Sampler, j: int, k: int, h: float | None = None) -> Sampler:
    """d_zbar^j d_z^k f by nested central differences.

    d_z = (d_x - i d_y)/2 and d_zbar = (d_x + i d_y)/2. The default step is
    1e-4 up to second order and grows with the order to balance roundoff.
    """
    order = j + k
    if order == 0:
        return f
    if h is None:
        h = 1e-4 if order <= 2 else 10.0 ** (-16.0 / (order + 2))

    def dz(g, sign):
        def out(z):
            z = np.asarray(z, dtype=complex)
            dx = (g(z + h) - g(z - h)) / (2 * h)
            dy = (g(z + 1j * h) - g(z - 1j * h)) / (2 * h)
            return 0.5 * (dx + sign * 1j * dy)

        return out

    g = f
    for _ in range(k):
        g = dz(g, -1)
    for _ in range(j):
        g = dz(g, +1)
    return g


class GaussPoly:
    """Sum of a[p, q] z^p conj(z)^q times exp(-decay |z|^2), with exact Wirtinger calculus."""

    def __init__(self, coeffs: dict, decay: float = 1.0):
        self.coeffs = {key: complex(val) for key, val in coeffs.items() if val != 0}
        self.decay = float(decay)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        zb = np.conj(z)
        acc = np.zeros(z.shape, dtype=complex)
        for (p, q), a in self.coeffs.items():
            acc = acc + a * z ** p * zb ** q
        return acc * np.exp(-self.decay * np.abs(z) ** 2)

    def _combine(self, terms):
        out: dict = {}
        for key, val in terms:
            out[key] = out.get(key, 0) + val
        return GaussPoly(out, self.decay)

    def dz(self) -> "GaussPoly":
        terms = []
        for (p, q), a in self.coeffs.items():
            if p:
                terms.append(((p - 1, q), p * a))
            terms.append(((p, q + 1), -self.decay * a))
        return self._combine(terms)

    def dzbar(self) -> "GaussPoly":
        terms = []
        for (p, q), a in self.coeffs.items():
            if q:
                terms.append(((p, q - 1), q * a))
            terms.append(((p + 1, q), -self.decay * a))
        return self._combine(terms)

    def derivative(self, j: int, k: int) -> "GaussPoly":
        g = self
        for _ in range(k):
            g = g.dz()
        for _ in range(j):
            g = g.dzbar()
        return g

    def times_abs2(self) -> "GaussPoly":
        return GaussPoly({(p + 1, q + 1): a for (p, q), a in self.coeffs.items()}, self.decay)

    def __add__(self, other: "GaussPoly") -> "GaussPoly":
        if other.decay != self.decay:
            raise ValueError("decay mismatch")
        return self._combine(list(self.coeffs.items()) + list(other.coeffs.items()))

    def scaled(self, c: complex) -> "GaussPoly":
        return GaussPoly({key: c * a for key, a in self.coeffs.items()}, self.decay)

    def apply_H(self) -> "GaussPoly":
        """H f = -4 d_z d_zbar f + |z|^2 f."""
        return self.dzbar().dz().scaled(-4.0) + self.times_abs2()

    @classmethod
    def modulus_squared(cls, v) -> "GaussPoly":
        """|V|^2 for V = sum_n v_n phi_n."""
        from .fock import log_factorial

        v = np.asarray(v, dtype=complex)
        nz = np.flatnonzero(v)
        lf = log_factorial(np.arange(v.size))
        coeffs = {}
        for p in nz:
            for q in nz:
                coeffs[(int(p), int(q))] = v[p] * np.conj(v[q]) * np.exp(-0.5 * (lf[p] + lf[q])) / np.pi
        return cls(coeffs, 1.0)
