"""Truncated Bargmann-Fock states and the norms measured on them.

A state u = sum_n c_n phi_n is stored as its coefficient vector in the
special Hermite basis phi_n(z) = z^n / sqrt(pi n!) exp(-|z|^2 / 2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.special import gammaln


class FockCoefficients(np.ndarray):
    """Complex coefficient vector (c_0, ..., c_{N-1}); a thin ndarray subclass."""

    def __new__(cls, coeffs):
        arr = np.asarray(coeffs, dtype=complex).reshape(-1)
        if arr.size < 1:
            raise ValueError("a Fock state needs N >= 1 coefficients")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        return arr.view(cls)

    @property
    def N(self) -> int:
        return self.shape[0]

    @classmethod
    def basis(cls, n: int, N: int | None = None) -> "FockCoefficients":
        N = n + 1 if N is None else N
        c = np.zeros(N, dtype=complex)
        c[n] = 1.0
        return cls(c)

    def padded(self, N: int) -> "FockCoefficients":
        """Zero-pad (or truncate) to length N."""
        out = np.zeros(N, dtype=complex)
        k = min(N, self.N)
        out[:k] = np.asarray(self)[:k]
        return FockCoefficients(out)


def as_coeffs(c) -> np.ndarray:
    return np.asarray(c, dtype=complex).reshape(-1)


@dataclass(frozen=True)
class SobolevScale:
    tau: float
    s: float = 1.0
    rho: float = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.tau < 1.0:
            raise ValueError(f"tau must lie in [0, 1), got {self.tau}")
        if self.s < 0:
            raise ValueError(f"s must be nonnegative, got {self.s}")
        object.__setattr__(self, "rho", rho_of_tau(self.tau))


def rho_of_tau(tau: float) -> float:
    return 1.0 / (2.0 * (1.0 - tau))


def oscillator_eigenvalues(N: int) -> np.ndarray:
    """Eigenvalues 2(n+1) of H on phi_n."""
    return 2.0 * (np.arange(N) + 1.0)


def htilde_eigenvalues(N: int, rho: float) -> np.ndarray:
    """Eigenvalues (2n+3)^rho of (H+1)^rho."""
    return (2.0 * np.arange(N) + 3.0) ** rho


def l2_norm(c) -> float:
    c = as_coeffs(c)
    return float(np.sqrt(np.sum(np.abs(c) ** 2)))


def h_sobolev_norm(c, s: float) -> float:
    c = as_coeffs(c)
    w = oscillator_eigenvalues(c.size) ** s
    return float(np.sqrt(np.sum(w * np.abs(c) ** 2)))


def htilde_norm(c, scale: SobolevScale) -> float:
    c = as_coeffs(c)
    w = htilde_eigenvalues(c.size, scale.rho) ** scale.s
    return float(np.sqrt(np.sum(w * np.abs(c) ** 2)))


def factorial_ratio(n, k: int) -> np.ndarray:
    """(n+k)!/n! as a running product of k terms; n may be an array."""
    n = np.asarray(n, dtype=float)
    out = np.ones_like(n)
    for j in range(1, k + 1):
        out = out * (n + j)
    return out


def radial_moment(c, k: int) -> float:
    """Exact value of the integral of |z|^{2k} |u|^2 over C for u in the span."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    c = as_coeffs(c)
    with np.errstate(over="ignore"):
        weights = factorial_ratio(np.arange(c.size), k)
    if not np.all(np.isfinite(weights)):
        raise OverflowError(f"(n+{k})!/n! overflows for N={c.size}")
    return float(np.sum(weights * np.abs(c) ** 2))


def bracket_norm(c, k: int) -> float:
    """||<z>^k u||_{L^2} for integer k, with <z> = (1+|z|^2)^{1/2}."""
    if int(k) != k or k < 0:
        raise ValueError("bracket_norm is exact only for nonnegative integer k")
    k = int(k)
    total = sum(comb(k, j) * radial_moment(c, j) for j in range(k + 1))
    return float(np.sqrt(total))


def weighted_norm(c, s: float) -> float:
    """||<z>^s u|| for integer s, and the H^s norm as a stand-in otherwise."""
    if float(s).is_integer():
        return bracket_norm(c, int(s))
    return h_sobolev_norm(c, s)


def tail_mass(c, n0: int) -> float:
    c = as_coeffs(c)
    if not 0 <= n0 <= c.size:
        raise ValueError(f"tail index {n0} outside [0, {c.size}]")
    p = np.abs(c) ** 2
    total = p.sum()
    if total == 0:
        return 0.0
    return float(p[n0:].sum() / total)


def basis_values(z, N: int) -> np.ndarray:
    """phi_0..phi_{N-1} at the points z; shape (N,) + z.shape.

    The Gaussian is folded into the seed so z^n and n! never appear alone.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty((N,) + z.shape, dtype=complex)
    out[0] = np.exp(-np.abs(z) ** 2 / 2) / np.sqrt(np.pi)
    for n in range(N - 1):
        out[n + 1] = z * out[n] / np.sqrt(n + 1)
    return out


def evaluate(c, z):
    """Pointwise value of sum_n c_n phi_n(z); z scalar or array."""
    c = as_coeffs(c)
    z = np.asarray(z, dtype=complex)
    acc = np.zeros(z.shape, dtype=complex)
    phi = np.exp(-np.abs(z) ** 2 / 2) / np.sqrt(np.pi)
    for n in range(c.size):
        if c[n] != 0:
            acc = acc + c[n] * phi
        phi = z * phi / np.sqrt(n + 1)
    return acc[()] if acc.ndim == 0 else acc


def log_factorial(n):
    return gammaln(np.asarray(n, dtype=float) + 1.0)
