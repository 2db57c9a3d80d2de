"""Matrix representations on the truncated basis phi_0..phi_{N-1}.

Covers the projected multiplication operator u -> Pi(|V|^2 u), magnetic
translations R_beta (displacement matrices), rotations L_theta, and the
conjugated operator e^{-it Ht} Pi(W_0(t) e^{it Ht} .) with Ht = (H+1)^rho.
"""
from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .fock import SobolevScale, as_coeffs, htilde_eigenvalues


class TruncationWarning(UserWarning):
    """Mass leaks past the top of the truncated basis."""


class TruncationError(RuntimeError):
    pass


class PowerIterationError(RuntimeError):
    pass


def four_wave(j: int, k: int, l: int, m: int) -> float:
    """Integral of phi_j conj(phi_k) phi_l conj(phi_m) over C."""
    if j + l != k + m:
        return 0.0
    p = j + l
    log_val = (
        gammaln(p + 1)
        - (p + 1) * np.log(2.0)
        - 0.5 * (gammaln(j + 1) + gammaln(k + 1) + gammaln(l + 1) + gammaln(m + 1))
    )
    return float(np.exp(log_val) / np.pi)


def potential_matrix(v, N: int) -> np.ndarray:
    """M[m, n] = <phi_m, Pi(|V|^2 phi_n)> for V = sum_j v_j phi_j.

    Costs O(len(v) N^2); use conjugated_generator for translated states.
    """
    v = as_coeffs(v)
    idx = np.arange(N)
    m = idx[:, None]
    n = idx[None, :]
    lg_mn = 0.5 * (gammaln(m + 1.0) + gammaln(n + 1.0))
    M = np.zeros((N, N), dtype=complex)
    for j in np.flatnonzero(v):
        k = j + n - m
        ok = (k >= 0) & (k < v.size)
        kk = np.where(ok, k, 0)
        p = j + n
        log_fw = gammaln(p + 1.0) - (p + 1) * np.log(2.0) - 0.5 * (gammaln(j + 1.0) + gammaln(kk + 1.0)) - lg_mn
        M += np.where(ok, v[j] * np.conj(v[kk]) * np.exp(log_fw) / np.pi, 0.0)
    return M


def poisson_tail(mean: float, N: int) -> float:
    """P(n >= N) for n ~ Poisson(mean): mass of a coherent state above the basis."""
    if mean == 0:
        return 0.0
    return float(poisson.sf(N - 1, mean))


def displacement_matrix(beta: complex, N: int, tail_tolerance: float | None = None) -> np.ndarray:
    """D[m, n] = <phi_m, R_beta phi_n> with R_beta u(z) = u(z+beta) e^{(conj(z) beta - z conj(beta))/2}.

    R_beta is the displacement exp(gamma a^+ - conj(gamma) a) with
    gamma = -conj(beta). Entries on the k-th sub/super-diagonal are
    normalised associated Laguerre functions, generated by the forward
    three-term recurrence in n:

        g_{n+1} = ((2n+1+k-x) g_n - sqrt(n(n+k)) g_{n-1}) / sqrt((n+1)(n+1+k)),
        g_0 = e^{-x/2} |beta|^k / sqrt(k!),   x = |beta|^2,

    with D[n+k, n] = e^{ik arg(gamma)} g_n and D[n, n+k] = e^{ik arg(-conj(gamma))} g_n.
    """
    beta = complex(beta)
    x = abs(beta) ** 2
    if tail_tolerance is not None:
        tail = poisson_tail(x, N)
        if tail > tail_tolerance:
            warnings.warn(
                f"Poisson tail {tail:.3e} of |beta|^2={x:.4g} at N={N} exceeds {tail_tolerance:.1e}",
                TruncationWarning,
                stacklevel=2,
            )
    if x == 0.0:
        return np.eye(N, dtype=complex)
    k, two_n_plus_1, back, scale, flat_index, phase_index = _recurrence_tables(N)
    G = np.empty((N, N))  # G[n, k], only k < N - n is used
    g_prev = np.zeros(N)
    g = np.exp(-x / 2 + k * np.log(abs(beta)) - 0.5 * gammaln(k + 1))
    G[0] = g
    for n in range(N - 1):
        g_next = ((two_n_plus_1[n] - x) * g - back[n] * g_prev) * scale[n]
        g_prev, g = g, g_next
        G[n + 1] = g
    gamma = -np.conj(beta)
    phases = np.concatenate([np.exp(1j * np.angle(gamma) * k), np.exp(1j * np.angle(-np.conj(gamma)) * k)])
    return np.take(G, flat_index) * np.take(phases, phase_index)


@lru_cache(maxsize=16)
def _recurrence_tables(N: int):
    k = np.arange(N, dtype=float)
    n = np.arange(N, dtype=float)[:, None]
    two_n_plus_1 = 2 * n + 1 + k[None, :]
    back = np.sqrt(n * (n + k[None, :]))
    scale = 1.0 / np.sqrt((n + 1) * (n + 1 + k[None, :]))
    rows, cols = np.indices((N, N))
    kabs = np.abs(rows - cols)
    flat_index = np.minimum(rows, cols) * N + kabs
    phase_index = kabs + N * (rows < cols)
    return k, two_n_plus_1, back, scale, flat_index, phase_index


def displacement_columns(beta: complex, N: int, ncols: int) -> np.ndarray:
    """First ncols columns of displacement_matrix(beta, N), in O(N * ncols).

    Column 0 is the coherent state; later columns use
    D[m, n+1] = (sqrt(m) D[m-1, n] + beta D[m, n]) / sqrt(n+1), which is
    accurate for the first few columns (cancellation grows with n).
    """
    beta = complex(beta)
    x = abs(beta) ** 2
    m = np.arange(N)
    out = np.zeros((N, ncols), dtype=complex)
    if x == 0.0:
        out[np.arange(min(N, ncols)), np.arange(min(N, ncols))] = 1.0
        return out
    gamma = -np.conj(beta)
    out[:, 0] = np.exp(-x / 2 + m * np.log(abs(beta)) - 0.5 * gammaln(m + 1.0)) * np.exp(1j * m * np.angle(gamma))
    sq = np.sqrt(m)
    for n in range(ncols - 1):
        col = beta * out[:, n]
        col[1:] += sq[1:] * out[:-1, n]
        out[:, n + 1] = col / np.sqrt(n + 1)
    return out


def rotation_phases(theta: float, N: int) -> np.ndarray:
    """Diagonal of L_theta: e^{i n theta}, since phi_n(e^{i theta} z) = e^{i n theta} phi_n(z)."""
    return np.exp(1j * theta * np.arange(N))


def transform_matrix(beta: complex, theta: float, N: int, tail_tolerance: float | None = None) -> np.ndarray:
    """Matrix of V -> L_theta R_beta V (displacement first, then rotation)."""
    D = displacement_matrix(beta, N, tail_tolerance)
    return rotation_phases(theta, N)[:, None] * D


def conjugated_generator(v, beta: complex, theta: float, N: int, tail_tolerance: float | None = None,
                         base: np.ndarray | None = None) -> np.ndarray:
    """Matrix of u -> Pi(|L_theta R_beta V|^2 u), assembled as T M T^dagger.

    base, when given, is a precomputed potential_matrix(v, N).
    """
    if tail_tolerance is not None:
        tail = poisson_tail(abs(beta) ** 2, N)
        if tail > tail_tolerance:
            raise TruncationError(f"Poisson tail {tail:.3e} exceeds tolerance {tail_tolerance:.1e} at N={N}")
    M = potential_matrix(v, N) if base is None else base
    if beta == 0 and theta == 0:
        return M.copy()
    T = transform_matrix(beta, theta, N)
    return T @ M @ T.conj().T


def ltilde_matrix(t: float, scale: SobolevScale, v, alpha: complex, N: int,
                  tail_tolerance: float | None = None, base: np.ndarray | None = None) -> np.ndarray:
    """L[m, n] = e^{-it(lam_m - lam_n)} M(t)[m, n], lam_n = (2n+3)^rho, M(t) translated by alpha t."""
    M = conjugated_generator(v, alpha * t, 0.0, N, tail_tolerance, base=base)
    lam = htilde_eigenvalues(N, scale.rho)
    ph = np.exp(-1j * t * lam)
    return ph[:, None] * M * np.conj(ph)[None, :]


def hermiticity_defect(A: np.ndarray) -> float:
    """max |A - A^dagger| relative to max |A| (0 for the zero matrix)."""
    scale = np.abs(A).max()
    if scale == 0:
        return 0.0
    return float(np.abs(A - A.conj().T).max() / scale)


def spectral_norm(B: np.ndarray, tol: float = 1e-8, maxiter: int = 10_000, seed: int = 0) -> float:
    """Largest singular value of B by power iteration on B^dagger B."""
    n = B.shape[1]
    if not np.any(B):
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    prev = None
    for _ in range(maxiter):
        y = B.conj().T @ (B @ x)
        ev = np.linalg.norm(y)
        if ev == 0:
            return 0.0
        x = y / ev
        if prev is not None and abs(ev - prev) < tol * ev:
            return float(np.sqrt(ev))
        prev = ev
    raise PowerIterationError(f"power iteration did not converge in {maxiter} iterations")


def weighted_operator_norm(A: np.ndarray, weights: np.ndarray, s_out: float, s_in: float | None = None,
                           **kw) -> float:
    """Norm of A from the weights^{s_in} metric to the weights^{s_out} metric.

    With Lambda = diag(weights) this is the spectral norm of
    Lambda^{s_out/2} A Lambda^{-s_in/2}.
    """
    s_in = s_out if s_in is None else s_in
    B = (weights ** (s_out / 2))[:, None] * A * (weights ** (-s_in / 2))[None, :]
    return spectral_norm(B, **kw)
