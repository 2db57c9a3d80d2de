"""Invariant battery: every structural and analytic check with measured value and tolerance."""
from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb
from typing import Callable

import numpy as np

from .fock import basis_values, bracket_norm, evaluate, radial_moment
from .operators import (
    conjugated_generator,
    displacement_matrix,
    four_wave,
    hermiticity_defect,
    potential_matrix,
    transform_matrix,
)
from .potentials import PotentialSpec, potential_derivative, v_coefficients, GeneratorFactory
from .propagator import FULL, SimulationConfig, evolve, step_unitary
from .quadrature import (
    DEFAULT_GRID,
    GaussPoly,
    PolarGrid,
    apply_H_after_project,
    lp_norm,
    project,
    state_sampler,
)

SEED = 20240611


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool
    note: str = ""
    seconds: float = 0.0


def random_state(rng: np.random.Generator, N: int, decay: float = 8.0) -> np.ndarray:
    n = np.arange(N)
    c = (rng.standard_normal(N) + 1j * rng.standard_normal(N)) * np.exp(-n / decay)
    return c / np.linalg.norm(c)


def check_four_wave(max_index: int = 20, tol: float = 1e-8) -> Check:
    grid = DEFAULT_GRID
    n = max_index + 1
    phis = basis_values(grid.points.ravel(), n)
    w = grid.weights.ravel()
    pairs = [(a, b) for a in range(n) for b in range(n)]
    P = np.array([phis[a] * phis[b] for a, b in pairs])
    Q = np.array([np.conj(phis[a] * phis[b]) * w for a, b in pairs])
    quad = P @ Q.T  # quad[(j,l),(k,m)]
    worst = 0.0
    for i, (j, l) in enumerate(pairs):
        for q, (k, m) in enumerate(pairs):
            if j + l == k + m:
                worst = max(worst, abs(four_wave(j, k, l, m) - quad[i, q]))
    return Check("four_wave vs quadrature (indices <= 20)", worst, tol, worst <= tol)


def check_hermiticity(tol: float = 1e-12) -> Check:
    rng = np.random.default_rng(SEED)
    mats = []
    tw = GeneratorFactory(PotentialSpec.traveling_wave(1.0, delta=0.5), 64)
    mats += [tw(t) for t in (0.0, 3.0, 40.0)]
    for _ in range(5):
        v = random_state(rng, 4, decay=2.0)
        mats.append(potential_matrix(v, 48))
        mats.append(conjugated_generator(v, 0.4 - 0.2j, 1.1, 48))
    worst = max(hermiticity_defect(A) for A in mats)
    return Check("generator Hermiticity (relative)", worst, tol, worst <= tol)


def check_unitarity(tol: float = 1e-8) -> Check:
    N = 64
    worst = 0.0
    for beta in (1.0, 0.5 + 0.5j, -0.8j):
        D = displacement_matrix(beta, N)
        E = D.conj().T @ D - np.eye(N)
        worst = max(worst, float(np.abs(E[: N // 2, : N // 2]).max()))
    return Check("displacement unitarity on [0, N/2)^2", worst, tol, worst <= tol)


def check_equivariance(tol: float = 1e-6) -> Check:
    N = 64
    v = v_coefficients(1.0)
    worst = 0.0
    for beta, theta in ((0.5 + 0.3j, 0.7), (1.0, 0.0), (-0.4j, -2.0)):
        A = conjugated_generator(v, beta, theta, N)
        vt = transform_matrix(beta, theta, N)[:, : v.size] @ v
        B = potential_matrix(vt, N)
        h = N // 2
        worst = max(worst, float(np.abs(A[:h, :h] - B[:h, :h]).max()))
    return Check("equivariance T M T^+ vs transformed assembly", worst, tol, worst <= tol)


def check_mass(tol: float = 1e-10) -> Check:
    cfg = SimulationConfig(PotentialSpec.traveling_wave(1.0, delta=0.5), N=64, dt=1e-2, t_max=20.0,
                           gauge=FULL, record_every=10)
    c0 = np.array([0.5, 0.5j * np.sqrt(3)])
    series, _ = evolve(cfg, c0)
    l2 = series.column("l2")
    worst = float(np.abs(l2 - l2[0]).max())
    return Check("mass conservation over a Full-gauge run", worst, tol, worst <= tol)


def check_hypercontractivity(count: int = 100, slack: float = 1e-6) -> Check:
    rng = np.random.default_rng(SEED + 1)
    worst = -np.inf
    for _ in range(count):
        N = int(rng.integers(1, 33))
        c = random_state(rng, N)
        f = state_sampler(c)
        norms = {p: lp_norm(f, p) for p in (1.0, 2.0, 4.0, np.inf)}
        scaled = {p: (p / (2 * np.pi)) ** (1 / p) * norms[p] if np.isfinite(p) else norms[p] for p in norms}
        for p, q in ((1.0, 2.0), (2.0, 4.0), (2.0, np.inf)):
            worst = max(worst, scaled[q] - scaled[p])
    return Check(f"hypercontractivity on {count} random states (max violation)", float(worst), slack,
                 worst <= slack)


def moment_rhs(c, W_spec: PotentialSpec, t: float, k: int, grid: PolarGrid = DEFAULT_GRID) -> float:
    """Right-hand side of the moment identity, by quadrature."""
    z = grid.points
    u2 = np.abs(evaluate(c, z)) ** 2
    total = 0.0
    for j in range(1, k + 1):
        dW = potential_derivative(W_spec, t, 0, j)(z)
        integral = np.sum(grid.weights * z ** k * np.conj(z) ** (k - j) * u2 * dW)
        total += -2 * (-1) ** j * comb(k, j) * np.imag(integral)
    return float(total)


def check_moment_identity(tol: float = 0.02) -> tuple[Check, list]:
    spec = PotentialSpec.traveling_wave(4.0, delta=0.5)
    N, dt = 64, 2e-3
    A = GeneratorFactory(spec, N)
    diag = spec.delta * 2.0 * (np.arange(N) + 1.0)

    def gen(t):
        M = A(t)
        M[np.diag_indices(N)] += diag
        return M

    c = np.zeros(N, dtype=complex)
    c[:2] = np.sqrt(4.0) * np.array([0.5, 0.5j * np.sqrt(3)])
    samples = set(int(round(t / dt)) for t in np.linspace(1.0, 10.0, 10))
    prev = prev_prev = None
    rows = []
    worst = 0.0
    for i in range(max(samples) + 2):
        t = i * dt
        if i - 1 in samples:
            for k in (1, 2):
                fd = (radial_moment(c, k) - radial_moment(prev_prev, k)) / (2 * dt)
                rhs = moment_rhs(prev, spec, t - dt, k)
                rel = abs(fd - rhs) / abs(rhs)
                rows.append((t - dt, k, fd, rhs, rel))
                worst = max(worst, rel)
        prev_prev, prev = prev, c
        c = step_unitary(c, t, dt, gen)
    return Check("moment identity residual (relative)", worst, tol, worst <= tol), rows


def check_commutation(tol: float = 1e-6) -> Check:
    rng = np.random.default_rng(SEED + 2)
    xs = np.linspace(-1.0, 1.0, 5)
    zs = (xs[:, None] + 1j * xs[None, :]).ravel()
    worst = 0.0
    for _ in range(5):
        coeffs = {}
        for p in range(7):
            for q in range(7 - p):
                coeffs[(p, q)] = complex(rng.standard_normal(), rng.standard_normal()) / (1 + p + q) ** 2
        f = GaussPoly(coeffs, decay=0.5)
        Hf = f.apply_H()
        a = project(Hf, zs)
        b = apply_H_after_project(f, zs)
        worst = max(worst, float(np.abs(a - b).max()))
    return Check("Pi H = H Pi on 5x5 points (degree <= 6)", worst, tol, worst <= tol)


def check_phase_invariance(tol: float = 1e-13) -> Check:
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for _ in range(20):
        c = random_state(rng, 40)
        tau = rng.uniform(-10, 10)
        cp = c * np.exp(2j * (np.arange(40) + 1) * tau)
        for k in (1, 2, 3):
            a, b = bracket_norm(c, k), bracket_norm(cp, k)
            worst = max(worst, abs(a - b) / a, abs(radial_moment(c, k) - radial_moment(cp, k)) / radial_moment(c, k))
    return Check("phase invariance of weighted norms (relative)", worst, tol, worst <= tol)


def check_modulus_derivative_bound(cap: float = 1e3) -> Check:
    """sup over samples of ||d_zbar^j d_z^k |v|^2||_p / ||v||_{2p}^2; must stay bounded."""
    rng = np.random.default_rng(SEED + 4)
    grid = PolarGrid(48, 96)
    worst = 0.0
    for _ in range(20):
        N = int(rng.integers(1, 17))
        v = random_state(rng, N, decay=4.0)
        F = GaussPoly.modulus_squared(v)
        f = state_sampler(v)
        for j in range(3):
            for k in range(3):
                d = F.derivative(j, k)
                for p in (2.0, np.inf):
                    if np.isinf(p):
                        num = float(np.abs(d(grid.points)).max())
                    else:
                        num = float(np.sum(grid.weights * np.abs(d(grid.points)) ** p) ** (1 / p))
                    den = lp_norm(f, 2 * p, grid) ** 2 if np.isfinite(p) else float(np.abs(f(grid.points)).max()) ** 2
                    worst = max(worst, num / den)
    return Check("derivative bound constant for |v|^2 (recorded)", worst, cap, worst <= cap)


def check_weighted_projection(cap: float = 50.0) -> Check:
    """||<z>^s Pi(W v)|| / (||W||_inf ||<z>^s v||) over random W = |V|^2 and v."""
    rng = np.random.default_rng(SEED + 5)
    N = 48
    worst = 0.0
    for _ in range(10):
        V = random_state(rng, 4, decay=2.0)
        v = random_state(rng, 12, decay=3.0)
        M = potential_matrix(V, N)
        w = M @ np.pad(v, (0, N - v.size))
        Winf = lp_norm(state_sampler(V), np.inf) ** 2
        for s in (1, 2):
            worst = max(worst, bracket_norm(w, s) / (Winf * bracket_norm(v, s)))
    return Check("weighted projection bound constant (recorded)", worst, cap, worst <= cap)


CHECKS: list[Callable[[], Check]] = [
    check_four_wave,
    check_hermiticity,
    check_unitarity,
    check_equivariance,
    check_mass,
    check_hypercontractivity,
    lambda: check_moment_identity()[0],
    check_commutation,
    check_phase_invariance,
    check_modulus_derivative_bound,
    check_weighted_projection,
]


def run_battery() -> list[Check]:
    out = []
    for fn in CHECKS:
        start = time.perf_counter()
        chk = fn()
        chk.seconds = time.perf_counter() - start
        out.append(chk)
    return out


def format_table(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check'.ljust(width)}  {'measured':>12}  {'tolerance':>10}  result"]
    for c in checks:
        lines.append(f"{c.name.ljust(width)}  {c.measured:12.3e}  {c.tolerance:10.1e}  {'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
