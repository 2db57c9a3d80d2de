"""Unitary time stepping of the truncated coefficient ODE and norm recording."""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .fock import (
    SobolevScale,
    as_coeffs,
    h_sobolev_norm,
    htilde_eigenvalues,
    htilde_norm,
    l2_norm,
    oscillator_eigenvalues,
    radial_moment,
    tail_mass,
    weighted_norm,
)
from .potentials import GeneratorFactory, PotentialSpec

log = logging.getLogger(__name__)

FULL = "full"
REDUCED = "reduced"
TILDE = "tilde"
GAUGES = (FULL, REDUCED, TILDE)


class StepFailure(RuntimeError):
    pass


def fmt(x: float) -> str:
    return f"{x:.17g}"


def label(x: float) -> str:
    """Column suffix for an order: 1 -> '1', 0.5 -> '0.5'."""
    return f"{float(x):g}"


class NormSeries:
    """Time-stamped norm records; columns by name, rows in increasing t."""

    def __init__(self, columns: list[str], header: dict | None = None):
        self.columns = list(columns)
        self.rows: list[list[float]] = []
        self.header = dict(header or {})
        self.aborted = False
        self.abort_reason = ""
        self.states: list[tuple[float, np.ndarray]] = []

    def append(self, row: dict):
        if self.rows and not row["t"] > self.rows[-1][0]:
            raise ValueError("times must be strictly increasing")
        self.rows.append([float(row[c]) for c in self.columns])

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def __len__(self):
        return len(self.rows)

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO()
        for key, val in self.header.items():
            buf.write(f"# {key}={val}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(x) for x in r])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> "NormSeries":
        header = {}
        lines = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                header[key] = val
            elif line.strip():
                lines.append(line)
        reader = csv.reader(lines)
        cols = next(reader)
        out = cls(cols, header)
        for r in reader:
            out.rows.append([float(x) for x in r])
        return out


def series_columns(k_list: Iterable[int], s_list: Iterable[float]) -> list[str]:
    cols = ["t", "l2", "tail"]
    cols += [f"m{int(k)}" for k in k_list]
    cols += [f"hs{label(s)}" for s in s_list]
    cols += [f"hts{label(s)}" for s in s_list]
    cols += [f"bracket_s{label(s)}" for s in s_list]
    return cols


def norm_row(t: float, c, tau: float, k_list, s_list, guard: int | None = None) -> dict:
    c = as_coeffs(c)
    N = c.size
    n0 = N - math.ceil(N / 8) if guard is None else guard
    row = {"t": t, "l2": l2_norm(c), "tail": tail_mass(c, n0)}
    for k in k_list:
        row[f"m{int(k)}"] = radial_moment(c, int(k))
    for s in s_list:
        row[f"hs{label(s)}"] = h_sobolev_norm(c, s)
        row[f"hts{label(s)}"] = htilde_norm(c, SobolevScale(tau, s))
        row[f"bracket_s{label(s)}"] = weighted_norm(c, s)
    return row


@dataclass
class SimulationConfig:
    potential: PotentialSpec
    N: int
    dt: float
    t_max: float
    gauge: str = REDUCED
    tau: float = 0.5
    s_list: tuple = (1.0,)
    k_list: tuple = (1,)
    record_every: int = 1
    tail_tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.gauge not in GAUGES:
            raise ValueError(f"gauge must be one of {GAUGES}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_max < 0:
            raise ValueError("t_max must be nonnegative")
        if not 0 < self.tail_tolerance < 1:
            raise ValueError("tail_tolerance must lie in (0, 1)")
        if self.N < 1 or self.record_every < 1:
            raise ValueError("N and record_every must be positive")

    @property
    def scale(self) -> SobolevScale:
        return SobolevScale(self.tau, max(self.s_list, default=1.0))


def step_unitary(c, t: float, dt: float, A: Callable[[float], np.ndarray]) -> np.ndarray:
    """One Cayley (implicit midpoint) step for i c' = A(t) c, with A frozen at t + dt/2."""
    c = as_coeffs(c)
    M = A(t + dt / 2)
    half = 0.5j * dt * M
    rhs = c - half @ c
    lhs = half
    lhs[np.diag_indices_from(lhs)] += 1.0
    try:
        return np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise StepFailure(f"Cayley solve failed at t={t}: {exc}") from exc


def split_generator(config: SimulationConfig) -> tuple[np.ndarray | None, Callable[[float], np.ndarray]]:
    """Generator as (constant diagonal d, time-dependent part B) with A(t) = diag(d) + B(t).

    Full gauge: d = delta * 2(n+1) and B = Pi(W .). Tilde gauge: d = (2n+3)^rho
    and B the conjugated potential. Reduced gauge has no diagonal part.
    """
    spec = config.potential
    N = config.N
    M = GeneratorFactory(spec, N, tail_tolerance=None)
    if config.gauge == REDUCED:
        return None, M
    if config.gauge == FULL:
        return spec.delta * oscillator_eigenvalues(N), M
    lam = htilde_eigenvalues(N, 1.0 / (2.0 * (1.0 - config.tau)))

    def conjugated(t):
        ph = np.exp(-1j * t * lam)
        return ph[:, None] * M(t) * np.conj(ph)[None, :]

    return lam, conjugated


def build_generator(config: SimulationConfig) -> Callable[[float], np.ndarray]:
    """t -> full generator matrix A(t) of the configured gauge."""
    d, B = split_generator(config)
    if d is None:
        return B

    def full(t):
        A = B(t)
        A[np.diag_indices_from(A)] += d
        return A

    return full


def step_split(c, t: float, dt: float, d: np.ndarray | None, B: Callable[[float], np.ndarray]) -> np.ndarray:
    """Strang step: exact half-step of diag(d), Cayley step of B(t + dt/2), exact half-step of diag(d).

    Second order and unitary like step_unitary, and exact when B vanishes.
    """
    if d is None:
        return step_unitary(c, t, dt, B)
    half = np.exp(-0.5j * dt * d)
    return half * step_unitary(half * as_coeffs(c), t, dt, B)


def evolve(config: SimulationConfig, c0, record_states: bool = False) -> tuple[NormSeries, np.ndarray]:
    """Integrate from t = 0 to t_max, recording norms every record_every steps.

    Stops early (series.aborted set) once the tail mass above the N/8 guard
    band exceeds the tolerance.
    """
    N = config.N
    c0 = as_coeffs(c0)
    if c0.size > N:
        raise ValueError(f"initial state has {c0.size} modes but N={N}")
    c = np.zeros(N, dtype=complex)
    c[: c0.size] = c0
    d, B = split_generator(config)
    guard = N - math.ceil(N / 8)
    series = NormSeries(series_columns(config.k_list, config.s_list),
                        header={"gauge": config.gauge, "N": N, "dt": fmt(config.dt), "seed": config.seed})
    nsteps = int(round(config.t_max / config.dt))

    def record(t, state):
        series.append(norm_row(t, state, config.tau, config.k_list, config.s_list, guard))
        if record_states:
            series.states.append((t, state.copy()))

    record(0.0, c)
    for i in range(nsteps):
        t = i * config.dt
        c = step_split(c, t, config.dt, d, B)
        if (i + 1) % config.record_every == 0 or i + 1 == nsteps:
            record((i + 1) * config.dt, c)
            tail = series.rows[-1][2]
            if tail > config.tail_tolerance:
                series.aborted = True
                series.abort_reason = f"tail mass {tail:.3e} above {config.tail_tolerance:.1e} at t={(i + 1) * config.dt:g}"
                log.warning("aborting run: %s", series.abort_reason)
                break
    return series, c


def gauge_transform(c, t: float, mode: str, delta: float | None = None, scale: SobolevScale | None = None,
                    inverse: bool = False) -> np.ndarray:
    """Diagonal phase change v = e^{i delta t H} u (mode 'delta') or v = e^{i t (H+1)^rho} u (mode 'tilde')."""
    c = as_coeffs(c)
    sign = -1.0 if inverse else 1.0
    if mode == "delta":
        if delta is None:
            raise ValueError("mode 'delta' needs delta")
        phase = delta * oscillator_eigenvalues(c.size)
    elif mode == "tilde":
        if scale is None:
            raise ValueError("mode 'tilde' needs a SobolevScale")
        phase = htilde_eigenvalues(c.size, scale.rho)
    else:
        raise ValueError(f"unknown gauge mode {mode!r}")
    return c * np.exp(sign * 1j * t * phase)
