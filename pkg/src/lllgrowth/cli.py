"""Command-line front end.

    lllgrowth simulate --config run.json [--N 256 ...]
    lllgrowth oracle --epsilon 1 --t0 580 --t1 2000 --output oracle.csv
    lllgrowth compare --epsilon 1 --delta 0 --N 128 --dt 0.005 --tmax 50
    lllgrowth fit --input oracle.csv --column bracket_s1 --window 580,2000
    lllgrowth matrix --config run.json --t 3.0 --output M.csv
    lllgrowth transport --tau 0.5 --s 1
    lllgrowth selftest

Exit status: 0 on success, 1 when a check or run fails, 2 on usage or config errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager

import numpy as np

from . import selftest
from .exact import TravelingWaveOracle, oracle_norm_series
from .fock import SobolevScale
from .growth import FitError, compare_to_oracle, fit_slope
from .potentials import GAUSSIAN_DECAY, MODULUS, TRAVELING_WAVE, PotentialSpec
from .propagator import GAUGES, REDUCED, NormSeries, SimulationConfig, build_generator, evolve, fmt
from .transport import GridOverflow, gaussian_profile, transport_growth_check, transport_norm

CONFIG_KEYS = ("epsilon", "delta", "tau", "s_list", "k_list", "N", "dt", "t_max", "record_every",
               "tail_tolerance", "potential", "gauge", "output")


class ConfigError(ValueError):
    pass


@contextmanager
def _open_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(re, im)
    return complex(value)


def load_config(path: str | None, overrides: dict) -> dict:
    cfg = {}
    if path is not None:
        try:
            with open(path) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "kind":
            cfg.setdefault("potential", {})
            cfg["potential"] = {**cfg["potential"], "kind": value}
        else:
            cfg[key] = value
    missing = [k for k in CONFIG_KEYS if k not in cfg]
    if missing:
        raise ConfigError(f"config is missing keys: {', '.join(missing)}")
    cfg.setdefault("seed", 0)
    return cfg


def potential_from_config(cfg: dict) -> PotentialSpec:
    pot = cfg["potential"]
    if not isinstance(pot, dict) or "kind" not in pot:
        raise ConfigError("potential must be an object with a 'kind'")
    kind = pot["kind"]
    params = pot.get("params", {}) or {}
    eps, delta = float(cfg["epsilon"]), float(cfg["delta"])
    if kind == TRAVELING_WAVE:
        return PotentialSpec.traveling_wave(eps, delta)
    if kind == MODULUS:
        if "v" not in params:
            raise ConfigError("modulus potential needs params.v")
        v = [_complex(x) for x in params["v"]]
        return PotentialSpec.modulus(v, drift=_complex(params.get("drift", 0.0)), delta=delta)
    if kind == GAUSSIAN_DECAY:
        if delta != 0:
            raise ConfigError("gaussian_decay is defined with delta = 0")
        return PotentialSpec.gaussian_decay(eps, width=float(params.get("width", 1.0)),
                                            center=_complex(params.get("center", 0.0)))
    raise ConfigError(f"potential kind {kind!r} is not available from the command line")


def initial_state(cfg: dict) -> np.ndarray:
    """Traveling-wave profile U by default; 'random' draws 8 modes from the recorded seed."""
    kind = cfg.get("initial", "traveling_wave")
    if kind == "traveling_wave":
        return TravelingWaveOracle(float(cfg["epsilon"])).u_coeffs
    if kind == "random":
        rng = np.random.default_rng(int(cfg["seed"]))
        return selftest.random_state(rng, 8, decay=3.0)
    raise ConfigError(f"unknown initial state {kind!r}")


def simulation_from_config(cfg: dict) -> SimulationConfig:
    try:
        return SimulationConfig(
            potential=potential_from_config(cfg),
            N=int(cfg["N"]),
            dt=float(cfg["dt"]),
            t_max=float(cfg["t_max"]),
            gauge=str(cfg["gauge"]),
            tau=float(cfg["tau"]),
            s_list=tuple(float(s) for s in cfg["s_list"]),
            k_list=tuple(int(k) for k in cfg["k_list"]),
            record_every=int(cfg["record_every"]),
            tail_tolerance=float(cfg["tail_tolerance"]),
            seed=int(cfg["seed"]),
        )
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


def write_state(path: str, c) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "re", "im"])
        for n, x in enumerate(np.asarray(c)):
            w.writerow([n, fmt(x.real), fmt(x.imag)])


def write_matrix(fh, A) -> None:
    w = csv.writer(fh)
    w.writerow(["row", "col", "re", "im"])
    for (i, j), x in np.ndenumerate(A):
        w.writerow([i, j, fmt(x.real), fmt(x.imag)])


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run description")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--s-list", dest="s_list", type=_floats, help="comma separated, e.g. 0.5,1,2")
    p.add_argument("--k-list", dest="k_list", type=_ints)
    p.add_argument("--N", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--tmax", dest="t_max", type=float)
    p.add_argument("--record-every", dest="record_every", type=int)
    p.add_argument("--tail-tolerance", dest="tail_tolerance", type=float)
    p.add_argument("--kind", choices=(TRAVELING_WAVE, MODULUS, GAUSSIAN_DECAY))
    p.add_argument("--gauge", choices=GAUGES)
    p.add_argument("--seed", type=int)
    p.add_argument("--output")


def _overrides(args) -> dict:
    keys = ("epsilon", "delta", "tau", "s_list", "k_list", "N", "dt", "t_max", "record_every",
            "tail_tolerance", "kind", "gauge", "seed", "output")
    return {k: getattr(args, k) for k in keys}


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    config = simulation_from_config(cfg)
    series, final = evolve(config, initial_state(cfg))
    series.header["seed"] = config.seed
    out = cfg["output"]
    with _open_out(out) as fh:
        series.to_csv(fh)
    if out not in (None, "-"):
        write_state(out + ".state.csv", final)
    if series.aborted:
        print(f"run aborted: {series.abort_reason}", file=sys.stderr)
        return 1
    return 0


def cmd_oracle(args) -> int:
    oracle = TravelingWaveOracle(args.epsilon, args.delta)
    if args.spacing == "log":
        times = np.geomspace(args.t0, args.t1, args.samples)
    else:
        times = np.linspace(args.t0, args.t1, args.samples)
    series = oracle_norm_series(oracle, times, args.tau, args.s_list, args.k_list)
    with _open_out(args.output) as fh:
        series.to_csv(fh)
    return 0


def cmd_compare(args) -> int:
    spec = PotentialSpec.traveling_wave(args.epsilon, args.delta)
    gauge = "full" if args.delta != 0 else REDUCED
    config = SimulationConfig(spec, N=args.N, dt=args.dt, t_max=args.t_max, gauge=gauge,
                              record_every=args.record_every)
    oracle = TravelingWaveOracle(args.epsilon, args.delta)
    series, _ = evolve(config, oracle.u_coeffs, record_states=True)
    err = compare_to_oracle(series.states, oracle)
    ok = err <= args.threshold and not series.aborted
    print(f"max l2 error {err:.3e} (threshold {args.threshold:.1e}) over {len(series.states)} records: "
          f"{'PASS' if ok else 'FAIL'}")
    if series.aborted:
        print(f"run aborted: {series.abort_reason}")
    return 0 if ok else 1


def cmd_fit(args) -> int:
    try:
        with open(args.input) as fh:
            series = NormSeries.from_csv(fh.read())
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    window = None
    if args.window:
        lo, hi = _floats(args.window)
        window = (lo, hi)
    status = 0
    for column in args.column:
        if column not in series.columns:
            raise ConfigError(f"column {column!r} not in {args.input}")
        try:
            fit = fit_slope(series.t, series.column(column), window, min_samples=args.min_samples)
        except FitError as exc:
            print(f"{column}: {exc}")
            status = 1
            continue
        line = f"{column}: slope {fit.slope:.6f} +/- {fit.stderr:.2e} (n={fit.n})"
        if args.expect is not None:
            ok = abs(fit.slope - args.expect) <= args.rel_tol * abs(args.expect)
            line += f" expected {args.expect:g}: {'PASS' if ok else 'FAIL'}"
            status = status or (0 if ok else 1)
        print(line)
    return status


def cmd_matrix(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    config = simulation_from_config(cfg)
    A = build_generator(config)(args.t)
    with _open_out(cfg["output"]) as fh:
        write_matrix(fh, A)
    return 0


def cmd_transport(args) -> int:
    scale = SobolevScale(args.tau, args.s)
    times = np.geomspace(args.t0, args.t1, args.samples) / args.epsilon
    half_width = args.epsilon * times.max() + 20.0
    profile = gaussian_profile(args.epsilon, half_width=half_width)
    try:
        check = transport_growth_check(profile, scale, times)
    except GridOverflow as exc:
        raise ConfigError(str(exc)) from exc
    expected = scale.rho * scale.s
    if args.output:
        series = NormSeries(["t", "weighted", "homogeneous", "norm"],
                            header={"source": "transport", "tau": args.tau, "s": args.s, "epsilon": args.epsilon})
        for t in times:
            w, h = transport_norm(profile, t, scale, parts=True)
            series.append({"t": t, "weighted": w, "homogeneous": h, "norm": w + h})
        with _open_out(args.output) as fh:
            series.to_csv(fh)
    slope_ok = abs(check.slope - expected) <= 0.02 * max(expected, 1.0) if expected else abs(check.slope) < 1e-6
    ok = slope_ok and check.bounds_pass
    print(f"tau={args.tau:g} s={args.s:g}: slope {check.slope:.5f} (expected {expected:g}), "
          f"constants c={check.c_lower:.4f} C={check.c_upper:.4f}: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_selftest(args) -> int:
    checks = selftest.run_battery()
    print(selftest.format_table(checks))
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lllgrowth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="time-step a configured run and write its norm series")
    _add_config_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="norm series of the exact traveling-wave solution")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--t0", type=float, default=580.0)
    p.add_argument("--t1", type=float, default=2000.0)
    p.add_argument("--samples", type=int, default=40)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--s-list", dest="s_list", type=_floats, default=[0.5, 1.0, 2.0])
    p.add_argument("--k-list", dest="k_list", type=_ints, default=[1])
    p.add_argument("--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="simulate the traveling wave and report the error against the exact solution")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--N", type=int, default=128)
    p.add_argument("--dt", type=float, default=0.005)
    p.add_argument("--tmax", dest="t_max", type=float, default=50.0)
    p.add_argument("--record-every", dest="record_every", type=int, default=100)
    p.add_argument("--threshold", type=float, default=1e-3)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fit", help="log-log slope of CSV columns")
    p.add_argument("--input", required=True)
    p.add_argument("--column", action="append", required=True)
    p.add_argument("--window", help="lo,hi in units of t")
    p.add_argument("--min-samples", dest="min_samples", type=int, default=10)
    p.add_argument("--expect", type=float)
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=0.05)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("matrix", help="dump the generator at one time as row,col,re,im")
    _add_config_flags(p)
    p.add_argument("--t", type=float, default=0.0)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("transport", help="one-dimensional free transport growth check")
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=10.0, help="start of the eps*t window")
    p.add_argument("--t1", type=float, default=1000.0, help="end of the eps*t window")
    p.add_argument("--samples", type=int, default=40)
    p.add_argument("--output")
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("selftest", help="run the invariant battery")
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
