"""Command line front end.

Subcommands:
  evolve  integrate one trajectory, write the reduced-state table
  qsl     speed-limit summary for a single parameter point
  sweep   run a sweep from a config file and/or flags
  check   seeded self-test of the core invariants

Exit codes: 0 success, 1 invalid input or config, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
from dataclasses import fields, replace
from typing import IO, Iterator, Sequence

import numpy as np

from .dynamics import (DEFAULT_STEPS, analytic_coeffs, evolve_master,
                       ode_oracle_coeffs)
from .errors import ConfigError, NumericalError, ValidationError
from .linalg import norms_of_hermitian
from .model import SystemParams, default_cutoff, derive
from .sweep import (SweepRow, SweepSpec, engine_row, run_sweep,
                    write_sweep_csv, write_trajectory_csv)

PARAM_KEYS = tuple(f.name for f in fields(SystemParams))
SWEEP_KEYS = ("variable", "range", "second_variable", "second_range",
              "constraint_mode", "engine", "cutoff", "steps")


def _parse_range(key: str, text: str) -> tuple[float, float, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{key} must be 'start,stop,points', got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad {key} value {text!r}: {exc}") from None


def parse_config(text: str) -> dict[str, str]:
    """Flat key = value lines; '#' starts a comment; unknown keys error."""
    allowed = set(PARAM_KEYS) | set(SWEEP_KEYS)
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in allowed:
            raise ConfigError(f"line {lineno}: unknown key {key!r} "
                              f"(accepted: {', '.join(sorted(allowed))})")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        out[key] = value
    return out


def _float_of(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None


def _int_of(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None


def build_params(settings: dict[str, str]) -> SystemParams:
    kwargs = {key: _float_of(key, settings[key]) for key in PARAM_KEYS
              if key in settings}
    return SystemParams(**kwargs)


def build_sweep_spec(settings: dict[str, str]) -> SweepSpec:
    if "variable" not in settings or "range" not in settings:
        raise ConfigError("a sweep needs both 'variable' and 'range'")
    kwargs: dict = {
        "variable": settings["variable"],
        "range": _parse_range("range", settings["range"]),
        "base": build_params(settings),
    }
    if "second_variable" in settings:
        kwargs["second_variable"] = settings["second_variable"]
    if "second_range" in settings:
        kwargs["second_range"] = _parse_range("second_range",
                                              settings["second_range"])
    if "constraint_mode" in settings:
        kwargs["constraint_mode"] = settings["constraint_mode"]
    if "engine" in settings:
        kwargs["engine"] = settings["engine"]
    if "cutoff" in settings:
        kwargs["cutoff"] = _int_of("cutoff", settings["cutoff"])
    if "steps" in settings:
        kwargs["steps"] = _int_of("steps", settings["steps"])
    return SweepSpec(**kwargs)


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    for name in PARAM_KEYS:
        parser.add_argument(f"--{name}", type=str, default=None, metavar="X")


def _collect_flag_settings(args: argparse.Namespace, keys: Sequence[str]) -> dict[str, str]:
    out = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            out[key] = str(value)
    return out


@contextlib.contextmanager
def _out_stream(path: str | None) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as handle:
            yield handle


def _cmd_evolve(args: argparse.Namespace) -> int:
    params = build_params(_collect_flag_settings(args, PARAM_KEYS))
    cutoff = args.cutoff if args.cutoff is not None else default_cutoff(derive(params))
    traj = evolve_master(params, cutoff, args.steps)
    with _out_stream(args.out) as stream:
        write_trajectory_csv(traj, stream)
    return 0


def _cmd_qsl(args: argparse.Namespace) -> int:
    params = build_params(_collect_flag_settings(args, PARAM_KEYS))
    engines = ("analytic", "master") if args.engine == "both" else (args.engine,)
    rows: list[SweepRow] = []
    for engine in engines:
        rows.append(engine_row(params, engine, 0, 0.0, None, args.cutoff,
                               args.steps, catch_errors=False))
    with _out_stream(args.out) as stream:
        write_sweep_csv(rows, stream)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    settings: dict[str, str] = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
        settings.update(parse_config(text))
    settings.update(_collect_flag_settings(args, PARAM_KEYS + SWEEP_KEYS))
    spec = build_sweep_spec(settings)
    rows = run_sweep(spec, workers=args.workers)
    with _out_stream(args.out) as stream:
        write_sweep_csv(rows, stream)
    return 0


def run_checks(seed: int) -> list[tuple[str, bool, str]]:
    """Fast invariant suite; every entry is (name, passed, detail)."""
    rng = np.random.default_rng(seed)
    results = []

    worst = 0.0
    ok = True
    for _ in range(40):
        dim = int(rng.integers(2, 7))
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        m = m + m.conj().T
        norms = norms_of_hermitian(m)
        # op <= hs <= tr and tr <= sqrt(dim) * hs for any Hermitian matrix
        gap = max(norms.op - norms.hs, norms.hs - norms.tr,
                  norms.tr - math.sqrt(dim) * norms.hs)
        worst = max(worst, gap)
        ok = ok and gap <= 1e-12
    results.append(("norm-ordering", ok, f"worst violation {worst:.3g}"))

    worst = 0.0
    for _ in range(100):
        params = SystemParams(r_p=float(rng.uniform(0.0, 1.5)),
                              theta_p=float(rng.uniform(0.0, 2.0 * math.pi)))
        d = derive(replace_reservoir(params))
        worst = max(worst, abs(d.n_s), abs(d.m_s))
    results.append(("noise-cancellation", worst <= 1e-12, f"residual {worst:.3g}"))

    worst = 0.0
    draws = [(float(rng.uniform(0.5, 3.0)), float(rng.uniform(-10.0, 10.0)),
              float(rng.uniform(-10.0, 10.0)), float(rng.uniform(0.0, 0.1)),
              float(rng.uniform(0.0, 0.1))) for _ in range(5)]
    draws.append((0.01, 1.0, 1.0, 0.05, 0.01))  # splitting root ~ 0
    for g, delta_a, delta_c, gamma, kappa in draws:
        params = SystemParams(g=g, delta_a=delta_a, delta_c=delta_c,
                              gamma=gamma, kappa=kappa)
        for t in (0.3, 1.0):
            exact = analytic_coeffs(params, t)
            oracle = ode_oracle_coeffs(params, t)
            worst = max(worst,
                        abs(exact.excited_amp - oracle.excited_amp),
                        abs(exact.photon_amp - oracle.photon_amp))
    results.append(("closed-form-vs-oracle", worst <= 1e-8, f"max err {worst:.3g}"))
    return results


def replace_reservoir(params: SystemParams) -> SystemParams:
    """Reservoir settings that null the effective cavity noise."""
    return replace(params, r_e=params.r_p, theta_e=math.pi - params.theta_p)


def _cmd_check(args: argparse.Namespace) -> int:
    results = run_checks(args.seed)
    failed = False
    for name, ok, detail in results:
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
        failed = failed or not ok
    if failed:
        raise NumericalError("self-check failed")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityqsl",
        description="Speed-limit dynamics of a driven atom-cavity model")
    sub = parser.add_subparsers(dest="command", required=True)

    p_evolve = sub.add_parser("evolve", help="integrate one trajectory")
    _add_param_flags(p_evolve)
    p_evolve.add_argument("--cutoff", type=int, default=None)
    p_evolve.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p_evolve.add_argument("--out", type=str, default=None)
    p_evolve.set_defaults(func=_cmd_evolve)

    p_qsl = sub.add_parser("qsl", help="speed-limit summary at one point")
    _add_param_flags(p_qsl)
    p_qsl.add_argument("--engine", choices=("analytic", "master", "both"),
                       default="master")
    p_qsl.add_argument("--cutoff", type=int, default=None)
    p_qsl.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p_qsl.add_argument("--out", type=str, default=None)
    p_qsl.set_defaults(func=_cmd_qsl)

    p_sweep = sub.add_parser("sweep", help="evaluate a parameter sweep")
    p_sweep.add_argument("--config", type=str, default=None)
    _add_param_flags(p_sweep)
    for key in ("variable", "second_variable", "constraint_mode", "engine"):
        p_sweep.add_argument(f"--{key}", type=str, default=None)
    p_sweep.add_argument("--range", type=str, default=None)
    p_sweep.add_argument("--second_range", type=str, default=None)
    p_sweep.add_argument("--cutoff", type=str, default=None)
    p_sweep.add_argument("--steps", type=str, default=None)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", type=str, default=None)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_check = sub.add_parser("check", help="run the seeded self-test")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.set_defaults(func=_cmd_check)
    return parser


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main(argv: Sequence[str] | None = None) -> int:
    return cli_main(argv)
