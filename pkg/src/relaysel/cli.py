"""Command-line front end.

Examples::

    relaysel rate-vs-snr --trials 100000 --out fig2.csv
    relaysel outage-vs-snr --d 1,1.5 --snr-db 10:25:0.5 --rho 1
    relaysel dist-check --lambda 1 --d 1
    relaysel custom --config sweep.cfg --strict

Precedence: preset defaults < ``--config`` file < command-line flags.
The worker count comes from the ``RELAYSEL_WORKERS`` environment variable.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (PRESET_FOR, PRESETS, ConfigError, Experiment, SweepConfig,
                          dist_check, resolve, rows_to_csv, run_experiment, snr_range,
                          write_output)
from .geometry import PolicyKind
from .metrics import Fading

# config-file key -> SweepConfig field
_KEYS = {
    "snr_db": "snr_db", "snr-db": "snr_db", "lambda": "lambdas", "lambdas": "lambdas",
    "d": "ds", "alpha": "alpha", "rho": "rho", "fading": "fadings", "policies": "policies",
    "trials": "n_trials", "n_trials": "n_trials", "seed": "master_seed",
    "master_seed": "master_seed", "out": "output_path", "output_path": "output_path",
    "strict": "strict", "window": "window_radius", "window_radius": "window_radius",
    "metric": "metric", "instantaneous": "instantaneous",
}


def parse_floats(text: str) -> tuple:
    """Comma list of numbers or ranges ``start:stop:step`` (inclusive)."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ":" in part:
                a, b, step = (float(v) for v in part.split(":"))
                out.extend(snr_range(a, b, step))
            else:
                out.append(float(part))
        except ValueError as exc:
            raise ConfigError(f"cannot parse number list {text!r}") from exc
    if not out:
        raise ConfigError(f"empty list {text!r}")
    return tuple(out)


def parse_fading(text: str) -> tuple:
    text = text.strip().lower()
    if text == "both":
        return (Fading.NONE, Fading.RAYLEIGH)
    try:
        return tuple(Fading(t.strip()) for t in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"unknown fading {text!r}") from exc


def parse_policies(text: str) -> tuple:
    try:
        return tuple(PolicyKind.parse(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"unknown policy in {text!r}") from exc


def _bool(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _convert(key: str, raw: str):
    try:
        if key in ("snr_db", "lambdas", "ds"):
            return parse_floats(raw)
        if key == "fadings":
            return parse_fading(raw)
        if key == "policies":
            return parse_policies(raw)
        if key in ("n_trials", "master_seed"):
            return int(raw)
        if key in ("alpha", "rho", "window_radius"):
            return float(raw)
        if key in ("strict", "instantaneous"):
            return _bool(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        field = _KEYS.get(key.lower())
        if field is None:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        values[field] = _convert(field, raw)
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relaysel",
                                     description="Location-based relay selection experiments.")
    sub = parser.add_subparsers(dest="verb", required=True)
    for exp in Experiment:
        p = sub.add_parser(exp.value)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--lambda", dest="lambdas", help="relay intensity list")
        p.add_argument("--d", dest="ds", help="half source-destination distance list")
        p.add_argument("--alpha", type=float)
        p.add_argument("--snr-db", dest="snr_db", help="list or range a:b:step")
        p.add_argument("--rho", type=float, help="target rate for outage")
        p.add_argument("--fading", choices=["none", "rayleigh", "both"])
        p.add_argument("--policies", help="comma list of optimum,midpoint,nearest_source,nearest_dest")
        p.add_argument("--trials", dest="n_trials", type=int)
        p.add_argument("--seed", dest="master_seed", type=int)
        p.add_argument("--window", dest="window_radius", type=float)
        p.add_argument("--out", dest="output_path")
        p.add_argument("--strict", action="store_true", default=None,
                       help="exit 1 if any analytic/Monte Carlo pair disagrees")
        if exp is Experiment.CUSTOM:
            p.add_argument("--metric", choices=["rate", "outage"])
            p.add_argument("--instantaneous", action="store_true", default=None,
                           help="rates per fading draw instead of fading averages")
    return parser


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    exp = Experiment(args.verb)
    base = PRESETS[PRESET_FOR[exp]] if exp in PRESET_FOR else SweepConfig()
    overrides = {"experiment": exp}
    if args.config:
        overrides.update(read_config(args.config))
    flags = vars(args)
    for key in ("lambdas", "ds", "snr_db"):
        if flags.get(key) is not None:
            overrides[key] = parse_floats(flags[key])
    if flags.get("fading"):
        overrides["fadings"] = parse_fading(flags["fading"])
    if flags.get("policies"):
        overrides["policies"] = parse_policies(flags["policies"])
    for key in ("alpha", "rho", "n_trials", "master_seed", "window_radius",
                "output_path", "strict", "metric", "instantaneous"):
        if flags.get(key) is not None:
            overrides[key] = flags[key]
    return resolve(base, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.experiment is Experiment.DIST_CHECK:
            report = dist_check(cfg)
            text = report.format()
            sys.stdout.write(text)
            if cfg.output_path:
                write_output(text, cfg.output_path)
            return 0 if report.ok else 1
        rows = run_experiment(cfg)
        write_output(rows_to_csv(rows), cfg.output_path)
    except ConfigError as exc:
        print(f"relaysel: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"relaysel: {exc}", file=sys.stderr)
        return 3
    bad = [r for r in rows if not r.within_tolerance()]
    for r in bad:
        print(f"relaysel: mismatch {r.policy.value}/{r.fading.value} snr={r.snr_db} "
              f"lambda={r.lam} d={r.d}: analytic {r.analytic:.5f} vs mc {r.mc_mean:.5f} "
              f"+- {r.mc_stderr:.5f}", file=sys.stderr)
    return 1 if (cfg.strict and bad) else 0


if __name__ == "__main__":
    sys.exit(main())
