"""Command-line entry point: ``qdirac <subcommand> [flags]``.

Exit status is 0 when every check passes, 1 when a check fails and 2
for configuration, parameter or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ExperimentConfig, load_yaml
from .errors import ConfigError, QDiracError
from .experiments import run, write_tables
from .verification import verify_all

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

SUBCOMMANDS = {
    "spectrum": "spectrum",
    "mandel": "mandel",
    "zitter": None,  # number or coherent, decided by --n / --alpha
    "fig2": "fig2",
    "nr": "nr-limit",
    "grid": "grid-verify",
    "equivalence": "equivalence",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, multi_q=False):
    p.add_argument("--config", help="YAML file; flags override its values")
    if multi_q:
        p.add_argument("--q", type=float, nargs="+")
    else:
        p.add_argument("--q", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--trunc", type=int)
    p.add_argument("--tau-max", dest="tau_max", type=float)
    p.add_argument("--tau-steps", dest="tau_steps", type=int)
    p.add_argument("--out", help="output directory (default: results)")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdirac", description="q-deformed Dirac oscillator experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        _common(p, multi_q=name == "mandel")
        if name == "mandel":
            p.add_argument("--alpha-sq-max", dest="alpha_sq_max", type=float)
            p.add_argument("--sweep-steps", dest="sweep_steps", type=int)
        if name == "grid":
            p.add_argument("--points", type=int, nargs="+")
            p.add_argument("--shift-steps", dest="shift_steps", type=int)
        if name == "nr":
            p.add_argument("--c-up", dest="c_up", type=float)
            p.add_argument("--c-down", dest="c_down", type=float)
    p = sub.add_parser("run", help="run the experiment named in a config file")
    _common(p)
    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--out")
    v.add_argument("--seed", type=int, default=12345)
    v.add_argument("--tol", action="append", default=[], metavar="CHECK=VALUE",
                   help="override a tolerance, e.g. C1.spectrum_rel_err=1e-12")
    return parser


_NON_CONFIG = {"command", "config", "tol"}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data = load_yaml(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG and v is not None}
    target = SUBCOMMANDS.get(args.command)
    if args.command == "zitter":
        if "n" in flags and "alpha" in flags:
            raise ConfigError("zitter takes either --n (number state) or --alpha (coherent state)")
        if "n" in flags:
            target = "zitter-number"
        elif "alpha" in flags:
            target = "zitter-coherent"
        else:
            target = data.get("experiment", "zitter-number")
            if target not in ("zitter-number", "zitter-coherent"):
                raise ConfigError(f"config experiment {target!r} does not match subcommand zitter")
    if args.command == "run":
        if "experiment" not in data:
            raise ConfigError("run needs --config with an 'experiment' key")
        target = data["experiment"]
    elif "experiment" in data and data["experiment"] != target:
        raise ConfigError(f"config experiment {data['experiment']!r} does not match subcommand {args.command}")
    merged = {**data, **flags, "experiment": target}
    return ExperimentConfig.from_dict(merged)


def _parse_overrides(items) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects CHECK=VALUE, got {item!r}")
        try:
            out[key] = float(value)
        except ValueError as exc:
            raise ConfigError(f"--tol value for {key} is not a number") from exc
    return out


def _emit(report, out: Path) -> None:
    for c in report.checks:
        print(c.line())
    print(f"{report.experiment}: {'PASS' if report.passed else 'FAIL'}")
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{report.experiment}_report.json"
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            overrides = _parse_overrides(args.tol)
            try:
                report = verify_all(overrides, seed=args.seed)
            except KeyError as exc:
                raise ConfigError(exc.args[0]) from exc
            _emit(report, Path(args.out or "results"))
        else:
            cfg = config_from_args(args)
            report, tables = run(cfg)
            write_tables(tables, cfg.out)
            _emit(report, Path(cfg.out))
    except (QDiracError, ValueError) as exc:
        print(f"qdirac: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qdirac: I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
