"""Command-line runner: ``coherent-constraints list | run | verify``.

Exit codes: 0 when every row passes, 1 on a numeric failure, 2 on a usage
error (unknown experiment, unknown parameter, malformed value).

Config files are INI-style, one section per experiment::

    [su2-kernel]
    s = 1.5
    seed = 3
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys
from dataclasses import dataclass, field

from .errors import ConfigurationError, ConstraintQuantError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
HEADER = ["quantity", "re", "im", "tolerance", "residual", "pass"]


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    name: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str | None = None
    format: str = "csv"

    def validate(self):
        from .experiments import REGISTRY

        if self.name not in REGISTRY:
            raise UsageError(f"unknown experiment {self.name!r}; see 'coherent-constraints list'")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        unknown = sorted(set(self.parameters) - set(REGISTRY[self.name].defaults))
        if unknown:
            raise UsageError(f"unknown parameter(s) for {self.name}: {', '.join(unknown)}")


def _g(x: float) -> str:
    return f"{x:.17g}"


def format_rows(rows, fmt: str) -> str:
    if fmt == "json":
        data = [{"quantity": r.quantity, "re": r.value.real, "im": r.value.imag, "tolerance": r.tolerance,
                 "residual": r.residual, "pass": r.passed} for r in rows]
        return json.dumps(data, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow([r.quantity, _g(r.value.real), _g(r.value.imag), _g(r.tolerance), _g(r.residual),
                    "true" if r.passed else "false"])
    return buf.getvalue()


def _parse_set(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _load_config(path: str, name: str | None):
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    sections = parser.sections()
    if name is None:
        if len(sections) != 1:
            raise UsageError("config has several sections; choose one with --name")
        name = sections[0]
    if name not in sections:
        raise UsageError(f"config has no section [{name}]")
    return name, dict(parser[name])


def build_config(args) -> ExperimentConfig:
    params, name = {}, args.name
    if args.config:
        name, params = _load_config(args.config, name)
    if name is None:
        raise UsageError("run needs --name or --config")
    seed = params.pop("seed", None)
    params.update(_parse_set(args.set))
    seed = args.seed if args.seed is not None else seed
    try:
        seed = int(seed) if seed is not None else 0
    except ValueError as exc:
        raise UsageError(f"seed must be an integer, got {seed!r}") from exc
    cfg = ExperimentConfig(name, params, seed, args.out, args.format)
    cfg.validate()
    return cfg


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_list(args) -> int:
    from .experiments import catalogue

    exps = catalogue()
    wn = max(len(e.name) for e in exps)
    wa = max(len(e.anchor) for e in exps)
    for exp in exps:
        print(f"{exp.name:{wn}s}  {exp.anchor:{wa}s}  {exp.description}")
    return EXIT_OK


def cmd_run(args) -> int:
    from .experiments import REGISTRY

    cfg = build_config(args)
    try:
        rows = REGISTRY[cfg.name].run(cfg.parameters, cfg.seed)
    except ConfigurationError as exc:
        raise UsageError(str(exc)) from exc
    if args.tol_scale != 1.0:
        rows = _scaled(rows, args.tol_scale)
    _emit(format_rows(rows, cfg.format), cfg.output_path)
    failed = [r for r in rows if not r.passed]
    for r in failed:
        print(f"FAIL {r.quantity}: residual {r.residual:.3e} > tolerance {r.tolerance:.3e}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def _scaled(rows, scale):
    from .acceptance import Row

    return [Row(r.quantity, r.value, r.tolerance * scale, r.residual) for r in rows]


def _parse_criteria(text):
    from .acceptance import CRITERIA

    if not text:
        return None
    try:
        numbers = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--criteria expects comma-separated numbers, got {text!r}") from exc
    bad = [n for n in numbers if n not in CRITERIA]
    if bad or not numbers:
        raise UsageError(f"unknown criterion number(s): {bad or text!r}")
    return numbers


def cmd_verify(args) -> int:
    from .acceptance import run_suite

    results = run_suite(args.suite, args.tol_scale, _parse_criteria(args.criteria))
    rows = []
    for res in results:
        print(res.summary())
        rows += [type(r)(f"{res.number}. {r.quantity}", r.value, r.tolerance, r.residual) for r in res.rows]
    if args.out:
        _emit(format_rows(rows, args.format), args.out)
    failed = [res for res in results if not res.passed]
    if failed:
        print("failing criteria: " + ", ".join(f"{r.number} ({r.title})" for r in failed), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coherent-constraints",
                                 description="Projection-operator experiments for constrained coherent states.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="print the experiment catalogue")

    run = sub.add_parser("run", help="run one experiment and write its result table")
    run.add_argument("--config", help="INI file with one section per experiment")
    run.add_argument("--name", help="experiment name")
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a parameter (repeatable)")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="result file (default: stdout)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--tol-scale", type=float, default=1.0, help=argparse.SUPPRESS)

    ver = sub.add_parser("verify", help="run the acceptance suite")
    ver.add_argument("--suite", choices=("fast", "full"), default="fast")
    ver.add_argument("--criteria", metavar="N[,N...]", help="run only these criterion numbers")
    ver.add_argument("--out", help="write every row to this file")
    ver.add_argument("--format", choices=("csv", "json"), default="csv")
    ver.add_argument("--tol-scale", type=float, default=1.0,
                     help="multiply every tolerance (values below 1 tighten the suite)")
    return ap


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"list": cmd_list, "run": cmd_run, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConstraintQuantError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
