"""Command-line entry point.

    critmet <model> <operation> [--param value | --param-grid min:max:points[:log]]...
            [--out PATH] [--format csv|json] [--workers W] [--strict] [--fit X:Y[:linear]] [--no-plot]
    critmet preset <name> [--out DIR] [--workers W] [--no-plot]
    critmet list

Exit codes: 0 success, 2 usage error, 3 domain error in strict mode, 4 I/O error.
"""
import argparse
import os
import sys
from pathlib import Path

from .errors import ConfigurationError, CritmetError, ValidationError
from .harness import REGISTRY, ExperimentConfig, describe, emit, fit, parse_grid, render, run

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_workers():
    raw = os.environ.get("CRITMET_WORKERS", "1")
    try:
        w = int(raw)
    except ValueError:
        raise UsageError(f"CRITMET_WORKERS must be an integer, got {raw!r}") from None
    if w < 1:
        raise UsageError("CRITMET_WORKERS must be at least 1")
    return w


def _common(parser):
    parser.add_argument("--out", default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--no-plot", action="store_true")


def _parse_value(text):
    try:
        if "," in text:
            return [float(v) for v in text.split(",") if v]
        return float(text)
    except ValueError:
        raise UsageError(f"bad numeric value {text!r}") from None


def _parse_bindings(extra):
    """Turn ['--omega', '1', '--coupling-grid', '0:3:301'] into a bindings dict."""
    bindings = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        if "=" in tok:
            name, value = tok[2:].split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise UsageError(f"{tok} needs a value")
            name, value = tok[2:], extra[i + 1]
            i += 2
        name = name.replace("-", "_")
        if name.endswith("_grid"):
            name = name[:-5]
            try:
                bindings[name] = parse_grid(value)
            except ValidationError as exc:
                raise UsageError(str(exc)) from None
        else:
            bindings[name] = _parse_value(value)
    return bindings


def _plot(table, n_params, path):
    from .plotting import auto_plot
    return auto_plot(table, n_params, path)


def _run_sweep(args, extra):
    workers = args.workers if args.workers is not None else _default_workers()
    if workers < 1:
        raise UsageError("--workers must be at least 1")
    cfg = ExperimentConfig(args.model, args.operation, _parse_bindings(extra), out=args.out,
                           format=args.format, workers=workers, strict=args.strict)
    table = run(cfg)
    for spec in args.fit or []:
        parts = spec.split(":")
        if len(parts) not in (2, 3):
            raise UsageError("--fit takes X:Y or X:Y:linear")
        kind = "linear" if len(parts) == 3 and parts[2] == "linear" else "loglog"
        fit(table, parts[0], parts[1], kind)
    if args.out is None:
        sys.stdout.write(render(table, args.format))
        return EXIT_OK
    emit(table, args.format, args.out)
    if not args.no_plot:
        _plot(table, len(REGISTRY[args.model][args.operation].params), str(Path(args.out).with_suffix(".png")))
    return EXIT_OK


def _run_preset(args):
    from .presets import PRESETS
    if args.name not in PRESETS:
        raise UsageError(f"unknown preset {args.name!r}; choose from {', '.join(PRESETS)}")
    workers = args.workers if args.workers is not None else _default_workers()
    outdir = Path(args.out or f"critmet-{args.name}")
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {outdir}: {exc.strerror or exc}") from exc
    for name, table, n_params in PRESETS[args.name](workers=workers):
        path = outdir / f"{name}.csv"
        emit(table, "csv", path)
        print(f"{name}: {len(table.rows)} rows -> {path}")
        for key, res in table.meta.get("fits", {}).items():
            vals = ", ".join(f"{k}={v:.6g}" for k, v in res.items())
            print(f"  fit {key}: {vals}")
        if not args.no_plot:
            png = _plot(table, n_params, str(path.with_suffix(".png")))
            if png:
                print(f"  figure -> {png}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="critmet", description="Critical quantum metrology experiments.")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("list", help="list models and operations")
    pre = sub.add_parser("preset", help="run a named acceptance experiment")
    pre.add_argument("name")
    _common(pre)
    return parser


def _sweep_parser():
    p = _Parser(prog="critmet <model> <operation>")
    p.add_argument("model")
    p.add_argument("operation")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--fit", action="append")
    _common(p)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if not argv or argv[0] in ("-h", "--help"):
            build_parser().print_help()
            return EXIT_OK if argv else EXIT_USAGE
        if argv[0] in ("list", "preset"):
            args = build_parser().parse_args(argv)
            if args.command == "list":
                print(describe())
                return EXIT_OK
            return _run_preset(args)
        args, extra = _sweep_parser().parse_known_args(argv)
        return _run_sweep(args, extra)
    except (UsageError, ValidationError, ConfigurationError) as exc:
        print(f"critmet: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CritmetError as exc:
        print(f"critmet: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"critmet: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
