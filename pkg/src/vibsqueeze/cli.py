"""Command-line interface.

Subcommands
-----------
point   evaluate a single parameter point
sweep   evaluate the cartesian grid of a configuration
preset  print or run one of the named figure configurations
wigner  Wigner functions of steady states

Exit status is 0 on success, 1 for configuration errors and 2 for runtime
errors in ``point`` mode.  Sweeps report per-point failures in the
``error_code`` column and still exit with 0.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import ConfigError, VibSqueezeError
from .presets import DEFAULT_COUNT, PRESETS, preset_config, preset_description, wigner_preset_states
from .sweep import (COLUMNS, SweepTable, format_value, parse_config, parse_config_dict, render_table, run_point,
                    run_sweep, wigner_states, wigner_to_csv)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _load(path):
    if path is None:
        return None
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path) from exc


def _apply_flags(cfg, args):
    """Fold the physics flags into a configuration."""
    system = {}
    phonons = {}
    toggles = {}
    if getattr(args, "s", None) is not None:
        system["s"] = args.s
    if getattr(args, "detuning_mev", None) is not None:
        system["detuning"] = {"value": args.detuning_mev, "unit": "meV"}
    if args.dephasing_rate is not None:
        if args.dephasing_rate < 0:
            raise ConfigError("must be >= 0", "--dephasing-rate")
        system["pure_dephasing_rate"] = {"value": args.dephasing_rate, "unit": "ps^-1"}
    if args.no_phonons:
        phonons["alpha"] = {"value": 0.0, "unit": "ps^2"}
    if args.raw_detuning:
        toggles["polaron_shift_convention"] = "raw"
    models = [args.model] if getattr(args, "model", None) else None
    if not (system or phonons or toggles or models):
        return cfg
    d = cfg.to_dict()
    if "s" in system:
        d["system"].pop("rabi", None)
    d["system"].update(system)
    d["phonons"].update(phonons)
    d["toggles"].update(toggles)
    if models:
        d["model"] = models
    if "s" in system:
        d["axes"] = [a for a in d["axes"] if a["name"] not in ("s", "rabi")]
    if "detuning" in system:
        d["axes"] = [a for a in d["axes"] if a["name"] != "detuning"]
    return parse_config_dict(d)


def _base_config(args):
    text = _load(args.config)
    if text is None:
        doc = {}
        if getattr(args, "s", None) is None:
            raise ConfigError("give --config or --s", "--config")
        doc["system"] = {"s": args.s}
        return parse_config_dict(doc)
    return parse_config(text)


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _out_path(args, cfg):
    return args.out if args.out is not None else cfg.block("output")["path"]


def _fmt(args, cfg):
    return args.format or cfg.block("output")["format"]


def cmd_point(args):
    cfg = _apply_flags(_base_config(args), args)
    if cfg.axes:
        raise ConfigError("point mode takes a configuration without axes", "axes")
    rows = []
    for model in cfg.models:
        try:
            rec = run_point(cfg, {}, model, raise_errors=True)
        except ConfigError:
            raise
        except (VibSqueezeError, ArithmeticError, ValueError) as exc:
            code = getattr(exc, "code", "runtime_error")
            print(f"error [{code}]: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        rows.append(tuple(rec[c] for c in COLUMNS))
    table = SweepTable(COLUMNS, tuple(rows), cfg)
    _emit(render_table(table, _fmt(args, cfg)), _out_path(args, cfg))
    return EXIT_OK


def cmd_sweep(args):
    cfg = _apply_flags(_base_config(args), args)
    table = run_sweep(cfg, threads=args.threads)
    _emit(render_table(table, _fmt(args, cfg)), _out_path(args, cfg))
    failed = sum(1 for v in table.column("error_code") if v)
    if failed:
        print(f"{failed} of {len(table.rows)} points failed; see the error_code column", file=sys.stderr)
    return EXIT_OK


def _run_wigner(cfg, states, args):
    doc = wigner_states(cfg, states)
    fmt = _fmt(args, cfg)
    text = json.dumps(doc) if fmt == "json" else wigner_to_csv(doc, cfg.precision)
    _emit(text, _out_path(args, cfg))
    return EXIT_OK


def cmd_preset(args):
    if args.list:
        for name in PRESETS:
            print(f"{name:8s} {preset_description(name)}")
        return EXIT_OK
    if args.name is None:
        raise ConfigError("name a preset or use --list", "preset")
    if args.name not in PRESETS:
        raise ConfigError(f"unknown preset {args.name!r} (available: {', '.join(PRESETS)})", "preset")
    cfg = _apply_flags(parse_config_dict(preset_config(args.name, args.count)), args)
    if args.name == "wigner":
        if args.emit_config or not args.run:
            _emit(json.dumps({"config": cfg.to_dict(), "states": wigner_preset_states()}, indent=2), args.out)
            return EXIT_OK
        return _run_wigner(cfg, wigner_preset_states(), args)
    if args.emit_config or not args.run:
        _emit(cfg.to_json(), args.out)
        return EXIT_OK
    table = run_sweep(cfg, threads=args.threads)
    _emit(render_table(table, _fmt(args, cfg)), _out_path(args, cfg))
    return EXIT_OK


def cmd_wigner(args):
    cfg = _apply_flags(_base_config(args), args)
    if cfg.axes:
        raise ConfigError("wigner mode takes a configuration without axes", "axes")
    states = [{"label": "state"}]
    if args.vacuum:
        states = [{"label": "vacuum", "vacuum": True}]
    try:
        return _run_wigner(cfg, states, args)
    except ConfigError:
        raise
    except (VibSqueezeError, ArithmeticError, ValueError) as exc:
        print(f"error [{getattr(exc, 'code', 'runtime_error')}]: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def _physics_flags(p, *, point_like=True):
    p.add_argument("--config", help="JSON configuration file ('-' for stdin)")
    p.add_argument("--out", help="output file (default: stdout or output.path of the config)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default: output.format)")
    p.add_argument("--no-phonons", action="store_true", help="set the phonon coupling alpha to zero")
    p.add_argument("--dephasing-rate", type=float, metavar="RATE", help="pure dephasing rate in ps^-1")
    p.add_argument("--raw-detuning", action="store_true",
                   help="treat the configured detuning as the bare one, without the polaron-shift offset")
    if point_like:
        p.add_argument("--s", type=float, help="drive strength s = 2 (Omega/Gamma)^2 (replaces s/rabi axes)")
        p.add_argument("--detuning-mev", type=float, help="detuning in meV (replaces a detuning axis)")
        p.add_argument("--model", choices=("full_phonon", "atomic", "thermal_approx"))


def build_parser():
    parser = argparse.ArgumentParser(prog="vibsqueeze", description="Phonon-dressed resonance fluorescence squeezing.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="evaluate one parameter point")
    _physics_flags(p)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="evaluate the grid of a configuration")
    _physics_flags(p)
    p.add_argument("--threads", type=int, help="worker processes (0 = all CPUs; default $VIBSQUEEZE_THREADS or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="print or run a named configuration")
    p.add_argument("name", nargs="?", help="preset name")
    p.add_argument("--list", action="store_true", help="list presets")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--emit-config", action="store_true", help="print the configuration (default)")
    g.add_argument("--run", action="store_true", help="run the preset")
    p.add_argument("--count", type=int, default=DEFAULT_COUNT, help="points per continuous axis")
    p.add_argument("--threads", type=int)
    _physics_flags(p, point_like=False)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("wigner", help="Wigner function of a steady state")
    _physics_flags(p)
    p.add_argument("--vacuum", action="store_true", help="use the vacuum instead of a steady state")
    p.set_defaults(func=cmd_wigner)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())


__all__ = ["main", "build_parser", "format_value"]
