"""Command-line front end.

Commands::

    relproxy scenario <name> --out DIR [--format csv|json]
    relproxy scenario --list
    relproxy grid --dx 1 --k0 0 --mass 0 --x -12:12:0.02 --t 0 --channels born,...
    relproxy check --suite fast|full [--tol-profile default|strict] [--out FILE]

Settings for ``grid`` are layered: command-line flags, then the key-value
file named by ``$RELPROXY_CONFIG``, then built-in defaults.

Exit codes: 0 success, 2 usage, 3 unsupported closed form or capability,
4 failed check or accuracy, 5 I/O.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, numerics
from .errors import AccuracyError, RelProxyError, UsageError
from .grid import DEFAULT_CHANNELS, KG_CHANNELS, axis, build_grid
from .io import grid_to_csv, grid_to_json, write_report, write_text
from .packets import PacketSpec

CONFIG_ENV = "RELPROXY_CONFIG"
GRID_DEFAULTS = {
    "delta_x": "1", "k0": "0", "mass": "0", "charge_q": "1", "species": "scalar",
    "x": "-12:12:0.02", "t": "0", "channels": ",".join(DEFAULT_CHANNELS),
    "method": "auto", "tol": str(numerics.DEFAULT_TOL), "format": "csv",
}
_CONFIG_ALIASES = {"dx": "delta_x"}
METHOD_NAMES = {"auto": "auto", "closed": "closed_form", "closed_form": "closed_form",
                "quad": "quadrature", "quadrature": "quadrature"}


def load_config(path: str | None) -> dict[str, str]:
    """Read ``key = value`` lines; unknown keys are a usage error."""
    if not path:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{CONFIG_ENV}: cannot read {path}: {exc.strerror or exc}") from None
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string("[relproxy]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"{CONFIG_ENV}: malformed config: {exc}") from None
    out = {}
    for key, value in parser["relproxy"].items():
        key = _CONFIG_ALIASES.get(key, key)
        if key not in GRID_DEFAULTS:
            raise UsageError(f"{CONFIG_ENV}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def parse_range(text: str, flag: str) -> np.ndarray:
    """``min:max:step`` (inclusive) or a single value."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"{flag}: expected min:max:step or a number, got {text!r}") from None
    if len(nums) == 1:
        return np.array(nums)
    if len(nums) != 3:
        raise UsageError(f"{flag}: expected min:max:step, got {text!r}")
    lo, hi, step = nums
    if not lo < hi:
        raise UsageError(f"{flag}: need min < max, got {text!r}")
    if not step > 0:
        raise UsageError(f"{flag}: need step > 0, got {text!r}")
    return axis(lo, hi, step)


def _float(settings, key, flag):
    try:
        return float(settings[key])
    except ValueError:
        raise UsageError(f"{flag}: not a number: {settings[key]!r}") from None


def _spot_check(spec, grid_fields, tol):
    """Compare a few grid points against adaptive synthesis at ``tol``."""
    from . import fields
    xs, ts = grid_fields
    picks = {(0, 0), (len(ts) - 1, len(xs) - 1), (len(ts) // 2, len(xs) // 2)}
    for ti, xi in sorted(picks):
        for fn in (fields.psi_x, fields.phi_x):
            a = fn(spec, xs[xi], ts[ti], "quadrature", tol=tol)
            b = fn(spec, xs[xi], ts[ti], "quadrature", tol=max(tol / 10, 1e-14))
            err = max(abs(a.value - b.value), abs(a.d_t - b.d_t), abs(a.d_x - b.d_x))
            if err > tol:
                raise AccuracyError(f"quadrature at ({xs[xi]}, {ts[ti]}) misses tol {tol:g}")


def cmd_grid(args) -> int:
    settings = dict(GRID_DEFAULTS)
    settings.update(load_config(os.environ.get(CONFIG_ENV)))
    flags = {"delta_x": args.dx, "k0": args.k0, "mass": args.mass, "charge_q": args.charge_q,
             "x": args.x, "t": args.t, "channels": args.channels, "method": args.method,
             "tol": args.tol, "format": args.format}
    settings.update({k: v for k, v in flags.items() if v is not None})

    spec = PacketSpec(delta_x=_float(settings, "delta_x", "--dx"), k0=_float(settings, "k0", "--k0"),
                      mass=_float(settings, "mass", "--mass"),
                      charge_q=_float(settings, "charge_q", "--charge-q"),
                      species=settings["species"])
    x_axis = parse_range(settings["x"], "--x")
    t_axis = parse_range(settings["t"], "--t")
    if x_axis.size < 2:
        raise UsageError("--x: need at least two samples")
    channels = [c.strip() for c in settings["channels"].split(",") if c.strip()]
    bad = [c for c in channels if c not in KG_CHANNELS]
    if bad or not channels:
        raise UsageError(f"--channels: unknown {bad}; valid: {','.join(KG_CHANNELS)}")
    if settings["method"] not in METHOD_NAMES:
        raise UsageError(f"--method: expected auto|closed|quad, got {settings['method']!r}")
    tol = _float(settings, "tol", "--tol")
    if not tol > 0:
        raise UsageError("--tol: must be > 0")
    fmt = settings["format"]
    if fmt not in ("csv", "json"):
        raise UsageError(f"--format: expected csv or json, got {fmt!r}")

    grid = build_grid(spec, x_axis, t_axis, channels, METHOD_NAMES[settings["method"]],
                      extra_meta={"tol": tol})
    if grid.metadata["method"] == "quadrature":
        _spot_check(spec, (x_axis, t_axis), tol)
    text = grid_to_csv(grid) if fmt == "csv" else grid_to_json(grid)
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_scenario(args) -> int:
    from .scenarios import PRESETS, preset_names, run_scenario
    if args.list:
        for name in preset_names():
            p = PRESETS[name]
            figs = ",".join(str(f) for f in p.figures)
            print(f"{name:22s} fig {figs:12s} {p.description}")
        return 0
    if not args.name:
        raise UsageError(f"scenario name required; valid: {', '.join(preset_names())}")
    if not args.out:
        raise UsageError("--out is required")
    paths, report = run_scenario(args.name, args.out, args.format)
    for p in paths:
        print(p)
    failed = [c.name for c in report.checks if not c.passed]
    for name in failed:
        print(f"FAIL {name}", file=sys.stderr)
    return 4 if failed else 0


def _num(v) -> str:
    if isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool):
        return f"{float(v):.10g}"
    return str(v)


def cmd_check(args) -> int:
    from .checks import run_checks
    report = run_checks(args.suite, args.tol_profile)
    for c in sorted(report.checks, key=lambda c: c.name):
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} measured={_num(c.measured)} "
              f"expected={_num(c.expected)} tol={_num(c.tol)}")
    if args.out:
        write_report(report, args.out)
    return 0 if report.passed else 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relproxy", description="Position proxies for "
                                     "relativistic Gaussian wave packets.")
    parser.add_argument("--version", action="version", version=f"relproxy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", help="regenerate the data of one figure preset")
    p.add_argument("name", nargs="?")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--list", action="store_true", help="list presets and exit")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("grid", help="export densities on an ad-hoc grid")
    p.add_argument("--dx", help="Gaussian width parameter delta_x")
    p.add_argument("--k0")
    p.add_argument("--mass")
    p.add_argument("--charge-q", dest="charge_q")
    p.add_argument("--x", help="min:max:step")
    p.add_argument("--t", help="min:max:step or a single time")
    p.add_argument("--channels", help="comma-separated channel names")
    p.add_argument("--method", help="auto, closed or quad")
    p.add_argument("--tol")
    p.add_argument("--format")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("--suite", choices=("fast", "full"), default="fast")
    p.add_argument("--tol-profile", dest="tol_profile", choices=("default", "strict"),
                   default="default")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_check)
    return parser


_VALUE_FLAGS = ("--x", "--t", "--dx", "--k0", "--mass", "--charge-q", "--tol")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--x -1:1:0.5`` into ``--x=-1:1:0.5`` so argparse accepts it."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        a = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if a in _VALUE_FLAGS and nxt.startswith("-") and (nxt[1:2].isdigit() or nxt[1:2] == "."):
            out.append(f"{a}={nxt}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    try:
        return args.func(args)
    except RelProxyError as exc:
        print(f"relproxy: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
