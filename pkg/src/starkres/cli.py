"""Command-line interface: ``starkres <command> ...``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 verification failure.  Numbers are written with 17 significant digits so
output is lossless and byte-for-byte reproducible.
"""
from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .airy import ai
from .asymptotics import (FTooSmallError, GPoleError, GuardViolationError, WidthUnderflowError,
                          bound_state_resonance, string_line, string_positive_axis,
                          track_reflection_zero_resonance)
from .contour import BoundaryZeroError, ComplexRect
from .potential import Potential, PotentialError, parse_potential
from .resonance import (DepthExceededError, EscapedDomainError, NoConvergenceError,
                        refine_root, scan_rectangle)
from .scattering import DegenerateFunctionError, amplitudes, find_F_zeros, reflection_F
from .spectrum import bound_states, predicted_width
from .verification import ZERO_WINDOW, default_workers, run_all

EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_VERIFY = 3

NUMERIC_ERRORS = (ArithmeticError, FTooSmallError, DegenerateFunctionError, GuardViolationError,
                  BoundaryZeroError)


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    potential_path: str | None = None
    f_values: list[float] = field(default_factory=list)
    windows: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if any(not (f > 0 and math.isfinite(f)) for f in self.f_values):
            raise ConfigError(f"field strengths must be positive and finite: {self.f_values}")
        # sweeps run with f decreasing
        self.f_values = sorted(set(self.f_values), reverse=True)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(float(obj.real)), "im": _jsonable(float(obj.imag))}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return _Num(x)
    return obj


class _Num(float):
    """A float that serializes with 17 significant digits."""


def dumps(obj) -> str:
    """JSON text with every float at 17 significant digits."""
    def enc(o, ind):
        pad = "  " * (ind + 1)
        if isinstance(o, _Num):
            return format(float(o), ".17g")
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(v, ind + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + "  " * ind + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            return "[\n" + ",\n".join(pad + enc(v, ind + 1) for v in o) + "\n" + "  " * ind + "]"
        return json.dumps(o)
    return enc(_jsonable(obj), 0) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else fmt(v) for v in r])
    return buf.getvalue()


def _table(cfg: RunConfig, header: list[str], rows: list[list]) -> str:
    if cfg.format == "json":
        return dumps([dict(zip(header, r)) for r in rows])
    return _csv(header, rows)


def _load(path: str | None) -> Potential:
    if path is None:
        raise ConfigError("--potential is required")
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read potential file {path!r}: {e.strerror}") from e
    try:
        return parse_potential(text)
    except PotentialError as e:
        raise ConfigError(f"invalid potential {path!r}: {e}") from e


def _interval(text: str, what: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError as e:
        raise ConfigError(f"{what} must be 'a:b', got {text!r}") from e
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ConfigError(f"{what} must satisfy a < b, got {text!r}")
    return a, b


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"{what} must be a comma-separated list of numbers") from e


# commands ----------------------------------------------------------------

def cmd_airy(cfg: RunConfig, args) -> str:
    w = complex(args.re, args.im)
    e = ai(w)
    header = ["re_w", "im_w", "re_mantissa", "im_mantissa", "re_dmantissa", "im_dmantissa",
              "re_scale", "im_scale", "method", "re_value", "im_value", "re_derivative",
              "im_derivative"]
    with np.errstate(over="ignore"):
        v, d = e.value, e.derivative
    row = [w.real, w.imag, e.value_mantissa.real, e.value_mantissa.imag,
           e.derivative_mantissa.real, e.derivative_mantissa.imag, e.scale_exponent.real,
           e.scale_exponent.imag, e.method_tag.value, v.real, v.imag, d.real, d.imag]
    return _table(cfg, header, [row])


def cmd_scattering(cfg: RunConfig, args) -> str:
    p = _load(cfg.potential_path)
    parts = args.k_grid.split(":")
    try:
        re0, re1, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError) as e:
        raise ConfigError(f"--k-grid must be 're0:re1:n', got {args.k_grid!r}") from e
    if n < 1 or re0 <= 0 or re1 < re0:
        raise ConfigError("--k-grid needs 0 < re0 <= re1 and n >= 1")
    rows = []
    for k in np.linspace(re0, re1, n):
        a = amplitudes(p, complex(k))
        F = reflection_F(p, complex(k))
        rows.append([float(k), a.t.real, a.t.imag, a.rho.real, a.rho.imag,
                     abs(a.r_left) ** 2 + abs(a.t) ** 2, F.real, F.imag])
    return _table(cfg, ["k", "re_t", "im_t", "re_rho", "im_rho", "unitarity", "re_F", "im_F"],
                  rows)


def cmd_spectrum(cfg: RunConfig, args) -> str:
    p = _load(cfg.potential_path)
    states = [s.to_dict() for s in bound_states(p)]
    if cfg.format == "csv":
        keys = ["lambda0", "kappa_minus", "kappa_plus", "lambda1"]
        return _csv(keys, [[s[k] for k in keys] for s in states])
    return dumps(states)


def _scan_one(p: Potential, f: float, rect: ComplexRect, depth: int):
    return [[f, r.k.real, r.k.imag, r.z.real, r.z.imag, r.residual, r.method]
            for r in scan_rectangle(p, f, rect, max_depth=depth)]


def cmd_scan(cfg: RunConfig, args) -> str:
    p = _load(cfg.potential_path)
    a, b = _interval(args.re_k, "--re-k")
    c, d = _interval(args.im_k, "--im-k")
    rect = ComplexRect(a, b, c, d)
    if d > 0 or a < 0:
        raise ConfigError("the scan rectangle must lie in the lower-right quadrant")
    fs = cfg.f_values
    workers = min(default_workers(), len(fs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_scan_one, [p] * len(fs), fs, [rect] * len(fs),
                                [args.max_depth] * len(fs)))
    else:
        parts = [_scan_one(p, f, rect, args.max_depth) for f in fs]
    rows = [r for part in parts for r in part]
    return _table(cfg, ["f", "re_k", "im_k", "re_z", "im_z", "residual", "method"], rows)


def _string_rows(p: Potential, f: float, family: str, window, rect, refine: bool):
    rows = []
    if family in ("positive-axis", "line"):
        fn = string_positive_axis if family == "positive-axis" else string_line
        for q in fn(p, f, window or (0.9, 1.1)):
            exact = refine_root(p, q.k_pred, f).k if refine else None
            rows.append([q.family.value, q.j, q.k_pred, exact, q.theta, q.l])
    elif family == "reflection-zero":
        for zero in find_F_zeros(p, rect):
            exact = None
            if refine and zero.order == 1:
                exact = track_reflection_zero_resonance(p, f, zero, halvings=0).k
            rows.append(["reflection_zero", None, zero.k0, exact, None, None])
    else:
        for j, bs in enumerate(bound_states(p)):
            z0 = bs.lambda0 + f * bs.lambda1 - 1j * predicted_width(bs, f)
            exact = bound_state_resonance(p, f, bs)[0].k if refine else None
            rows.append(["bound_state", j, cmath.sqrt(z0), exact, None, None])
    out = []
    for fam, j, kp, ke, th, l in rows:
        diff = abs(kp - ke) if ke is not None else None
        out.append([fam, j, kp.real, kp.imag, None if ke is None else ke.real,
                    None if ke is None else ke.imag, diff, th, l])
    return out


def cmd_string(cfg: RunConfig, args) -> str:
    p = _load(cfg.potential_path)
    window = _interval(args.window, "--window") if args.window else None
    if window is not None and window[0] <= 0:
        raise ConfigError("--window must lie in (0, inf)")
    try:
        rect = ComplexRect.parse(args.rect) if args.rect else ZERO_WINDOW
    except ValueError as e:
        raise ConfigError(str(e)) from e
    rows = []
    for f in cfg.f_values:
        rows += _string_rows(p, f, args.family, window, rect, args.refine)
    header = ["family", "j", "re_k_pred", "im_k_pred", "re_k_exact", "im_k_exact",
              "abs_diff", "theta", "l"]
    return _table(cfg, header, rows)


def cmd_verify(cfg: RunConfig, args) -> tuple[str, int]:
    p = _load(cfg.potential_path) if cfg.potential_path else None
    rep = run_all(p, cfg.f_values, workers=default_workers())
    for c in rep.criteria:
        print(c.line(), file=sys.stderr)
    return dumps(rep.to_dict()), 0 if rep.overall else EXIT_VERIFY


# entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="starkres", description="Resonances of -d^2/dx^2 + V(x) + f x.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default="csv"):
        sp.add_argument("--format", choices=["csv", "json"], default=fmt_default)
        sp.add_argument("--output", help="write here instead of stdout")

    sp = sub.add_parser("airy", help="evaluate Ai at a complex point")
    sp.add_argument("--re", type=float, required=True)
    sp.add_argument("--im", type=float, required=True)
    common(sp)

    sp = sub.add_parser("scattering", help="field-free scattering data on a real k grid")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--k-grid", required=True, help="re0:re1:n")
    common(sp)

    sp = sub.add_parser("spectrum", help="bound states and their tail data")
    sp.add_argument("--potential", required=True)
    common(sp, "json")

    sp = sub.add_parser("scan", help="all resonances in a k rectangle")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--f", required=True, help="field strength(s), comma separated")
    sp.add_argument("--re-k", required=True, help="a:b")
    sp.add_argument("--im-k", required=True, help="c:d")
    sp.add_argument("--max-depth", type=int, default=12)
    common(sp)

    sp = sub.add_parser("string", help="asymptotic predictions for one resonance family")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--f", required=True, help="field strength(s), comma separated")
    sp.add_argument("--family", required=True,
                    choices=["positive-axis", "line", "reflection-zero", "bound-state"])
    sp.add_argument("--window", help="a:b (k for positive-axis, eta for line)")
    sp.add_argument("--rect", help="re0:re1:im0:im1 search window for reflection zeros")
    sp.add_argument("--refine", action="store_true", help="also compute the exact resonances")
    common(sp)

    sp = sub.add_parser("verify", help="run the acceptance criteria")
    sp.add_argument("--potential")
    sp.add_argument("--f-list", default="0.2,0.1,0.05")
    common(sp, "json")
    return ap


def _config(args) -> RunConfig:
    fs = []
    if getattr(args, "f", None) is not None:
        fs = _floats(args.f, "--f")
    if getattr(args, "f_list", None) is not None:
        fs = _floats(args.f_list, "--f-list")
    if args.command in ("scan", "string", "verify") and not fs:
        raise ConfigError("at least one field strength is required")
    return RunConfig(args.command, getattr(args, "potential", None), fs,
                     output_path=args.output, format=args.format)


COMMANDS = {"airy": cmd_airy, "scattering": cmd_scattering, "spectrum": cmd_spectrum,
            "scan": cmd_scan, "string": cmd_string, "verify": cmd_verify}


_VALUE_FLAGS = {"--re", "--im", "--re-k", "--im-k", "--window", "--rect", "--f", "--f-list",
                "--k-grid"}


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--im-k -0.3:-1e-5`` into ``--im-k=-0.3:-1e-5`` so argparse keeps the value."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_attach_negative_values(argv))
        cfg = _config(args)
        out = COMMANDS[cfg.command](cfg, args)
        code = 0
        if isinstance(out, tuple):
            out, code = out
        if cfg.output_path:
            try:
                Path(cfg.output_path).write_text(out)
            except OSError as e:
                raise ConfigError(f"cannot write {cfg.output_path!r}: {e.strerror}") from e
        else:
            sys.stdout.write(out)
        return code
    except ConfigError as e:
        print(f"starkres: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoConvergenceError, EscapedDomainError, DepthExceededError, GPoleError,
            WidthUnderflowError) + NUMERIC_ERRORS as e:
        print(f"starkres: numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print(f"starkres: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
