"""Command-line front end: spec ingestion, CSV and JSON text, figure data.

One process handles one subcommand.  Exit codes: 0 on success, 2 when an
argument leaves the mathematical domain of an operation, 3 when a spec
file or inline spec fails to parse.  All tabular output is CSV with a
header row, comma separators, LF line endings, UTF-8; rationals print as
"p/q", floats with 15 significant digits, symbolic infinity as
"inf(sym)".  Those renderings round-trip: parsing an emitted file and
re-emitting it reproduces the bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._util import INF, format_number, is_inf
from .conjugacy import theta
from .dynamics import expand, farey_code
from .partitions import (
    DomainError,
    Geometric,
    Harmonic,
    LogPowerAtoms,
    PartitionSpec,
    PowerAtoms,
    RangeError,
    SpecParseError,
    parse_spec,
)
from .renewal import (
    gl_liminf_target,
    renewal_sequence,
    strong_law_constant,
    weak_law_constant,
)
from .simulate import decade_averages
from .thermo import (
    CurveTable,
    farey_phase_report,
    free_energy_curve,
    luroth_phase_report,
    pressure_curve,
    s_bounds,
    sigma_spectrum,
    t_minus,
    tau_spectrum,
)

__all__ = [
    "FigurePreset",
    "figure_presets",
    "main",
    "parse_number",
    "read_csv",
    "run",
]


# ------ value text ---------------------------------------------------------

def parse_number(text: str):
    """Inverse of the emission format: '' -> None, 'p/q' -> Fraction,
    'inf(sym)' -> symbolic infinity, integer and float literals else."""
    s = text.strip()
    if s == "":
        return None
    if s == "inf(sym)":
        return INF
    if s == "true":
        return True
    if s == "false":
        return False
    try:
        if "/" in s:
            return Fraction(s)
        try:
            return int(s)
        except ValueError:
            return float(s)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"unreadable numeric field {text!r}: {e}") from e


def _field(v) -> str:
    return "" if v is None else format_number(v)


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_field(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv(text: str):
    """(header, parsed rows) for CSV produced by this tool."""
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines:
        raise DomainError("empty CSV text")
    header = lines[0].split(",")
    rows = [[parse_number(cell) for cell in ln.split(",")]
            for ln in lines[1:]]
    return header, rows


def _jsonable(v):
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if is_inf(v):
        return "inf(sym)"
    if isinstance(v, Fraction):
        return format_number(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return float(f"{float(v):.15g}")


def _json_text(d: dict) -> str:
    return json.dumps(_jsonable(d), indent=2) + "\n"


# ------ argument helpers ---------------------------------------------------

def _load_spec(arg: str) -> PartitionSpec:
    if os.path.exists(arg):
        try:
            with open(arg, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise SpecParseError(f"cannot read spec file {arg}: {e}") from e
        return parse_spec(text)
    if arg.endswith(".json"):
        raise SpecParseError(f"spec file {arg} does not exist")
    return parse_spec(arg)


def _parse_point(s: str, field: str):
    try:
        if "/" in s:
            return Fraction(s)
        return float(s)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"malformed value for {field}: {s!r}") from e


def _grid(lo: float, hi: float, samples: int, field: str) -> List[float]:
    if samples < 1:
        raise DomainError(f"--samples must be >= 1, got {samples}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise DomainError(f"bad grid bounds for {field}: [{lo}, {hi}]")
    if samples == 1 and hi != lo:
        raise DomainError(f"one sample needs equal bounds for {field}")
    return [float(x) for x in np.linspace(lo, hi, samples)]


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _curve_csv(table: CurveTable) -> str:
    with_min = table.kind in ("tau_spectrum", "sigma_spectrum")
    arg_name = "s" if with_min else "u"
    if with_min:
        header = (arg_name, "value", "minimizer_u", "error_bound")
        rows = [(s.argument, s.value, s.minimizer, s.error_bound)
                for s in table.samples]
    else:
        header = (arg_name, "value", "error_bound")
        rows = [(s.argument, s.value, s.error_bound) for s in table.samples]
    return _csv(header, rows)


# ------ figure presets -----------------------------------------------------

@dataclass(frozen=True)
class FigurePreset:
    """One figure dataset: the partition, curve grids, caption verdicts."""

    name: str
    label: str
    spec: PartitionSpec
    pressure_grid: Tuple[float, ...]
    free_energy_grid: Tuple[float, ...]
    tau_grid: Tuple[float, ...]
    sigma_grid: Tuple[float, ...]
    farey_transition: bool
    luroth_transition: bool
    boundary_pressure_finite: bool


def _preset(name: str, label: str, spec: PartitionSpec, farey: bool,
            luroth: bool, p_finite: bool) -> FigurePreset:
    expanding = spec.classify().tail_kind == "expanding"
    t_inf = float(spec.t_infinity())
    p_lo = -1.0 if expanding else t_inf + 0.06
    v_lo = -1.0 if expanding else 0.0
    tm = t_minus(spec)
    sp = s_bounds(spec)[1]
    mk = lambda lo, hi: tuple(float(x) for x in np.linspace(lo, hi, 55))
    return FigurePreset(
        name=name,
        label=label,
        spec=spec,
        pressure_grid=mk(p_lo, 2.2),
        free_energy_grid=mk(v_lo, 2.2),
        tau_grid=mk(0.15 * tm, 7.0 * tm),
        sigma_grid=mk(0.05 * sp, 1.15 * sp),
        farey_transition=farey,
        luroth_transition=luroth,
        boundary_pressure_finite=p_finite,
    )


def figure_presets() -> List[FigurePreset]:
    """The six published datasets with their transition verdicts.

    Verdict columns are (farey, luroth, pressure finite at the boundary
    exponent); regression tests hold phase reports to these values.
    """
    return [
        _preset("fig1", "harmonic", Harmonic(), False, False, False),
        _preset("fig2", "power_atoms s=3", PowerAtoms(3.0),
                True, False, False),
        _preset("fig3", "log_power_atoms k=12 shift=5", LogPowerAtoms(12, 5),
                True, True, True),
        _preset("fig4", "log_power_atoms k=4 shift=5", LogPowerAtoms(4, 5),
                True, False, True),
        _preset("fig5", "power_atoms s=5/4", PowerAtoms(1.25),
                False, False, False),
        _preset("fig6", "geometric c=2 r=1/3",
                Geometric(Fraction(2), Fraction(1, 3)), False, False, False),
    ]


# ------ subcommands --------------------------------------------------------

def _cmd_info(args) -> str:
    spec = _load_spec(args.spec)
    cls = spec.classify()
    lo, hi = s_bounds(spec)
    return _json_text({
        "spec": spec.to_dict(),
        "backend": spec.backend,
        "type_class": cls.type_class,
        "tail_kind": cls.tail_kind,
        "rho": cls.rho,
        "theta": cls.theta,
        "psi": cls.psi,
        "t_infinity": spec.t_infinity(),
        "t_minus": t_minus(spec),
        "s_minus": lo,
        "s_plus": hi,
        "tail_sum_total": spec.tail_sum_total(),
    })


def _cmd_expand(args) -> str:
    spec = _load_spec(args.spec)
    x = _parse_point(args.x, "--x")
    word = expand(spec, x, max_digits=args.max_digits)
    if args.emit == "farey-code":
        return farey_code(word, args.max_bits).bits + "\n"
    return " ".join(str(d) for d in word.digits) + "\n"


def _cmd_theta(args) -> str:
    spec = _load_spec(args.spec)
    x = _parse_point(args.x, "--x")
    r = theta(spec, x, eps=args.eps)
    out = {"value": r.value, "error_bound": r.error_bound,
           "digits_used": r.digits_used}
    if r.exact is not None:
        out["exact"] = r.exact
    return _json_text(out)


def _cmd_renewal(args) -> str:
    spec = _load_spec(args.spec)
    n = args.n
    if n < 1:
        raise DomainError(f"--n must be >= 1, got {n}")
    seq = renewal_sequence(spec, n)
    tails = spec.tails(n)
    try:
        k_avg = weak_law_constant(spec)
    except DomainError:
        k_avg = None
    try:
        k_pt = strong_law_constant(spec)
    except DomainError:
        k_pt = None
    try:
        gl_liminf_target(spec)
        gl_ok = True
    except DomainError:
        gl_ok = False
    exact = seq.exact_values
    switch = seq.switch_index

    def rows():
        sw = st = 0.0
        cw = ct = 0.0      # Kahan carries: running sums must not drift
        for k in range(1, n + 1):
            wf = float(seq.values[k])
            tf = float(tails[k - 1])
            y = wf - cw
            t = sw + y
            cw = (t - sw) - y
            sw = t
            y = tf - ct
            t = st + y
            ct = (t - st) - y
            st = t
            if exact is not None and (switch is None or k < switch) \
                    and k < len(exact):
                w_out = exact[k]
            else:
                w_out = wf
            yield (k, w_out, sw, st,
                   sw * st / (k_avg * k) if k_avg is not None else None,
                   wf * st / k_pt if k_pt is not None else None,
                   k * tf * wf if gl_ok else None)

    header = ("n", "w_n", "partial_sum_w", "partial_sum_t",
              "weak_ratio", "strong_ratio", "gl_product")
    return _csv(header, rows())


def _cmd_pressure(args) -> str:
    spec = _load_spec(args.spec)
    grid = _grid(args.u_from, args.u_to, args.samples, "--u-from/--u-to")
    return _curve_csv(pressure_curve(spec, grid))


def _cmd_free_energy(args) -> str:
    spec = _load_spec(args.spec)
    grid = _grid(args.u_from, args.u_to, args.samples, "--u-from/--u-to")
    return _curve_csv(free_energy_curve(spec, grid))


def _cmd_spectrum(args) -> str:
    spec = _load_spec(args.spec)
    if args.s_from <= 0.0:
        raise DomainError(
            f"--s-from must be > 0 for spectra, got {args.s_from}")
    grid = _grid(args.s_from, args.s_to, args.samples, "--s-from/--s-to")
    table = (tau_spectrum if args.kind == "tau" else sigma_spectrum)(
        spec, grid)
    return _curve_csv(table)


def _cmd_phase(args) -> str:
    spec = _load_spec(args.spec)
    report = (luroth_phase_report if args.map == "luroth"
              else farey_phase_report)(spec)
    return _json_text(report.to_dict())


def _cmd_simulate(args) -> str:
    spec = _load_spec(args.spec)
    rows = decade_averages(spec, args.steps, args.seed)
    header = ("n_steps", "mean_digit", "mean_log_digit",
              "mean_neg_log_atom", "farey_quotient")
    return _csv(header, ((r.n_steps, r.mean_digit, r.mean_log_digit,
                          r.mean_neg_log_atom, r.farey_quotient)
                         for r in rows))


def _cmd_figure(args) -> str:
    presets = {p.name: p for p in figure_presets()}
    if args.preset not in presets:
        raise DomainError(
            f"unknown figure preset {args.preset!r}; "
            f"choose from {', '.join(sorted(presets))}")
    pre = presets[args.preset]
    tables = (
        ("pressure", pressure_curve(pre.spec, pre.pressure_grid)),
        ("free_energy", free_energy_curve(pre.spec, pre.free_energy_grid)),
        ("tau", tau_spectrum(pre.spec, pre.tau_grid)),
        ("sigma", sigma_spectrum(pre.spec, pre.sigma_grid)),
    )
    os.makedirs(args.out_dir, exist_ok=True)
    lines = []
    for stem, table in tables:
        path = os.path.join(args.out_dir, f"{pre.name}_{stem}.csv")
        _write(_curve_csv(table), path)
        lines.append(path)
    return "\n".join(lines) + "\n"


# ------ driver -------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="alpha-dyn",
        description="Interval-map partition toolkit: expansions, renewal "
                    "sequences, thermodynamic curves, and digit sampling.")
    sub = top.add_subparsers(dest="command", required=True)

    def spec_arg(p):
        p.add_argument("--spec", required=True,
                       help="spec file path, inline JSON, or family name")
        p.add_argument("--out", default=None, help="write here, not stdout")

    p = sub.add_parser("info", help="partition summary and metadata")
    spec_arg(p)
    p.set_defaults(fn=_cmd_info)

    p = sub.add_parser("expand", help="digit word of a point")
    spec_arg(p)
    p.add_argument("--x", required=True)
    p.add_argument("--max-digits", type=int, default=30)
    p.add_argument("--emit", choices=("digits", "farey-code"),
                   default="digits")
    p.add_argument("--max-bits", type=int, default=64)
    p.set_defaults(fn=_cmd_expand)

    p = sub.add_parser("theta", help="topological conjugacy image")
    spec_arg(p)
    p.add_argument("--x", required=True)
    p.add_argument("--eps", type=float, default=1e-12)
    p.set_defaults(fn=_cmd_theta)

    p = sub.add_parser("renewal", help="level-set measures and law ratios")
    spec_arg(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--emit", choices=("csv",), default="csv")
    p.set_defaults(fn=_cmd_renewal)

    p = sub.add_parser("pressure", help="fast-map pressure curve")
    spec_arg(p)
    p.add_argument("--u-from", type=float, required=True)
    p.add_argument("--u-to", type=float, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--emit", choices=("csv",), default="csv")
    p.set_defaults(fn=_cmd_pressure)

    p = sub.add_parser("free-energy", help="slow-map free energy curve")
    spec_arg(p)
    p.add_argument("--u-from", type=float, required=True)
    p.add_argument("--u-to", type=float, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--emit", choices=("csv",), default="csv")
    p.set_defaults(fn=_cmd_free_energy)

    p = sub.add_parser("spectrum", help="dimension spectrum curve")
    spec_arg(p)
    p.add_argument("--kind", choices=("tau", "sigma"), required=True)
    p.add_argument("--s-from", type=float, required=True)
    p.add_argument("--s-to", type=float, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--emit", choices=("csv",), default="csv")
    p.set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("phase", help="phase report for one map")
    spec_arg(p)
    p.add_argument("--map", choices=("luroth", "farey"), required=True)
    p.set_defaults(fn=_cmd_phase)

    p = sub.add_parser("simulate", help="running digit averages per decade")
    spec_arg(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit", choices=("csv",), default="csv")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("figure", help="emit the four CSVs of one preset")
    p.add_argument("preset")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(fn=_cmd_figure)

    return top


def run(argv: Sequence[str]) -> int:
    """Dispatch one command line; returns the process exit code."""
    try:
        args = _build_parser().parse_args(list(argv))
    except SystemExit as e:
        code = e.code
        return code if isinstance(code, int) else 2
    try:
        text = args.fn(args)
    except SpecParseError as e:
        print(f"spec error: {e}", file=sys.stderr)
        return 3
    except (DomainError, RangeError) as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 2
    _write(text, getattr(args, "out", None))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)
