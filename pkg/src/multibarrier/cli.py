"""
Command line front end: sweeps and reports as CSV or JSON for external plotting.

    multibarrier sweep --uniform n=1,delta=1,tau=1,v0=40 --kappa 0.05:9:2000
    multibarrier resonances --uniform n=2,delta=1,tau=1,v0=40 --kappa 0.05:6.3:4000
    multibarrier wavefunction --uniform n=1,delta=1,tau=1,v0=40 --energy 10
"""

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import analysis
from .potential import (
    PotentialError,
    UniformBarrierSpec,
    load_spec,
    sample_smooth,
    spec_digest,
    spec_from_dict,
    spec_to_dict,
)
from .solver import ENGINES, ScatteringError, as_potential, evaluate_wavefunction, recover_amplitudes, scatter_many

SCHEMA_VERSION = 1
COMPARE_TOL = 1e-9
SWEEP_COLUMNS = ["kappa", "E", "ln_t", "ln_r", "t", "r", "classical_t"]


class UsageError(Exception):
    pass


def fmt(x):
    """17 significant digits; non-finite values spelled nan / inf / -inf."""
    x = float(x) + 0.0  # no "-0" in tables
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else None


def parse_range(text, name="range"):
    """``min:max:points`` (or ``min:max`` for windows)."""
    parts = str(text).split(":")
    try:
        if len(parts) == 3:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        elif len(parts) == 2:
            lo, hi, n = float(parts[0]), float(parts[1]), None
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"bad {name} {text!r}; expected min:max:points") from None
    if not lo < hi:
        raise UsageError(f"bad {name} {text!r}; need min < max")
    if n is not None and n < 2:
        raise UsageError(f"bad {name} {text!r}; need at least 2 points")
    return lo, hi, n


def parse_uniform(text):
    """``n=3,delta=1,tau=1,v0=40`` into a :class:`UniformBarrierSpec`."""
    fields = {}
    for item in str(text).split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"bad --uniform item {item!r}; expected key=value")
        fields[key.strip()] = value.strip()
    try:
        body = {k: (int(v) if k == "n" else float(v)) for k, v in fields.items()}
        return spec_from_dict({"uniform": body})
    except ValueError as exc:
        raise UsageError(f"bad --uniform spec: {exc}") from None


def _potential(args):
    given = [x for x in (args.uniform, args.spec) if x]
    if len(given) != 1:
        raise UsageError("give exactly one of --uniform or --spec")
    if isinstance(args.spec, dict):
        return spec_from_dict(args.spec)
    if args.spec:
        return load_spec(args.spec)
    if isinstance(args.uniform, dict):
        return spec_from_dict({"uniform": args.uniform})
    return parse_uniform(args.uniform)


def _report(args, spec, engine, grid, results, warnings):
    return {
        "schema_version": SCHEMA_VERSION,
        "spec": spec_to_dict(spec),
        "spec_digest": spec_digest(spec),
        "engine": engine,
        "grid": grid,
        "results": results,
        "warnings": warnings,
    }


def _write_csv(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def _write_json(out, doc):
    json.dump(doc, out, indent=2, sort_keys=False, allow_nan=False)
    out.write("\n")


def _grid(args, default_points=2000):
    lo, hi, n = parse_range(args.kappa, "--kappa")
    if lo <= 0:
        raise UsageError("--kappa range must start above 0")
    return lo, hi, n or default_points


def _warn(messages):
    for m in messages:
        print(f"warning: {m}", file=sys.stderr)


# ---- commands ---------------------------------------------------------------

def cmd_sweep(args, out):
    spec = _potential(args)
    lo, hi, n = _grid(args)
    sw = analysis.sweep(spec, lo, hi, n, engine=args.engine)
    pot = as_potential(spec)
    v_top = float(pot.levels.max())
    classical = analysis.classical_baseline(sw.kappa_grid, v_top, pot.unit_factor)
    t = np.exp(np.minimum(sw.ln_t, 0.0))
    r = np.exp(np.minimum(sw.ln_r, 0.0))
    warnings = [f"gap at kappa={fmt(k)}: {msg}" for k, msg in sorted(sw.gaps.items())]
    _warn(warnings)
    rows = list(zip(sw.kappa_grid, sw.energy, sw.ln_t, sw.ln_r, t, r, classical))
    if args.format == "csv":
        _write_csv(out, SWEEP_COLUMNS, rows)
    else:
        results = [dict(zip(SWEEP_COLUMNS, map(_json_float, row))) for row in rows]
        grid = {"kappa_min": lo, "kappa_max": hi, "n_points": n}
        _write_json(out, _report(args, spec, args.engine, grid, results, warnings))
    return 0


def cmd_resonances(args, out):
    spec = _potential(args)
    lo, hi, n = _grid(args, 4000)
    sw = analysis.sweep(spec, lo, hi, n, engine=args.engine)
    rep = analysis.find_resonances(
        sw, spec, threshold=args.threshold, cluster_gap=args.cluster_gap, ladder_tol=args.ladder_tol
    )
    _warn(rep.warnings)
    results = {
        "peaks": [
            {"kappa": p.kappa, "t_peak": p.t_peak, "width": p.width, "cluster_id": p.cluster_id}
            for p in rep.peaks
        ],
        "clusters": [
            {"cluster_id": cid, "multiplicity": len(ps), "kappa_mean": float(np.mean([p.kappa for p in ps]))}
            for cid, ps in sorted(rep.clusters().items())
        ],
        "ladder": [{"kappa": k, "matched": m} for k, m in rep.predicted],
    }
    grid = {"kappa_min": lo, "kappa_max": hi, "n_points": n}
    _write_json(out, _report(args, spec, args.engine, grid, results, rep.warnings))
    return 0


def cmd_wells(args, out):
    spec = _potential(args)
    lo, hi, n = _grid(args, 4000)
    sw = analysis.sweep(spec, lo, hi, n, engine=args.engine)
    kappa0 = args.kappa0 if args.kappa0 is not None else as_potential(spec).kappa0
    rep = analysis.find_wells(sw, kappa0, args.depth)
    results = {
        "kappa_0": kappa0,
        "depth_threshold": args.depth,
        "wells": [
            {"kappa_lo": w.kappa_lo, "kappa_hi": w.kappa_hi, "ln_t_floor": w.ln_t_floor} for w in rep.wells
        ],
    }
    grid = {"kappa_min": lo, "kappa_max": hi, "n_points": n}
    _write_json(out, _report(args, spec, args.engine, grid, results, []))
    return 0


def cmd_bands(args, out):
    spec = _potential(args)
    if not isinstance(spec, UniformBarrierSpec):
        raise UsageError("bands needs a uniform spec")
    lo, hi, n = _grid(args, 4000)
    bands = analysis.kronig_penney_bands(spec, np.linspace(lo, hi, n))
    results = {"bands": [{"kappa_lo": a, "kappa_hi": b} for a, b in bands]}
    grid = {"kappa_min": lo, "kappa_max": hi, "n_points": n}
    _write_json(out, _report(args, spec, "pauli", grid, results, []))
    return 0


AMPLITUDE_COLUMNS = ["region", "x_left", "x_right", "level", "flat", "re_A", "im_A", "re_B", "im_B"]
WAVE_COLUMNS = ["x", "re_psi", "im_psi", "abs2_psi"]


def cmd_wavefunction(args, out):
    spec = _potential(args)
    pot = as_potential(spec)
    if (args.energy is None) == (args.kappa_value is None):
        raise UsageError("give exactly one of --energy or --kappa-value")
    E = args.energy if args.energy is not None else args.kappa_value**2 / pot.unit_factor
    amps = recover_amplitudes(pot, E)
    if args.x:
        x0, x1, nx = parse_range(args.x, "--x")
        nx = nx or 1000
    else:
        b = pot.boundaries
        span = (b[-1] - b[0]) if b.size > 1 else 1.0
        margin = 0.25 * span if b.size else 1.0
        x0, x1 = (b[0] - margin, b[-1] + margin) if b.size else (-1.0, 1.0)
        nx = 1000
    x = np.linspace(x0, x1, nx)
    psi = evaluate_wavefunction(amps, pot, x)
    wave_rows = list(zip(x, psi.real, psi.imag, np.abs(psi) ** 2))

    edges = np.concatenate([[-np.inf], pot.boundaries, [np.inf]])
    absolute = amps.amplitudes
    amp_rows = [
        (str(j), edges[j], edges[j + 1], pot.levels[j], "1" if amps.flat[j] else "0",
         absolute[j, 0].real, absolute[j, 0].imag, absolute[j, 1].real, absolute[j, 1].imag)
        for j in range(pot.levels.size)
    ]
    if args.format == "csv":
        _write_csv(out, WAVE_COLUMNS, wave_rows)
        amp_path = args.amplitudes
        if amp_path is None and args.output not in (None, "-"):
            amp_path = args.output + ".amplitudes.csv"
        if amp_path:
            with open(amp_path, "w", newline="") as fh:
                _write_csv(fh, AMPLITUDE_COLUMNS, amp_rows)
    else:
        results = {
            "energy": E,
            "wavefunction": [dict(zip(WAVE_COLUMNS, map(_json_float, r))) for r in wave_rows],
            "amplitudes": [
                {"region": int(r[0]), "x_left": _json_float(r[1]), "x_right": _json_float(r[2]),
                 "level": r[3], "flat": r[4] == "1", "A": [r[5], r[6]], "B": [r[7], r[8]]}
                for r in amp_rows
            ],
        }
        grid = {"x_min": x0, "x_max": x1, "n_points": nx}
        _write_json(out, _report(args, spec, "pauli", grid, results, []))
    return 0


COMPARE_COLUMNS = ["kappa", "E", "t_pauli", "t_direct", "rel_discrepancy", "flag"]


def cmd_compare(args, out):
    spec = _potential(args)
    pot = as_potential(spec)
    lo, hi, n = _grid(args, 200)
    kappa = np.linspace(lo, hi, n)
    E = kappa**2 / pot.unit_factor
    t0 = time.perf_counter()
    a, err_a = scatter_many(pot, E, engine="pauli")
    t1 = time.perf_counter()
    b, err_b = scatter_many(pot, E, engine="direct")
    t2 = time.perf_counter()
    with np.errstate(invalid="ignore"):
        rel = np.abs(np.expm1(a.ln_t - b.ln_t))
    flags = []
    for i in range(n):
        if i in err_b:
            flags.append("direct:" + err_b[i].split(":")[0])
        elif i in err_a:
            flags.append("pauli:" + err_a[i].split(":")[0])
        else:
            flags.append("ok")
    checked = np.array([f == "ok" for f in flags])
    worst = float(np.max(rel[checked])) if checked.any() else float("nan")
    print(
        f"timing: pauli {t1 - t0:.4f} s, direct {t2 - t1:.4f} s, max rel discrepancy {worst:.3g}",
        file=sys.stderr,
    )
    rows = [
        (kappa[i], E[i], math.exp(min(a.ln_t[i], 0)) if np.isfinite(a.ln_t[i]) else a.ln_t[i],
         math.exp(min(b.ln_t[i], 0)) if np.isfinite(b.ln_t[i]) else b.ln_t[i], rel[i], flags[i])
        for i in range(n)
    ]
    if args.format == "csv":
        _write_csv(out, COMPARE_COLUMNS, rows)
    else:
        results = [
            {c: (v if isinstance(v, str) else _json_float(v)) for c, v in zip(COMPARE_COLUMNS, r)}
            for r in rows
        ]
        warnings = [f"kappa={fmt(kappa[i])}: {flags[i]}" for i in range(n) if flags[i] != "ok"]
        grid = {"kappa_min": lo, "kappa_max": hi, "n_points": n}
        doc = _report(args, spec, "pauli+direct", grid, results, warnings)
        doc["max_rel_discrepancy"] = _json_float(worst)
        _write_json(out, doc)
    if checked.any() and worst > COMPARE_TOL:
        print(f"error: engines disagree by {worst:.3g} > {COMPARE_TOL:g}", file=sys.stderr)
        return 1
    return 0


_SAFE_NAMES = {
    name: getattr(np, name)
    for name in ("exp", "sin", "cos", "tan", "tanh", "cosh", "sinh", "sqrt", "abs", "where", "pi", "log", "heaviside")
}


def cmd_sample(args, out):
    """Step-sample a numpy expression in ``x`` and emit a piecewise spec."""
    lo, hi, _ = parse_range(args.window, "--window")
    code = compile(args.expr, "<expr>", "eval")
    for name in code.co_names:
        if name not in _SAFE_NAMES and name != "x":
            raise UsageError(f"name {name!r} is not allowed in --expr")

    def v(x):
        return eval(code, {"__builtins__": {}}, dict(_SAFE_NAMES, x=x))  # noqa: S307

    tol = None if args.endpoint_tol < 0 else args.endpoint_tol
    pot = sample_smooth(v, lo, hi, args.steps, unit_factor=args.unit_factor, endpoint_tol=tol)
    _write_json(out, spec_to_dict(pot))
    return 0


# ---- parser -----------------------------------------------------------------

def _add_potential(p):
    p.add_argument("--uniform", help="inline uniform array, e.g. n=3,delta=1,tau=1,v0=40")
    p.add_argument("--spec", help="JSON potential spec file")


def _add_output(p, default_format=None):
    p.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
    if default_format is not None:
        p.add_argument("--format", choices=("csv", "json"), default=default_format)


def build_parser():
    parser = argparse.ArgumentParser(prog="multibarrier", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--config", help="JSON file whose keys mirror the command's flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="ln T, ln R over a kappa grid")
    _add_potential(p)
    p.add_argument("--kappa", default="0.05:9:2000", help="min:max:points")
    p.add_argument("--engine", choices=ENGINES, default="pauli")
    _add_output(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("resonances", help="refined resonant spikes below kappa_0")
    _add_potential(p)
    p.add_argument("--kappa", default="0.05:9:4000")
    p.add_argument("--engine", choices=ENGINES, default="pauli")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--cluster-gap", type=float, default=0.02)
    p.add_argument("--ladder-tol", type=float, default=0.15)
    _add_output(p, "json")
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("wells", help="probability wells above kappa_0")
    _add_potential(p)
    p.add_argument("--kappa", default="0.05:9:4000")
    p.add_argument("--engine", choices=ENGINES, default="pauli")
    p.add_argument("--depth", type=float, default=-5.0, help="ln T threshold")
    p.add_argument("--kappa0", type=float, default=None)
    _add_output(p, "json")
    p.set_defaults(func=cmd_wells)

    p = sub.add_parser("bands", help="allowed bands of the infinite lattice")
    _add_potential(p)
    p.add_argument("--kappa", default="0.01:9:4000")
    _add_output(p, "json")
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("wavefunction", help="psi(x) and region amplitudes at one energy")
    _add_potential(p)
    p.add_argument("--energy", type=float)
    p.add_argument("--kappa-value", type=float)
    p.add_argument("--x", help="min:max:points, e.g. --x=-2:3:500 (default spans the structure with margins)")
    p.add_argument("--amplitudes", help="CSV path for the A_j, B_j table")
    _add_output(p, "csv")
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("compare", help="Pauli engine against the direct 2x2 reference")
    _add_potential(p)
    p.add_argument("--kappa", default="0.05:9:200")
    _add_output(p, "csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sample", help="step-sample a smooth potential into a piecewise spec")
    p.add_argument("--expr", required=True, help="numpy expression in x, e.g. '10*exp(-x**2)'")
    p.add_argument("--window", required=True, help="min:max")
    p.add_argument("--steps", type=int, default=256)
    p.add_argument("--unit-factor", type=float, default=1.0)
    p.add_argument("--endpoint-tol", type=float, default=1e-6, help="negative disables the check")
    _add_output(p)
    p.set_defaults(func=cmd_sample)

    parser._subcommands = sub.choices
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, ValueError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
        sub = parser._subcommands[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(config) - known - {"command"}
        if unknown:
            print(f"error: unknown config keys: {sorted(unknown)}", file=sys.stderr)
            return 2
        sub.set_defaults(**{k: v for k, v in config.items() if k != "command"})
        args = parser.parse_args(argv)

    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except (UsageError, PotentialError, ScatteringError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
