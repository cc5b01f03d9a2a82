"""Command-line front end.

One command per invocation. Every command computes its results fully
before writing anything, so a failed run leaves no partial artifacts;
usage and environment-file problems exit with status 2 before any
computation, numerical failures exit with status 1 carrying the solver's
error text. Delimited output uses shortest round-trip float formatting
(repr), making reruns of the same configuration byte-identical.

Figures are rendered next to the delimited files by default; --no-plot
suppresses them. Environment files are JSON, validated against the
schemas shipped in wavetrans/schemas; relative --env paths that do not
exist locally are also tried against $WAVETRANS_CONFIG_DIR.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, FormatError, WaveTransError
from .profiles import (GRAVITY, DensityProfile, Environment, ShearProfile,
                       environment_hash)
from .rayleigh import solve_mode
from .dispersion import (burns_speed, find_wave_speed,
                         stagnation_condition, stagnation_threshold, sweep,
                         two_fluid_dispersion)
from .twofluid import TwoFluidEnv, solve_two_layer_modes
from .transfer import (bed_gain, linear_field, transfer_from_mode,
                       transfer_from_two_layer_modes)
from .reconstruct import (ReconstructOptions, read_gauge_csv,
                          reconstruct_hydrostatic, reconstruct_spectral,
                          synthesize_record, write_gauge_csv)
from . import report


# -- output helpers ---------------------------------------------------------

def _fmt_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _json_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v


def _write_table(path, columns, rows, meta, fmt):
    path = path.with_suffix(".json" if fmt == "json" else ".csv")
    if fmt == "json":
        doc = {"meta": {k: _json_cell(v) for k, v in meta.items()},
               "columns": list(columns),
               "rows": [[_json_cell(v) for v in row] for row in rows]}
        path.write_text(json.dumps(doc, indent=2) + "\n")
    else:
        lines = [f"# {k}: {_fmt_cell(v)}" for k, v in meta.items()]
        lines.append(",".join(columns))
        lines.extend(",".join(_fmt_cell(v) for v in row) for row in rows)
        path.write_text("\n".join(lines) + "\n")
    return path


def _base_meta(args, command):
    return {"tool": f"wavetrans {__version__}", "command": command}


# -- environment construction -----------------------------------------------

def _schema(name):
    ref = resources.files("wavetrans.schemas").joinpath(name)
    return json.loads(ref.read_text())


def _validate_schema(data, schema_name, source):
    import jsonschema
    try:
        jsonschema.validate(data, _schema(schema_name))
    except jsonschema.ValidationError as exc:
        raise FormatError(f"{source}: {exc.message}")


def _load_env_json(path_str):
    p = Path(path_str)
    if not p.exists() and not p.is_absolute():
        base = os.environ.get("WAVETRANS_CONFIG_DIR")
        if base:
            q = Path(base) / p
            if q.exists():
                p = q
    if not p.exists():
        raise FormatError(f"environment file not found: {path_str}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path_str} is not valid JSON: {exc}")


def _require(args, names):
    missing = [f"--{n.replace('_', '-')}" for n in names
               if getattr(args, n) is None]
    if missing:
        raise FormatError(f"missing required flags: {', '.join(missing)}")


def _flag_positive(**named):
    for name, value in named.items():
        if value is not None and not (value > 0 and math.isfinite(value)):
            raise FormatError(f"--{name} must be positive, got {value!r}")


def _single_fluid_env(args):
    # Domain errors here are configuration mistakes, not solver failures,
    # so they are re-raised as format errors to land on exit status 2.
    try:
        return _build_single_fluid_env(args)
    except DomainError as exc:
        raise FormatError(str(exc))


def _build_single_fluid_env(args):
    if args.env is not None:
        if args.shear is not None:
            raise FormatError("give either --env or --shear flags, not both")
        data = _load_env_json(args.env)
        _validate_schema(data, "profile.schema.json", args.env)
        return Environment.from_json(data)
    if args.shear is None:
        raise FormatError("an environment is required: --env FILE or "
                          "--shear {zero,linear,piecewise} with --h0")
    _require(args, ["h0"])
    h0 = args.h0
    if args.shear == "zero":
        shear = ShearProfile.zero(h0)
    elif args.shear == "linear":
        _require(args, ["gamma"])
        shear = ShearProfile.linear(args.gamma, h0)
    else:
        _require(args, ["gamma_minus", "gamma_plus", "h1"])
        shear = ShearProfile.piecewise(args.gamma_minus, args.gamma_plus,
                                       args.h1, h0)
    density = None
    if args.density == "constant":
        density = DensityProfile.constant(args.rho, h0)
    elif args.density == "exponential":
        _require(args, ["beta"])
        density = DensityProfile.exponential(args.beta, h0, scale=args.rho)
    return Environment(shear=shear, density=density, h0=h0, g=args.g)


def _two_fluid_env(args):
    data = _load_env_json(args.env)
    _validate_schema(data, "twofluid.schema.json", args.env)
    try:
        return TwoFluidEnv.from_json(data)
    except DomainError as exc:
        raise FormatError(str(exc))


# -- commands ----------------------------------------------------------------

def _cmd_dispersion(args, out):
    env = _single_fluid_env(args)
    if args.k is not None:
        ks = [args.k]
    else:
        _require(args, ["k_min", "k_max"])
        if not (0.0 < args.k_min <= args.k_max and args.count >= 1):
            raise FormatError("need 0 < k-min <= k-max and count >= 1")
        ks = np.geomspace(args.k_min, args.k_max, args.count).tolist()
    for k in ks:
        if not k > 0.0:
            raise FormatError("k must be positive")

    results = sweep(env.shear, ks, density=env.density, g=env.g,
                    nscan=args.nscan, rtol=args.rtol, atol=args.atol)
    rows = [(k, r.c, r.residual_at_root) for k, r in zip(ks, results)]
    meta = _base_meta(args, "dispersion")
    meta.update(profile=environment_hash(env), g=env.g,
                rtol=args.rtol, atol=args.atol, nscan=args.nscan)
    paths = [_write_table(out / "dispersion", ("k", "c", "residual"),
                          rows, meta, args.format)]
    if not args.no_plot:
        paths.append(report.save_dispersion_figure(
            ks, [r.c for r in results], out / "dispersion.png"))
    return paths


def _cmd_burns(args, out):
    env = _single_fluid_env(args)
    if env.density is not None:
        raise FormatError("the long-wave speed condition applies to the "
                          "homogeneous column; drop the density entry")
    cs = burns_speed(env.shear, g=env.g)
    meta = _base_meta(args, "burns")
    meta.update(profile=environment_hash(env), g=env.g)
    return [_write_table(out / "burns", ("c",), [(c,) for c in cs],
                         meta, args.format)]


def _cmd_stagnation(args, out):
    thr = stagnation_threshold(args.k, args.h0, args.g)
    flag = stagnation_condition(args.gamma, args.k, args.h0, args.g)
    meta = _base_meta(args, "stagnation")
    meta.update(g=args.g)
    rows = [(args.gamma, args.k, args.h0, args.g, thr, flag)]
    return [_write_table(out / "stagnation",
                         ("gamma", "k", "h0", "g", "threshold", "stagnation"),
                         rows, meta, args.format)]


def _cmd_transfer(args, out):
    env = _single_fluid_env(args)
    _flag_positive(k=args.k)
    if args.npts < 5:
        raise FormatError("--npts must be at least 5")
    root = find_wave_speed(env.shear, args.k, density=env.density, g=env.g,
                           nscan=args.nscan, rtol=args.rtol, atol=args.atol)
    mode = solve_mode(env.shear, root.c, args.k, density=env.density,
                      npts=args.npts, rtol=args.rtol, atol=args.atol)
    tf = transfer_from_mode(mode, g=env.g)
    rows = list(zip(tf.y.tolist(), tf.T.tolist()))
    meta = _base_meta(args, "transfer")
    meta.update(profile=environment_hash(env), g=env.g, k=args.k, c=root.c,
                residual=root.residual_at_root, T0=tf.T0, gain=bed_gain(tf),
                rtol=args.rtol, atol=args.atol)
    paths = [_write_table(out / "transfer", ("y", "T"), rows, meta,
                          args.format)]
    if not args.no_plot:
        paths.append(report.save_transfer_figure(
            [(f"k={args.k!r}", tf)], out / "transfer.png"))
    return paths


def _cmd_field(args, out):
    env = _single_fluid_env(args)
    _flag_positive(k=args.k)
    if not args.amplitude >= 0.0:
        raise FormatError("--amplitude must be nonnegative")
    if args.npts < 5 or args.nx < 4:
        raise FormatError("need --npts >= 5 and --nx >= 4")
    root = find_wave_speed(env.shear, args.k, density=env.density, g=env.g,
                           nscan=args.nscan, rtol=args.rtol, atol=args.atol)
    mode = solve_mode(env.shear, root.c, args.k, density=env.density,
                      npts=args.npts, rtol=args.rtol, atol=args.atol)
    fld = linear_field(mode, args.amplitude, phase=args.phase, nx=args.nx,
                       g=env.g)
    cols = ["x", "y", "u", "v", "p"] + (["rho"] if fld.rho is not None
                                        else [])
    rows = []
    for iy in range(len(fld.y)):
        for ix in range(len(fld.x)):
            row = [fld.x[ix], fld.y[iy], fld.u[iy, ix], fld.v[iy, ix],
                   fld.p[iy, ix]]
            if fld.rho is not None:
                row.append(fld.rho[iy, ix])
            rows.append(row)
    meta = _base_meta(args, "field")
    meta.update(profile=environment_hash(env), g=env.g, k=args.k, c=root.c,
                amplitude=args.amplitude, phase=args.phase,
                rtol=args.rtol, atol=args.atol)
    paths = [_write_table(out / "field", cols, rows, meta, args.format)]
    if not args.no_plot:
        paths.append(report.save_field_figure(fld, out / "field.png"))
    return paths


def _cmd_twofluid(args, out):
    env = _two_fluid_env(args)
    _flag_positive(k=args.k)
    if args.npts < 5:
        raise FormatError("--npts must be at least 5")
    root = two_fluid_dispersion(env, args.k, nscan=args.nscan,
                                rtol=args.rtol, atol=args.atol)
    lower, upper = solve_two_layer_modes(env, root.c, args.k,
                                         npts=args.npts, rtol=args.rtol,
                                         atol=args.atol,
                                         y_trunc=args.y_trunc)
    tlo, tup = transfer_from_two_layer_modes(env, lower, upper)
    rows = [("lower", y, T) for y, T in zip(tlo.y.tolist(), tlo.T.tolist())]
    rows += [("upper", y, T) for y, T in zip(tup.y.tolist(), tup.T.tolist())]
    meta = _base_meta(args, "twofluid")
    meta.update(profile=environment_hash(env), g=env.g, k=args.k, c=root.c,
                residual=root.residual_at_root, T0_lower=tlo.T0,
                rtol=args.rtol, atol=args.atol)
    paths = [_write_table(out / "twofluid", ("layer", "y", "T"), rows, meta,
                          args.format)]
    if not args.no_plot:
        paths.append(report.save_transfer_figure(
            [("lower", tlo), ("upper", tup)], out / "twofluid.png"))
    return paths


def _parse_modes(specs):
    modes = []
    for s in specs:
        parts = s.split(",")
        if len(parts) not in (2, 3):
            raise FormatError(f"--mode expects k,amplitude[,phase]: {s!r}")
        try:
            vals = [float(x) for x in parts]
        except ValueError:
            raise FormatError(f"--mode has a non-numeric entry: {s!r}")
        k, a = vals[0], vals[1]
        psi = vals[2] if len(vals) == 3 else 0.0
        if not (k > 0.0 and math.isfinite(k)):
            raise FormatError(f"--mode wavenumber must be positive: {s!r}")
        if a < 0.0:
            raise FormatError(f"--mode amplitude must be nonnegative: {s!r}")
        modes.append((k, a, psi))
    return modes


def _cmd_synth(args, out):
    env = _single_fluid_env(args)
    modes = _parse_modes(args.mode)
    if not (args.duration > 0.0 and args.dt > 0.0):
        raise FormatError("--duration and --dt must be positive")
    rec = synthesize_record(modes, env.shear, args.duration, args.dt,
                            density=env.density, x_gauge=args.x_gauge,
                            rho_ref=args.rho_ref, g=env.g, nscan=args.nscan,
                            rtol=args.rtol, atol=args.atol)
    gauge_path = out / args.gauge_name
    side = write_gauge_csv(rec, gauge_path)
    extra = json.loads(side.read_text())
    extra.update(tool=f"wavetrans {__version__}",
                 profile=environment_hash(env),
                 modes=rec.meta["modes"], x_gauge=args.x_gauge)
    side.write_text(json.dumps(extra, indent=2, sort_keys=True) + "\n")
    paths = [gauge_path, side]
    if not args.no_plot:
        paths.append(report.save_gauge_figure(rec, out / "gauge.png"))
    return paths


def _cmd_reconstruct(args, out):
    env = _single_fluid_env(args)
    record = read_gauge_csv(args.gauge)
    _flag_positive(max_amplification=args.max_amplification)
    if args.k_min is not None or args.k_max is not None:
        _flag_positive(k_min=args.k_min, k_max=args.k_max)
    if args.method == "hydrostatic":
        result = reconstruct_hydrostatic(record)
    else:
        opts = ReconstructOptions(
            max_amplification=args.max_amplification, k_min=args.k_min,
            k_max=args.k_max, curve_n=args.curve_n, nscan=args.nscan,
            rtol=args.rtol, atol=args.atol)
        result = reconstruct_spectral(record, env.shear,
                                      density=env.density, options=opts)
    meta = _base_meta(args, "reconstruct")
    meta.update(profile=environment_hash(env), g=env.g, gauge=args.gauge,
                method=result.method, rtol=args.rtol, atol=args.atol)
    if result.method == "spectral":
        meta.update(max_amplification=args.max_amplification)
    eta_rows = list(zip(result.t.tolist(), result.eta.tolist()))
    paths = [_write_table(out / "eta", ("t", "eta"), eta_rows, meta,
                          args.format)]
    mode_rows = [(pm.omega, pm.k, pm.gain, pm.kept)
                 for pm in result.per_mode]
    paths.append(_write_table(out / "modes", ("omega", "k", "gain", "kept"),
                              mode_rows, meta, args.format))
    if not args.no_plot:
        paths.append(report.save_reconstruction_figure(
            record, [result], out / "reconstruction.png"))
    return paths


_COMMANDS = {
    "dispersion": _cmd_dispersion,
    "burns": _cmd_burns,
    "stagnation": _cmd_stagnation,
    "transfer": _cmd_transfer,
    "field": _cmd_field,
    "twofluid": _cmd_twofluid,
    "synth": _cmd_synth,
    "reconstruct": _cmd_reconstruct,
}


# -- parser -------------------------------------------------------------------

def _build_parser():
    env_p = argparse.ArgumentParser(add_help=False)
    grp = env_p.add_argument_group("environment")
    grp.add_argument("--env", metavar="FILE",
                     help="environment JSON (falls back to "
                          "$WAVETRANS_CONFIG_DIR for relative paths)")
    grp.add_argument("--shear", choices=["zero", "linear", "piecewise"])
    grp.add_argument("--h0", type=float, help="depth (m)")
    grp.add_argument("--g", type=float, default=GRAVITY)
    grp.add_argument("--gamma", type=float, help="vorticity of --shear linear")
    grp.add_argument("--gamma-minus", type=float)
    grp.add_argument("--gamma-plus", type=float)
    grp.add_argument("--h1", type=float, help="piecewise breakpoint height")
    grp.add_argument("--density", choices=["constant", "exponential"])
    grp.add_argument("--rho", type=float, default=1.0,
                     help="density value (constant) or surface scale "
                          "(exponential)")
    grp.add_argument("--beta", type=float,
                     help="exponential density decay rate")

    out_p = argparse.ArgumentParser(add_help=False)
    grp = out_p.add_argument_group("output")
    grp.add_argument("--out", default=".", help="output directory")
    grp.add_argument("--format", choices=["csv", "json"], default="csv")
    grp.add_argument("--no-plot", action="store_true",
                     help="skip PNG figure rendering")

    tol_p = argparse.ArgumentParser(add_help=False)
    grp = tol_p.add_argument_group("tolerances")
    grp.add_argument("--rtol", type=float, default=1e-10)
    grp.add_argument("--atol", type=float, default=1e-12)
    grp.add_argument("--nscan", type=int, default=64)

    parser = argparse.ArgumentParser(
        prog="wavetrans",
        description="Linear water-wave pressure transfer over shear "
                    "currents: dispersion, transfer functions, fields, "
                    "two-fluid modes, and bed-pressure reconstruction.")
    parser.add_argument("--version", action="version",
                        version=f"wavetrans {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", parents=[env_p, out_p, tol_p],
                       help="wave speed roots over k")
    p.add_argument("--k", type=float)
    p.add_argument("--k-min", type=float)
    p.add_argument("--k-max", type=float)
    p.add_argument("--count", type=int, default=16)

    sub.add_parser("burns", parents=[env_p, out_p],
                   help="long-wave speed of the column")

    p = sub.add_parser("stagnation", parents=[out_p],
                       help="interior stagnation criterion for constant "
                            "vorticity")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--h0", type=float, required=True)
    p.add_argument("--g", type=float, default=GRAVITY)

    p = sub.add_parser("transfer", parents=[env_p, out_p, tol_p],
                       help="pressure transfer profile T(y) at one k")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--npts", type=int, default=201)

    p = sub.add_parser("field", parents=[env_p, out_p, tol_p],
                       help="sampled (u, v, p[, rho]) over one wavelength")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--amplitude", type=float, default=0.1)
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--npts", type=int, default=101)

    p = sub.add_parser("twofluid", parents=[out_p, tol_p],
                       help="two-fluid interface mode and layer transfers")
    p.add_argument("--env", required=True, metavar="FILE")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--y-trunc", type=float)
    p.add_argument("--npts", type=int, default=201)

    p = sub.add_parser("synth", parents=[env_p, out_p, tol_p],
                       help="synthesize a bed gauge record from free modes")
    p.add_argument("--mode", action="append", required=True,
                   metavar="K,AMP[,PHASE]")
    p.add_argument("--duration", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--x-gauge", type=float, default=0.0)
    p.add_argument("--rho-ref", type=float, default=1.0)
    p.add_argument("--gauge-name", default="gauge.csv")

    p = sub.add_parser("reconstruct", parents=[env_p, out_p, tol_p],
                       help="invert a bed gauge record to elevation")
    p.add_argument("--gauge", required=True, metavar="FILE")
    p.add_argument("--method", choices=["spectral", "hydrostatic"],
                   default="spectral")
    p.add_argument("--max-amplification", type=float, default=100.0)
    p.add_argument("--k-min", type=float)
    p.add_argument("--k-max", type=float)
    p.add_argument("--curve-n", type=int, default=48)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)

    # Usage phase: everything that can be rejected before computing.
    try:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if getattr(args, "gauge", None) is not None:
            if not Path(args.gauge).exists():
                raise FormatError(f"gauge file not found: {args.gauge}")
        handler = _COMMANDS[args.command]
    except (WaveTransError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    # Handlers signal configuration problems as format errors (exit 2),
    # numerical failures as other package errors (exit 1), and write
    # nothing until their computation has finished.
    try:
        paths = handler(args, out)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WaveTransError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
