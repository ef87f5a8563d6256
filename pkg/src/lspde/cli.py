"""Command-line entry point.

Every run that writes files also writes a JSON manifest beside its primary
output recording the subcommand, the resolved argument vector, seeds, and
SHA-256 hashes of all input files; ``lspde replay --manifest <file>``
re-executes the run and reproduces the outputs bitwise (inputs are verified
against their recorded hashes first).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

from . import defaults
from .besov import BesovParams, besov_norm, besov_profile, embedding_check, make_partition
from .errors import LspdeError
from .fields import Grid, read_field, write_field
from .linear import solve_linear, spectral_residual, stationarity_test, variance_spectrum
from .noise import LevyTriplet, WeightFunction, sample_noise, ultra_admissibility
from .polynomials import MultiPoly
from .semilinear import Nonlinearity, continuum_condition, picard_solve


def _parse_grid(spec):
    """Compact grid spec: '<n1>x<n2>@<L1>,<L2>', e.g. '256@25.6' or '64x64@8,8'."""
    try:
        shape_part, box_part = spec.split("@")
        shape = tuple(int(v) for v in shape_part.split("x"))
        box = tuple(float(v) for v in box_part.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"bad grid spec {spec!r}; expected e.g. 256@25.6 or 64x64@8,8"
        ) from exc
    return Grid(shape, box)


def _parse_weight(spec):
    kind, _, arg = spec.partition(":")
    if kind == "log-power":
        return WeightFunction.log_power(float(arg))
    if kind == "power":
        return WeightFunction.power(float(arg))
    raise argparse.ArgumentTypeError(f"unknown weight spec {spec!r}; use log-power:<m> or power:<beta>")


def _parse_shifts(spec):
    shifts = []
    for part in spec.split(";"):
        shifts.append(tuple(int(v) for v in part.split(",")))
    return shifts


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_triplet(path):
    return LevyTriplet.from_config(_load_json(path))


def _load_poly(path, dim=None):
    return MultiPoly.from_config(_load_json(path), dim)


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _write_manifest(primary_out, subcommand, argv, inputs, outputs):
    manifest = {
        "tool": "lspde",
        "subcommand": subcommand,
        "argv": list(argv),
        "inputs": {path: _sha256(path) for path in inputs},
        "outputs": list(outputs),
    }
    path = str(primary_out) + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _nonlinearity(spec, scale):
    if spec == "builtin:sin":
        return Nonlinearity.sine(scale)
    if spec == "builtin:tanh":
        return Nonlinearity.tanh(scale)
    if spec.startswith("tabulated:"):
        cfg = _load_json(spec.split(":", 1)[1])
        base = Nonlinearity.from_table(cfg["ys"], cfg["gs"])
        if scale != 1.0:
            return Nonlinearity(
                lambda y: scale * base.fn(y), lip=scale * base.lip,
                growth=scale * base.growth, name="tabulated",
            )
        return base
    raise argparse.ArgumentTypeError(
        f"unknown nonlinearity {spec!r}; use builtin:sin, builtin:tanh or tabulated:<file>"
    )


def _fmt(value):
    if math.isfinite(value):
        return f"{value!r} (finite)"
    return "divergent"


# ---------------------------------------------------------------------- #
# subcommand handlers
# ---------------------------------------------------------------------- #


def _cmd_sample_noise(args, argv):
    triplet = _load_triplet(args.triplet)
    noise = sample_noise(triplet, args.grid, args.delta, args.seed)
    write_field(noise.to_field(), args.out)
    _write_manifest(args.out, "sample-noise", argv, [args.triplet], [args.out])
    print(f"wrote {args.out}")
    return 0


def _cmd_solve_linear(args, argv):
    triplet = _load_triplet(args.triplet)
    p = _load_poly(args.p)
    q = _load_poly(args.q, dim=p.dim)
    noise = sample_noise(triplet, args.grid, args.delta, args.seed)
    s = solve_linear(p, q, noise, zero_mean_gauge=args.zero_mean_gauge)
    res = spectral_residual(p, q, noise, s)
    write_field(s, args.out)
    _write_manifest(args.out, "solve-linear", argv, [args.p, args.q, args.triplet], [args.out])
    print(f"wrote {args.out} (max per-mode residual {res:.3e})")
    return 0


def _cmd_solve_semilinear(args, argv):
    triplet = _load_triplet(args.triplet)
    p = _load_poly(args.p)
    g = _nonlinearity(args.g, args.c)
    noise = sample_noise(triplet, args.grid, args.delta, args.seed)
    params = BesovParams(args.beta, args.r, args.r, args.rho)
    result = picard_solve(p, g, noise, params, tol=args.tol, max_iter=args.max_iter)
    write_field(result.solution, args.out)
    outputs = [args.out]
    if args.iter_log:
        with open(args.iter_log, "w", newline="") as fh:
            fh.write("n,increment_norm,ratio\n")
            prev = None
            for n, inc in enumerate(result.increments, start=1):
                ratio = "" if not prev else repr(inc / prev)
                fh.write(f"{n},{inc!r},{ratio}\n")
                prev = inc
        outputs.append(args.iter_log)
    inputs = [args.p, args.triplet]
    if args.g.startswith("tabulated:"):
        inputs.append(args.g.split(":", 1)[1])
    _write_manifest(args.out, "solve-semilinear", argv, inputs, outputs)
    cert = result.certificate
    print(
        f"wrote {args.out}: {result.iterations} iterations, certificate ratio "
        f"{cert.ratio:.4g}, weak residual {result.residual:.3e}"
    )
    if args.kappa is not None:
        info = continuum_condition(args.beta, args.kappa, args.r, args.grid.dim)
        verdict = "satisfied" if info["satisfied"] else "violated"
        print(
            f"continuum condition l = {info['l']!r} vs threshold {info['threshold']!r}: "
            f"{verdict} (reported only)"
        )
    return 0


def _cmd_besov_norm(args, argv):
    f = read_field(args.field)
    params = BesovParams(args.l, args.r, args.t, args.rho)
    part = make_partition()
    value = besov_norm(f, params, part)
    print(f"besov_norm = {value!r}")
    if args.blocks_csv:
        profile = besov_profile(f, params, part)
        with open(args.blocks_csv, "w", newline="") as fh:
            fh.write("k,value,truncated\n")
            for b in profile:
                fh.write(f"{b.k},{b.value!r},{int(b.truncated)}\n")
        _write_manifest(args.blocks_csv, "besov-norm", argv, [args.field], [args.blocks_csv])
    return 0


def _cmd_embedding_check(args, argv):
    src = tuple(float(v) for v in args.src.split(","))
    dst = tuple(float(v) for v in args.dst.split(","))
    verdict = embedding_check(src, dst, args.d)
    print(verdict.value)
    return 0


def _cmd_check_conditions(args, argv):
    triplet = _load_triplet(args.triplet)
    nu = triplet.jumps
    print(f"min_one_x2_mass = {_fmt(nu.min_one_x2_mass())}")
    if args.eps is not None:
        print(f"epsilon_moment({args.eps!r}) = {_fmt(nu.epsilon_moment(args.eps))}")
    if args.log_d is not None:
        print(f"log_moment({args.log_d}) = {_fmt(nu.log_moment(args.log_d))}")
    if args.weight is not None:
        cs = [args.c] if args.c is not None else list(defaults.C_SCAN)
        for c in cs:
            val = ultra_admissibility(nu, args.weight, c, args.d)
            print(f"ultra_admissibility(c={c!r}, d={args.d}) = {_fmt(val)}")
    return 0


def _cmd_variance_spectrum(args, argv):
    triplet = _load_triplet(args.triplet)
    p = _load_poly(args.p)
    q = _load_poly(args.q, dim=p.dim)
    spec = variance_spectrum(p, q, triplet, args.grid, args.n_reps, args.delta, args.seed)
    spec.to_csv(args.out)
    _write_manifest(args.out, "variance-spectrum", argv, [args.p, args.q, args.triplet], [args.out])
    print(f"wrote {args.out}")
    return 0


def _cmd_stationarity_test(args, argv):
    triplet = _load_triplet(args.triplet)
    p = _load_poly(args.p)
    q = _load_poly(args.q, dim=p.dim)
    report = stationarity_test(
        p, q, triplet, args.grid, _parse_shifts(args.shifts), args.n_reps,
        args.delta, args.seed,
    )
    report.to_csv(args.out)
    _write_manifest(args.out, "stationarity-test", argv, [args.p, args.q, args.triplet], [args.out])
    verdict = "pass" if report.passed() else "fail"
    print(f"wrote {args.out} ({verdict})")
    return 0


def _cmd_replay(args, argv):
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    for path, digest in manifest.get("inputs", {}).items():
        if _sha256(path) != digest:
            raise LspdeError(f"input {path} changed since the manifest was written")
    return main(manifest["argv"])


# ---------------------------------------------------------------------- #
# parser
# ---------------------------------------------------------------------- #


def _build_parser():
    parser = argparse.ArgumentParser(prog="lspde", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common_noise(sp):
        sp.add_argument("--triplet", required=True, help="triplet config JSON")
        sp.add_argument("--grid", required=True, type=_parse_grid, help="e.g. 256@25.6")
        sp.add_argument("--delta", type=float, default=defaults.DELTA)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("sample-noise", help="draw a white-noise realization")
    add_common_noise(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(handler=_cmd_sample_noise)

    sp = sub.add_parser("solve-linear", help="solve p(D)s = q(D) noise")
    sp.add_argument("--p", required=True, help="polynomial config JSON")
    sp.add_argument("--q", required=True, help="polynomial config JSON")
    add_common_noise(sp)
    sp.add_argument("--zero-mean-gauge", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(handler=_cmd_solve_linear)

    sp = sub.add_parser("solve-semilinear", help="solve p(D)s = g(.,s) + noise")
    sp.add_argument("--p", required=True)
    sp.add_argument("--g", required=True, help="builtin:sin | builtin:tanh | tabulated:<file>")
    sp.add_argument("--c", type=float, default=1.0, help="nonlinearity scale")
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--r", type=float, default=2.0)
    sp.add_argument("--rho", type=float, default=0.0)
    sp.add_argument("--tol", type=float, default=defaults.TOL)
    sp.add_argument("--max-iter", type=int, default=defaults.MAX_ITER)
    sp.add_argument("--kappa", type=float, default=None,
                    help="decay order for the reported continuum condition")
    add_common_noise(sp)
    sp.add_argument("--iter-log", default=None, help="CSV of (n, increment, ratio)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(handler=_cmd_solve_semilinear)

    sp = sub.add_parser("besov-norm", help="weighted Besov norm of a field file")
    sp.add_argument("--field", required=True)
    sp.add_argument("--l", type=float, required=True)
    sp.add_argument("--r", type=float, default=2.0)
    sp.add_argument("--t", type=float, default=2.0)
    sp.add_argument("--rho", type=float, default=0.0)
    sp.add_argument("--blocks-csv", default=None)
    sp.set_defaults(handler=_cmd_besov_norm)

    sp = sub.add_parser("embedding-check", help="Besov embedding verdict")
    sp.add_argument("--src", required=True, help="tau,p,rho")
    sp.add_argument("--dst", required=True, help="tau,p,rho")
    sp.add_argument("--d", type=int, required=True)
    sp.set_defaults(handler=_cmd_embedding_check)

    sp = sub.add_parser("check-conditions", help="moment and admissibility checks")
    sp.add_argument("--triplet", required=True)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--log-d", type=int, default=None)
    sp.add_argument("--weight", type=_parse_weight, default=None,
                    help="log-power:<m> or power:<beta>")
    sp.add_argument("--c", type=float, default=None,
                    help="admissibility constant; scans a default set when omitted")
    sp.add_argument("--d", type=int, default=1, help="dimension in the admissibility integral")
    sp.set_defaults(handler=_cmd_check_conditions)

    sp = sub.add_parser("variance-spectrum", help="per-mode variance over replicates")
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)
    add_common_noise(sp)
    sp.add_argument("--n-reps", type=int, default=200)
    sp.add_argument("--out", required=True)
    sp.set_defaults(handler=_cmd_variance_spectrum)

    sp = sub.add_parser("stationarity-test", help="KS test against lattice shifts")
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)
    add_common_noise(sp)
    sp.add_argument("--shifts", required=True, help="e.g. 4;8 or 2,0;0,3")
    sp.add_argument("--n-reps", type=int, default=500)
    sp.add_argument("--out", required=True)
    sp.set_defaults(handler=_cmd_stationarity_test)

    sp = sub.add_parser("replay", help="re-execute a run from its manifest")
    sp.add_argument("--manifest", required=True)
    sp.set_defaults(handler=_cmd_replay)

    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, argv)
    except (LspdeError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
