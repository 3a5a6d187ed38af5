"""Command-line front end.

    travgraph eval {eikonal,sub,super,arc,cone} [--config F] [--out F]
    travgraph verify {subsolution,cone,laplace,sandwich} [--config F] [--seed N]
    travgraph figures [--config F] --out DIR
    travgraph solve [--config F] [--out F]

Exit codes: 0 success, 1 a verification check failed, 2 configuration
error, 3 numerical failure.  CSV output goes to ``--out`` or standard output.
"""
from __future__ import annotations

import argparse
import io
import math
import sys

import numpy as np

from . import acceptance
from .config import RunConfig, load_config
from .cone import C0_normalization, eval_phi_c, solve_cone
from .eikonal import PlaneSpec, build_measure_N3
from .errors import ConfigError, DomainError, TravGraphError
from .io import write_rows, write_xyz
from .solver import NewtonOptions, concavity_probe, verify_sandwich
from .subsolution import SubSolution
from .supersolution import ArcPiece, assemble_global_N3

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _emit_xyz(args, X, values):
    if args.out:
        write_xyz(args.out, X, values)
    else:
        buf = io.StringIO()
        buf.write("x1,x2,value\n")
        for (a, b), v in zip(np.asarray(X).reshape(-1, 2), np.asarray(values).reshape(-1)):
            buf.write(f"{float(a)!r},{float(b)!r},{float(v)!r}\n")
        sys.stdout.write(buf.getvalue())


def _sub_field(cfg: RunConfig):
    params = cfg.params()
    if cfg.has("measure"):
        return SubSolution(cfg.measure(), params)
    if cfg.has("profile"):
        return SubSolution(build_measure_N3(cfg.profile(), cfg["profile"]["lambda0"]), params)
    if cfg.has("planes"):
        return SubSolution(cfg.plane_spec().matched_measure(), params)
    raise ConfigError("eval sub needs a [measure], [profile] or [planes] section")


def _cone_profile(cfg: RunConfig, r_needed=0.0):
    c = cfg["cone"]
    return solve_cone(cfg.params(), max(c["r_max"], 10.0, r_needed), c["tol"])


def cmd_eval(cfg: RunConfig, what, args):
    params = cfg.params()
    if what == "cone":
        prof = _cone_profile(cfg)
        c = cfg["cone"]
        radii = np.linspace(0.0, prof.r_max, c["n"])
        if c["target_c"] == "raw":
            target = prof.C_raw
        elif c["target_c"].lower() == "c0":
            target = 0.0 if params.planar else C0_normalization(params)
        else:
            from .config import eval_number
            target = eval_number(c["target_c"])
        phi = eval_phi_c(prof, radii, target)
        v = prof.slope(radii)
        rows = list(zip(radii, v, phi))
        if args.out:
            write_rows(args.out, ["r", "v", "phi_c"], rows)
        else:
            sys.stdout.write("r,v,phi_c\n")
            for row in rows:
                sys.stdout.write(",".join(repr(float(t)) for t in row) + "\n")
        return EXIT_OK
    X = cfg.samples()
    if what == "eikonal":
        spec = cfg.plane_spec()
        vals = spec(X)
    elif what == "sub":
        vals = _sub_field(cfg).values(X)
    elif what == "super":
        if cfg.has("profile"):
            r_need = float(np.max(np.hypot(X[:, 0], X[:, 1]))) if X.size else 0.0
            prof = cfg.profile()
            cone = _cone_profile(cfg, r_need) if any(prof.sigma) else None
            vals = assemble_global_N3(cone, prof, cfg["profile"]["lambda0"], params)(X)
        else:
            vals = cfg.plane_spec()(X)
    elif what == "arc":
        ang = cfg["profile"]["angles"]
        if ang is None or len(ang) != 2:
            raise ConfigError("eval arc needs [profile] angles = theta1, theta2")
        r_need = float(np.max(np.hypot(X[:, 0], X[:, 1]))) if X.size else 0.0
        piece = ArcPiece(float(ang[0]), float(ang[1]), cfg["profile"]["lambda0"], _cone_profile(cfg, r_need))
        vals = piece(X)
    else:
        raise ConfigError(f"unknown eval target {what!r}")
    _emit_xyz(args, X, vals)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, suite, args):
    v = dict(cfg["verify"])
    seed = args.seed if args.seed is not None else v["seed"]
    results = acceptance.run_suite(suite, cfg.params(), seed, v)
    for r in results:
        print(r.line())
        if suite == "sandwich" and r.number == 8:
            for key, d in r.detail.items():
                if isinstance(d, dict):
                    print(f"    {key}: gap_min {d['gap_min']:.6g} vs bound {d['gap_bound']:.6g}, "
                          f"{d['iterations']} iterations, residual {d['residual']:.3g}")
        if suite == "laplace":
            for rr, m in zip(v["radii"], r.detail["maxima"]):
                print(f"    r = {rr:g}: max |R| = {m:.6g}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def cmd_figures(cfg: RunConfig, args):
    from .plotting import write_figures
    f = cfg["figures"]
    out = args.out or "figures"
    prof = _cone_profile(cfg, max(f["r_max"], f["half_width"] * math.sqrt(2.0)))
    paths = write_figures(prof, out, f["lambda"], f["half_width"], f["n"], f["r_max"], bool(f["png"]))
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_solve(cfg: RunConfig, args):
    params = cfg.params()
    s = cfg["solve"]
    try:
        opts = NewtonOptions(max_iters=s["max_iters"], residual_tol=s["residual_tol"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.has("planes"):
        spec = cfg.plane_spec()
        run = _solve_spec(spec, params, s, opts)
    else:
        spec = PlaneSpec.equispaced(s["k"], params, s["phase"])
        run = _solve_spec(spec, params, s, opts)
    fld, mu = run
    for it, res, step in fld.history:
        print(f"iteration {it}: residual {res:.3e} step {step:g}")
    chk = verify_sandwich(fld, mu, spec, 10 * s["h"] ** 2, raise_on_fail=False)
    print(f"lower margin {chk.lower_margin:.6g}, upper margin {chk.upper_margin:.6g}, "
          f"min(phi_h - phi^*) {chk.gap_min:.6g}")
    for l, g in chk.decay:
        print(f"edge distance >= {l:g}: max gap {g:.6g}")
    print(f"concavity probe {concavity_probe(fld):.6g}")
    if args.out:
        if args.out.endswith(".bin"):
            fld.to_binary(args.out)
        else:
            fld.to_csv(args.out)
    return EXIT_OK if chk.ok else EXIT_CHECK


def _solve_spec(spec, params, s, opts):
    from .solver import solve_dirichlet
    mu = spec.matched_measure()
    low = SubSolution(mu, params)
    if s["initial"] == "sub":
        init = low
    elif s["initial"] == "average":
        def init(X):
            return 0.5 * (low(X) + spec(X))
    else:
        raise ConfigError("[solve] initial must be sub or average")
    hw = s["half_width"]
    fld = solve_dirichlet(((-hw, hw), (-hw, hw)), s["h"], spec, init, params, opts)
    return fld, mu


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="configuration file (INI)")
    common.add_argument("--out", help="output file (eval, solve) or directory (figures)")
    common.add_argument("--seed", type=int, default=None, help="random seed override")
    ap = argparse.ArgumentParser(prog="travgraph", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    e = sub.add_parser("eval", parents=[common], help="sample a field to CSV")
    e.add_argument("what", choices=["eikonal", "sub", "super", "arc", "cone"])
    v = sub.add_parser("verify", parents=[common], help="run an acceptance suite")
    v.add_argument("suite", choices=["subsolution", "cone", "laplace", "sandwich"])
    sub.add_parser("figures", parents=[common], help="write figure data, gnuplot script and PNGs")
    sub.add_parser("solve", parents=[common], help="Newton solve on a square grid")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "eval":
            return cmd_eval(cfg, args.what, args)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite, args)
        if args.command == "figures":
            return cmd_figures(cfg, args)
        return cmd_solve(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TravGraphError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
