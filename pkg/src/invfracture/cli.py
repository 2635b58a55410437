"""Command-line front end.

Every subcommand writes its results into ``--out`` (CSV or JSON) and
prints a short summary unless ``--quiet`` is given. Options on the
command line override values from ``--config``.

Exit codes: 0 success, 1 solver error (or failed acceptance), 2 bad
configuration or arguments.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from . import branch as br
from . import discrete as dc
from .config import load_config, override
from .constitutive import build_model, validate_hypotheses
from .exceptions import ConfigError, ModelDefinitionError, SolverError
from .figures import FIGURES, eps_tag, reproduce_figure
from .io import dumps, read_csv, write_csv, write_json
from .linearization import bifurcation_points

log = logging.getLogger("invfracture")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _global_options(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="INI file with [model], [run], [solver]")
    parser.add_argument("--out", default=default, help="output directory")
    parser.add_argument("--quiet", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="print nothing on success")


def _model_option(parser):
    parser.add_argument("--model", choices=("rational", "quadratic", "custom"),
                        help="constitutive model (custom needs a [model] section)")


def _eps_option(parser, many=True):
    if many:
        parser.add_argument("--eps", type=float, nargs="+", help="gradient coefficient(s)")
    else:
        parser.add_argument("--eps", type=float, help="gradient coefficient")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    parser = _Parser(prog="invfracture",
                     description="Bifurcation, fracture and energy minimisation for a "
                                 "one-dimensional gradient bar in inverse variables.")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check the structural hypotheses")
    _model_option(p)
    p.add_argument("--grid", type=int, default=400, help="samples per check")

    p = sub.add_parser("bifurcations", parents=[common], help="bifurcation points lambda_n")
    _model_option(p)
    _eps_option(p)
    p.add_argument("--n-max", type=int, default=5)

    p = sub.add_parser("branch", parents=[common], help="sweep the mode-n branch")
    _model_option(p)
    _eps_option(p)
    p.add_argument("--mode", type=int, nargs="+")
    p.add_argument("--points", type=int)

    p = sub.add_parser("fracture", parents=[common], help="fracture stretch lambda*")
    _model_option(p)
    _eps_option(p)
    p.add_argument("--mode", type=int, nargs="+")

    p = sub.add_parser("profile", parents=[common], help="inverse-stretch profile H(y)")
    _model_option(p)
    _eps_option(p, many=False)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--lambda", dest="lam", type=float,
                       help="total stretch; broken profile at or above lambda*")
    group.add_argument("--H1", type=float, help="branch profile with lower level H1")
    p.add_argument("--mode", type=int)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("minimize", parents=[common], help="direct projected-gradient minimisation")
    _model_option(p)
    _eps_option(p, many=False)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--nodes", type=int)
    p.add_argument("--seed", help="ramp, -ramp, cos, -cos or random:k")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("stability", parents=[common], help="second-variation spectrum")
    _model_option(p)
    _eps_option(p, many=False)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--nodes", type=int)
    p.add_argument("--profile", help="CSV with columns s,u or y,H; default u = 0")
    p.add_argument("-k", type=int, default=4, help="number of eigenvalues")

    p = sub.add_parser("figure", parents=[common], help="write data for a standard figure")
    p.add_argument("id", choices=FIGURES)
    _model_option(p)
    _eps_option(p)
    p.add_argument("--points", type=int)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    p.add_argument("--skip", type=int, nargs="*", default=(), help="criterion numbers to skip")
    return parser


# ----------------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------------

def _config(args):
    cfg = load_config(getattr(args, "config", None))
    values = {"model": getattr(args, "model", None), "out": getattr(args, "out", None)}
    eps = getattr(args, "eps", None)
    if eps is not None:
        values["eps"] = list(np.atleast_1d(eps).astype(float))
    mode = getattr(args, "mode", None)
    if mode is not None:
        values["modes"] = list(np.atleast_1d(mode).astype(int))
    lam = getattr(args, "lam", None)
    if lam is not None:
        values["lambdas"] = [lam]
    for key in ("points", "samples", "nodes", "seed", "tol"):
        values[key] = getattr(args, key, None)
    values["max_iter"] = getattr(args, "max_iter", None)
    return override(cfg, **values)


def _model(cfg, strict=True):
    try:
        return build_model(cfg.model, strict=strict)
    except ModelDefinitionError as exc:
        raise ConfigError(f"bad model definition: {exc}") from None


def _single(values, name):
    if len(values) != 1:
        raise ConfigError(f"this command takes exactly one {name} value, got {len(values)}")
    return values[0]


def _lambda(cfg):
    if not cfg.lambdas:
        raise ConfigError("--lambda is required (or set lambda in [run])")
    return _single(cfg.lambdas, "lambda")


class _Printer:
    def __init__(self, quiet):
        self.quiet = quiet

    def __call__(self, text):
        if not self.quiet:
            print(text)


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def cmd_validate(args, cfg, out, say):
    model = _model(cfg, strict=False)
    rep = validate_hypotheses(model, grid=args.grid)
    data = rep.as_dict()
    data.update(kappa=model.kappa, gamma=model.gamma, M=model.M)
    write_json(out / "validate.json", data)
    say(dumps(data).rstrip())


def cmd_bifurcations(args, cfg, out, say):
    model = _model(cfg)
    for eps in cfg.eps:
        pts = bifurcation_points(model, eps, args.n_max)
        path = write_csv(out / f"bifurcations_eps{eps_tag(eps)}.csv", {
            "n": [p.n for p in pts],
            "lambda_n": [p.lambda_n for p in pts],
            "sigma_n": [p.sigma_n for p in pts],
        })
        say(f"eps={eps:.6g}: " + ", ".join(f"lambda_{p.n}={p.lambda_n:.10g}" for p in pts)
            + f" -> {path}")


def cmd_branch(args, cfg, out, say):
    model = _model(cfg)
    for eps in cfg.eps:
        for mode in cfg.modes:
            sweep = br.sweep_branch(model, eps, mode, cfg.points, cfg.quad_tol)
            pts = sweep.points
            path = write_csv(out / f"branch_eps{eps_tag(eps)}_mode{mode}.csv", {
                "H1": [p.H1 for p in pts],
                "H2": [p.H2 for p in pts],
                "varpi": [p.chord.varpi for p in pts],
                "Gamma": [p.chord.Gamma for p in pts],
                "lambda": [p.lam for p in pts],
                "sigma": [p.sigma for p in pts],
            })
            for H1, msg in sweep.failures:
                log.warning("eps=%g mode=%d H1=%.6g skipped: %s", eps, mode, H1, msg)
            say(f"eps={eps:.6g} mode={mode}: {len(pts)} points -> {path}")


def cmd_fracture(args, cfg, out, say):
    model = _model(cfg)
    rows = []
    for eps in cfg.eps:
        se = br.surface_energy(model, eps)[0]
        for mode in cfg.modes:
            fp = br.fracture_point(model, eps, mode, cfg.quad_tol)
            rows.append({"eps": eps, "mode": mode, "lambda_star": fp.lam, "H2": fp.H2,
                         "sigma": fp.sigma, "asymptotic": fp.asymptotic,
                         "surface_energy_leading": mode * se})
            say(f"eps={eps:.6g} mode={mode}: lambda*={fp.lam:.10g} H2={fp.H2:.10g}")
    data = rows[0] if len(rows) == 1 else rows
    write_json(out / "fracture.json", data)


def cmd_profile(args, cfg, out, say):
    model = _model(cfg)
    eps = _single(cfg.eps, "eps")
    mode = _single(cfg.modes, "mode")
    if args.H1 is not None:
        bp = br.branch_point(model, eps, args.H1, mode, cfg.quad_tol)
        prof = br.profile_from_quadrature(model, eps, bp, cfg.samples)
        kind = f"branch H1={args.H1:.6g}"
    else:
        fp = br.fracture_point(model, eps, mode, cfg.quad_tol)
        lam = fp.lam if not cfg.lambdas else _lambda(cfg)
        if lam >= fp.lam:
            prof = br.broken_profile(model, eps, lam, mode, cfg.samples, fracture=fp)
            kind = f"broken, opening {prof.crack_opening:.6g}"
        else:
            y = np.linspace(0.0, lam, cfg.samples)
            prof = br.Profile(y, np.full_like(y, 1.0 / lam), lam, eps, float(model.dWstar(1.0 / lam)),
                              mode)
            kind = "homogeneous (below lambda*)"
    cols = prof.columns()
    path = write_csv(out / "profile.csv", {k: cols[k] for k in ("y", "H", "u", "h")})
    say(f"lambda={prof.lam:.10g} {kind}; mass={prof.mass():.12g} -> {path}")


def cmd_minimize(args, cfg, out, say):
    model = _model(cfg)
    eps = _single(cfg.eps, "eps")
    lam = _lambda(cfg)
    try:
        dc.seed_field(cfg.seed, 3)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    res = dc.minimize_sequenced(model, eps, lam, cfg.seed, N=cfg.nodes,
                                max_iter=cfg.max_iter, tol=cfg.tol)
    u = res.field.values
    data = {"energy": res.energy, "sigma_estimate": dc.stress_estimate(model, eps, lam, u),
            "broken_fraction": res.broken_fraction, "iterations": res.iterations,
            "converged": res.converged, "pg_norm": res.pg_norm, "seed": res.seed}
    write_json(out / "minimize.json", data)
    write_csv(out / "minimize_field.csv", {"s": res.field.s, "u": u})
    say(f"lambda={lam:.6g} seed={cfg.seed}: energy={res.energy:.10g} "
        f"broken={res.broken_fraction:.4g} iterations={res.iterations}")
    if not res.converged:
        raise SolverError(f"not converged after {res.iterations} iterations "
                          f"(projected-gradient norm {res.pg_norm:.3g})")


def _load_field(path, lam, nodes):
    try:
        data = read_csv(path)
    except (OSError, ValueError, StopIteration) as exc:
        raise ConfigError(f"cannot read profile {path}: {exc}") from None
    if {"s", "u"} <= set(data):
        s, u = data["s"], data["u"]
    elif {"y", "H"} <= set(data):
        y, H = data["y"], data["H"]
        x = np.concatenate([[0.0], np.cumsum(0.5 * (H[1:] + H[:-1]) * np.diff(y))])
        s, u = x / x[-1], lam * H - 1.0
    else:
        raise ConfigError(f"profile {path} needs columns s,u or y,H")
    if nodes is None or nodes == s.size:
        return u
    return np.interp(np.linspace(0.0, 1.0, nodes), s, u)


def cmd_stability(args, cfg, out, say):
    model = _model(cfg)
    eps = _single(cfg.eps, "eps")
    lam = _lambda(cfg)
    if args.profile:
        u = _load_field(args.profile, lam, args.nodes)
    else:
        u = np.zeros(cfg.nodes)
    rep = dc.second_variation_spectrum(model, eps, lam, u, k=args.k)
    data = rep.as_dict()
    data.update(eps=eps, **{"lambda": lam, "nodes": int(np.size(u))})
    write_json(out / "stability.json", data)
    write_csv(out / "stability_witness.csv",
              {"s": np.linspace(0.0, 1.0, u.size), "eta": rep.witness_direction})
    say(f"lambda={lam:.6g}: {rep.classification}, smallest eigenvalue "
        f"{rep.smallest_eigenvalues[0] if rep.smallest_eigenvalues.size else float('nan'):.6g}")


def cmd_figure(args, cfg, out, say):
    eps = args.eps if args.eps else None
    model = cfg.model if (args.model or args.config) else None
    res = reproduce_figure(args.id, out, model=model, eps=eps, points=cfg.points,
                           samples=min(cfg.samples, 2001) if args.samples is None else cfg.samples,
                           quad_tol=cfg.quad_tol)
    write_json(out / f"{args.id}_summary.json", res.summary)
    for path in res.files:
        say(str(path))


def cmd_accept(args, cfg, out, say):
    results = acceptance.run_acceptance(skip=tuple(args.skip or ()))
    for r in results:
        say(r.line())
    rep = acceptance.report(results)
    write_json(out / "acceptance.json", rep)
    if not rep["passed"]:
        raise SolverError("acceptance criteria failed: "
                          + ", ".join(str(r.number) for r in results if not r.passed))


COMMANDS = {
    "validate": cmd_validate,
    "bifurcations": cmd_bifurcations,
    "branch": cmd_branch,
    "fracture": cmd_fracture,
    "profile": cmd_profile,
    "minimize": cmd_minimize,
    "stability": cmd_stability,
    "figure": cmd_figure,
    "accept": cmd_accept,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"invfracture: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s")
    say = _Printer(args.quiet)
    try:
        cfg = _config(args)
        out = Path(cfg.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {out}: {exc}") from None
        COMMANDS[args.command](args, cfg, out, say)
    except ConfigError as exc:
        print(f"invfracture: config error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"invfracture: solver error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
