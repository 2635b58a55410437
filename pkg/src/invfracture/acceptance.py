"""The acceptance suite: ten numerical checks with their targets.

Each ``criterion_k`` returns a :class:`CriterionResult`; nothing is
raised for a failed check. :func:`run_acceptance` runs them all.
"""

import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import branch as br
from . import discrete as dc
from .constitutive import build_model
from .figures import eps_tag, reproduce_figure
from .io import read_csv
from .linearization import bifurcation_points

SURFACE_CONSTANT = 4.0 * np.sqrt(2.0) / 15.0


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict
    target: str
    runtime: float = 0.0
    notes: list = field(default_factory=list)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.runtime:.2f} s)"

    def as_dict(self):
        return asdict(self)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def criterion_1():
    """Fracture stretch of the rational model at eps = 0.01 and eps = 2."""
    measured, ok, notes = {}, True, []
    total = 0.0
    for eps, target, tol in ((0.01, 1.14, 0.02), (2.0, 3.06, 0.03)):
        fp, dt = _timed(lambda: br.fracture_point("rational", eps))
        total += dt
        measured[f"lambda_star({eps:g})"] = fp.lam
        measured[f"runtime({eps:g})"] = dt
        good = abs(fp.lam - target) <= tol and dt < 1.0
        ok &= good
        if not good:
            notes.append(f"eps={eps:g}: lam*={fp.lam:.6f}, runtime {dt:.3f} s")
    return CriterionResult(1, "fracture stretch, rational model", ok, measured,
                           "1.14 +- 0.02 and 3.06 +- 0.03, < 1 s each", total, notes)


def criterion_2(points=21):
    """Quadratic model: exact bifurcation points and a vertical branch."""
    t0 = time.perf_counter()
    q = build_model("quadratic")
    worst_lam, worst_vert, worst_star = 0.0, 0.0, 0.0
    for eps in (16.0 / np.pi**2, 2.0, 8.0):
        exact = np.arange(1, 6) * np.pi * np.sqrt(eps / 2.0)
        got = np.array([p.lambda_n for p in bifurcation_points(q, eps, 5)])
        worst_lam = max(worst_lam, float(np.max(np.abs(got / exact - 1.0))))
        sweep = br.sweep_branch(q, eps, 1, points)
        lam1 = exact[0]
        worst_vert = max(worst_vert, float(np.max(np.abs(sweep.lam - lam1))))
        worst_star = max(worst_star, abs(sweep.fracture.lam - lam1) / lam1)
    dt = time.perf_counter() - t0
    ok = worst_lam <= 1e-10 and worst_vert <= 1e-8 and worst_star <= 1e-8 and dt < 1.0
    measured = {"max_rel_error_lambda_n": worst_lam, "max_abs_branch_deviation": worst_vert,
                "max_rel_error_lambda_star": worst_star, "runtime": dt}
    return CriterionResult(2, "quadratic model exactness", ok, measured,
                           "lambda_n rel 1e-10; |lam(H1) - lambda_1| <= 1e-8; lam* = lambda_1 "
                           "to 1e-8; < 1 s", dt)


def criterion_3():
    """Surface energy of the rational model in both integral forms."""
    t0 = time.perf_counter()
    measured, ok = {}, True
    for eps in (0.01, 1.0):
        inv, fwd = br.surface_energy("rational", eps)
        exact = np.sqrt(eps) * SURFACE_CONSTANT
        measured[f"inverse({eps:g})"] = inv
        measured[f"forward({eps:g})"] = fwd
        measured[f"abs_error({eps:g})"] = abs(inv - exact)
        measured[f"form_rel_diff({eps:g})"] = abs(inv - fwd) / abs(inv)
        ok &= abs(inv - exact) <= 1e-6 and abs(inv - fwd) <= 1e-8 * abs(inv)
    return CriterionResult(3, "surface energy", ok, measured,
                           "sqrt(eps) 4 sqrt(2)/15 within 1e-6; forms agree to 1e-8 rel",
                           time.perf_counter() - t0)


def criterion_4(points=21):
    """``sigma = -Gamma`` along every swept branch; zero stress at fracture."""
    t0 = time.perf_counter()
    worst_identity, worst_fracture, count = 0.0, 0.0, 0
    cases = [("rational", 0.01), ("rational", 2.0 / 49.0), ("rational", 2.0),
             ("quadratic", 16.0 / np.pi**2)]
    for model, eps in cases:
        sweep = br.sweep_branch(model, eps, 1, points)
        for p in sweep.points:
            worst_identity = max(worst_identity, abs(p.sigma + p.chord.Gamma))
            count += 1
        worst_fracture = max(worst_fracture, abs(sweep.fracture.sigma))
    ok = worst_identity <= 1e-10 and worst_fracture <= 1e-10
    return CriterionResult(4, "stress identity", ok,
                           {"max_abs_sigma_plus_Gamma": worst_identity,
                            "max_abs_fracture_sigma": worst_fracture, "points": count},
                           "|sigma + Gamma| <= 1e-10; sigma* = 0 to 1e-10",
                           time.perf_counter() - t0)


def criterion_5():
    """``lam*(eps)`` decreases towards 1 as ``eps -> 0``."""
    t0 = time.perf_counter()
    eps_list = (0.1, 0.05, 0.01, 0.005, 0.001)
    pts = [br.fracture_point("rational", e) for e in eps_list]
    lams = [p.lam for p in pts]
    decreasing = all(a > b for a, b in zip(lams, lams[1:]))
    ok = decreasing and lams[-1] < 1.05
    notes = [f"eps={e:g} uses the logarithmic expansion" for e, p in zip(eps_list, pts)
             if p.asymptotic]
    return CriterionResult(5, "eps -> 0 limit", ok,
                           {f"lambda_star({e:g})": v for e, v in zip(eps_list, lams)},
                           "strictly decreasing; lam*(0.001) < 1.05",
                           time.perf_counter() - t0, notes)


def criterion_6(nodes=2001, lam=1.5, eps=0.01):
    """Projected-gradient minimiser against the quadrature broken profile."""
    t0 = time.perf_counter()
    results = dc.minimize_multistart("rational", eps, lam, N=nodes)
    best = results[0]
    prof = br.broken_profile("rational", eps, lam)
    ref = prof.resample(nodes)
    u = best.field.values
    # the reflection s -> 1 - s maps minimisers to minimisers
    sup = min(np.max(np.abs(u - ref)), np.max(np.abs(u - ref[::-1])))
    energy = best.energy / lam**3
    lead = np.sqrt(eps) * SURFACE_CONSTANT
    rel = abs(energy - lead) / lead
    dt = time.perf_counter() - t0
    broken = bool(np.any(best.field.broken()))
    ok = broken and sup <= 5e-2 and rel <= 0.2 and dt < 30.0
    measured = {"sup_norm": float(sup), "energy_per_length": energy, "leading_term": lead,
                "energy_rel_diff": rel, "broken_fraction": best.broken_fraction,
                "best_seed": best.seed, "runtime": dt}
    return CriterionResult(6, "oracle equivalence", ok, measured,
                           "broken; sup-norm <= 5e-2; energy within 20%; < 30 s", dt)


def _crossing(model, eps, N, lam1):
    u = np.zeros(N)
    f = lambda lam: dc.second_variation_spectrum(model, eps, lam, u, k=1).smallest_eigenvalues[0]
    lo, hi = lam1 * 0.99, lam1 * 1.01
    return brentq(f, lo, hi, xtol=1e-14, rtol=1e-15)


def criterion_7(eps=0.01):
    """Sign change of the smallest second-variation eigenvalue at ``u = 0``."""
    t0 = time.perf_counter()
    lam1 = bifurcation_points("rational", eps, 1)[0].lambda_n
    errors, ok = {}, True
    for N in (501, 1001):
        h = 1.0 / (N - 1)
        crossing = _crossing("rational", eps, N, lam1)
        err = abs(crossing - lam1)
        errors[N] = err
        ok &= err <= 3.0 * h * h * max(1.0, lam1)
    ok &= errors[1001] < errors[501]
    return CriterionResult(7, "trivial-branch stability threshold", ok,
                           {f"crossing_error(N={N})": v for N, v in errors.items()},
                           "|crossing - lambda_1| <= 3 h^2 max(1, lambda_1), decreasing in N",
                           time.perf_counter() - t0)


def criterion_8(eps=0.01, nodes=2001, points=9):
    """Negative second variation along the constructed mode-2 direction."""
    t0 = time.perf_counter()
    sweep = br.sweep_branch("rational", eps, 2, points)
    negatives, checked = 0, 0
    values = []
    for bp in sweep.points:
        if bp.H1 == 0.0 or bp.asymptotic:
            continue
        prof = br.profile_from_quadrature("rational", eps, bp, n_samples=nodes)
        u = prof.resample(nodes)
        base = dc.higher_mode_instability_direction("rational", eps, bp.lam, u, 0.0)
        if base.inconclusive:
            continue
        checked += 1
        sign = np.sign(base.curvature)
        vals = [dc.higher_mode_instability_direction("rational", eps, bp.lam, u, sign * t).value
                for t in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)]
        values.append(min(vals))
        negatives += any(v < 0 for v in vals)
    ok = negatives >= 5
    return CriterionResult(8, "higher-mode instability", ok,
                           {"points_checked": checked, "points_negative": negatives,
                            "min_values": values},
                           ">= 5 mode-2 branch points with a negative value",
                           time.perf_counter() - t0)


def _glued_pieces(profile):
    """Index ranges of the sample grid on which ``H > 0`` (one per glued piece)."""
    glued = profile.H > 0
    edges = np.flatnonzero(np.diff(glued.astype(int)))
    starts = [0] + list(edges + 1)
    stops = list(edges + 1) + [glued.size]
    return [(a, b) for a, b in zip(starts, stops) if glued[a]]


def first_integral_spread(model, profile):
    """Spread of ``(eps/2) H'^2 - (W*(H) - varpi H)`` over glued samples.

    ``H'`` comes from second-order finite differences on each glued piece;
    two samples are dropped at each piece end.
    """
    model = build_model(model)
    vals = []
    for a, b in _glued_pieces(profile):
        y, H = profile.y[a:b], profile.H[a:b]
        if H.size < 7:
            continue
        dH = np.gradient(H, y, edge_order=2)
        fi = 0.5 * profile.eps * dH**2 - (model.Wstar(H) - profile.varpi * H)
        vals.append(fi[2:-2])
    vals = np.concatenate(vals)
    return float(vals.max() - vals.min())


def profile_checks(model, profile, sample_counts=(2001, 4001), nodes=(1001, 2001)):
    """Mass, bounds, first integral and EL residual for ``profile``.

    The first integral and EL residual are evaluated at two resolutions;
    ``O(N^-2)`` is accepted when the finer value is at most a third of the
    coarser one, or below ``1e-9`` (rounding floor).
    """
    model = build_model(model)
    out = {"mass_error": abs(profile.mass() - 1.0),
           "H_min": float(profile.H.min()), "H_max": float(profile.H.max())}
    spreads = []
    for n in sample_counts:
        y = _resampled_grid(profile, n)
        spreads.append(first_integral_spread(model, _with_grid(profile, y)))
    el = [dc.el_residual(model, profile.eps, profile.lam, profile.resample(N)).max_norm
          for N in nodes]
    out["first_integral_spread"] = spreads
    out["el_residual"] = el
    second_order = lambda v: v[1] <= max(v[0] / 3.0, 1e-9)
    out["passed"] = bool(out["mass_error"] <= 1e-6 and out["H_min"] >= 0.0
                         and out["H_max"] < model.M and second_order(spreads)
                         and second_order(el))
    return out


def _resampled_grid(profile, n):
    knots = sorted({0.0, profile.lam, *[c for iv in profile.broken_intervals for c in iv]})
    parts = []
    for a, b in zip(knots[:-1], knots[1:]):
        m = max(int(round(n * (b - a) / profile.lam)), 2)
        parts.append(np.linspace(a, b, m)[:-1])
    return np.concatenate(parts + [[profile.lam]])


def _with_grid(profile, y):
    return br.Profile(y=y, H=profile.evaluate(y), lam=profile.lam, eps=profile.eps,
                      varpi=profile.varpi, mode=profile.mode,
                      broken_intervals=profile.broken_intervals, sampler=profile.sampler)


def criterion_9():
    """Constraint and ODE properties of the computed profiles."""
    t0 = time.perf_counter()
    cases = {}
    for eps in (0.01, 2.0):
        fp = br.fracture_point("rational", eps)
        cases[f"fracture(eps={eps:g})"] = ("rational", br.profile_from_quadrature("rational", eps, fp))
        lam1 = bifurcation_points("rational", eps, 1)[0].lambda_n
        bp = br.branch_point("rational", eps, 0.5 / lam1)
        cases[f"branch(eps={eps:g}, H1=0.5/lambda_1)"] = (
            "rational", br.profile_from_quadrature("rational", eps, bp))
    cases["broken(eps=0.01, lambda=1.5)"] = ("rational", br.broken_profile("rational", 0.01, 1.5))
    bp2 = br.branch_point("rational", 0.01, 0.3, mode=2)
    cases["mode2(eps=0.01, H1=0.3)"] = ("rational", br.profile_from_quadrature("rational", 0.01, bp2))
    q = build_model("quadratic")
    eps_q = 16.0 / np.pi**2
    cases["quadratic fracture"] = (q, br.profile_from_quadrature(q, eps_q, br.fracture_point(q, eps_q)))
    measured = {name: profile_checks(model, prof) for name, (model, prof) in cases.items()}
    ok = all(m["passed"] for m in measured.values())
    return CriterionResult(9, "profile constraints and ODE", ok, measured,
                           "mass 1 +- 1e-6; 0 <= H < M; first integral and EL residual O(N^-2)",
                           time.perf_counter() - t0)


def criterion_10(out=None):
    """``figure fig4``: branch ends at the bifurcation point and on ``sigma = 0``."""
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(out) if out is not None else Path(tmp)
        result = reproduce_figure("fig4", target)
        measured, ok = {}, True
        eps_list = [c["eps"] for c in result.summary["curves"]]
        branch_files = sorted(p for p in result.files if "_branch_" in Path(p).name)
        ok &= len(branch_files) == 3
        for eps in eps_list:
            lam1 = bifurcation_points("rational", eps, 1)[0].lambda_n
            data = read_csv(target / f"fig4_branch_eps{eps_tag(eps)}.csv")
            start_err = abs(data["lambda"][0] - lam1) / lam1
            end_sigma = abs(data["sigma"][-1])
            measured[f"eps={eps:.6g}"] = {"bifurcation_end_rel_error": start_err,
                                          "fracture_end_sigma": end_sigma}
            ok &= start_err <= 0.01 and end_sigma <= 1e-8
    return CriterionResult(10, "figure fig4 reproduction", ok, measured,
                           "three curves; start within 1% of lambda_1; end sigma <= 1e-8",
                           time.perf_counter() - t0)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_acceptance(skip=()):
    """Run every criterion not in ``skip``; return the results in order."""
    results = []
    for k, crit in enumerate(CRITERIA, start=1):
        if k in skip:
            continue
        results.append(crit())
    return results


def report(results):
    return {"passed": all(r.passed for r in results),
            "criteria": [r.as_dict() for r in results]}
