"""Bifurcation points of the homogeneous solution.

Mode ``n`` branches off the trivial branch ``u = 0`` where

    eps n^2 pi^2 / lam^2 = -W*''(1/lam),

which only has roots for ``lam > 1/kappa``. The trivial solution is
locally stable below the first root and unstable above it.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constitutive import build_model
from .exceptions import DomainError, RootNotFoundError

LAMBDA_CAP = 1e3
ROOT_XTOL = 1e-12
_SCAN_POINTS = 4000


@dataclass(frozen=True)
class BifurcationPoint:
    n: int
    lambda_n: float
    sigma_n: float
    crossings: int = 1

    def as_dict(self):
        return {"n": self.n, "lambda_n": self.lambda_n, "sigma_n": self.sigma_n}


def eigenfunction(n, s):
    """Neumann eigenfunction ``cos(n pi s)`` of the linearised problem."""
    return np.cos(n * np.pi * np.asarray(s, dtype=float))


def characteristic_residual(model, eps, n, lam):
    """``eps n^2 pi^2 / lam^2 + W*''(1/lam)``; zero at bifurcation points."""
    model = build_model(model)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 1.0 / model.kappa):
        raise DomainError(f"lambda must exceed 1/kappa = {1.0 / model.kappa:.12g}")
    out = eps * (n * np.pi) ** 2 / lam**2 + model.ddWstar(1.0 / lam)
    return float(out) if out.ndim == 0 else out


def _mode_root(model, eps, n, cap):
    f = lambda lam: characteristic_residual(model, eps, n, lam)
    lo = 1.0 / model.kappa + 1e-6
    if f(lo) <= 0:
        raise RootNotFoundError(
            f"mode {n}: residual not positive just above 1/kappa (eps too small?)", n=n)
    # window doubling locates an upper bracket; a scan below it counts crossings
    window = 1.0
    hi = lo + window
    while f(hi) > 0:
        window *= 2.0
        hi = lo + window
        if hi > cap:
            raise RootNotFoundError(f"mode {n}: no sign change of the characteristic "
                                    f"equation below lambda = {cap:g}", n=n)
    grid = np.geomspace(lo, max(hi, min(cap, 4 * hi)), _SCAN_POINTS)
    vals = f(grid)
    sign_changes = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    first = sign_changes[0]
    root = brentq(f, grid[first], grid[first + 1], xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps,
                  maxiter=500)
    return root, len(sign_changes)


def bifurcation_points(model, eps, n_max=1, cap=LAMBDA_CAP):
    """Return the first ``n_max`` bifurcation points, ordered by mode.

    For each mode the smallest root is returned; ``crossings`` counts the
    sign changes found on the scan so callers can flag extra roots.
    """
    model = build_model(model)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    points = []
    for n in range(1, int(n_max) + 1):
        lam, crossings = _mode_root(model, eps, n, cap)
        points.append(BifurcationPoint(n=n, lambda_n=lam, sigma_n=float(model.dW(lam)),
                                       crossings=crossings))
    return points


def first_bifurcation(model, eps):
    return bifurcation_points(model, eps, 1)[0].lambda_n


def trivial_stability(model, eps, lam, rtol=1e-10):
    """Classify ``u = 0`` at stretch ``lam`` as stable, unstable or marginal."""
    if lam <= 0:
        raise DomainError("lambda must be positive")
    lam1 = first_bifurcation(model, eps)
    if abs(lam - lam1) <= rtol * max(1.0, lam1):
        return "marginal"
    return "stable" if lam < lam1 else "unstable"
