"""Semi-analytic bifurcating branches, fracture point and broken profiles.

On the glued set the inverse stretch obeys ``eps H'' = W*'(H) - varpi``,
whose first integral ``(eps/2) H'^2 = U(H)`` turns every monotone lap of a
solution into a chord ``(H1, H2)`` of ``W*``. With

    g0 = int_{H1}^{H2} dz / sqrt(U),   g1 = int_{H1}^{H2} z dz / sqrt(U),

a mode-``n`` solution has length ``lam = n sqrt(eps/2) g0`` and satisfies
the mass condition ``n sqrt(eps/2) g1 = 1``. Sweeping ``H1`` from the
bifurcation value ``1/lambda_n`` down to 0 traces the branch; ``H1 = 0``
is the fracture point, where the stress ``sigma = -Gamma`` vanishes.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad, trapezoid
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from . import quadrature as qd
from .constitutive import build_model
from .exceptions import (DegenerateChordError, DomainError, InadmissibleChordError,
                         NoBranchPointError, NoCriticalPointsError, SolverError)
from .linearization import bifurcation_points

QUAD_TOL = 1e-11
DELTA_FLOOR = 1e-12
_TABLE_SUBDIV = 16
_TABLE_ORDER = 16


@dataclass(frozen=True)
class Chord:
    """Secant of ``W*`` between inverse-stretch levels ``H1 < H2``."""

    H1: float
    H2: float
    varpi: float
    Gamma: float
    admissible: bool = True

    def as_dict(self):
        return {"H1": self.H1, "H2": self.H2, "varpi": self.varpi, "Gamma": self.Gamma}


@dataclass(frozen=True)
class BranchPoint:
    """One point ``(lam, sigma)`` of a mode-``n`` bifurcating branch.

    ``asymptotic`` marks fracture points whose ``H2`` lies closer to 1 than
    double precision resolves; their ``lam`` comes from the logarithmic
    expansion of ``g1`` and no profile is available.
    """

    chord: Chord
    lam: float
    sigma: float
    mode: int = 1
    g0: float = float("nan")
    g1: float = float("nan")
    asymptotic: bool = False

    @property
    def H1(self):
        return self.chord.H1

    @property
    def H2(self):
        return self.chord.H2

    def as_dict(self):
        out = self.chord.as_dict()
        out.update(lam=self.lam, sigma=self.sigma, mode=self.mode, asymptotic=self.asymptotic)
        return out


@dataclass
class Profile:
    """Inverse stretch ``H`` sampled on ``y in [0, lam]``.

    Attributes
    ----------
    y, H : ndarray
        Deformed coordinate and inverse stretch.
    lam : float
        Total deformed length.
    broken_intervals : list of (float, float)
        Sub-intervals where ``H = 0`` (cracks). Empty when unbroken.
    varpi : float
        Forcing constant of the glued pieces.
    """

    y: np.ndarray
    H: np.ndarray
    lam: float
    eps: float
    varpi: float
    mode: int = 1
    broken_intervals: list = field(default_factory=list)
    sampler: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def broken_interval(self):
        """The first crack, or None."""
        return self.broken_intervals[0] if self.broken_intervals else None

    @property
    def crack_opening(self):
        return float(sum(b - a for a, b in self.broken_intervals))

    def mass(self):
        """Trapezoidal ``int_0^lam H dy``; equals 1 for admissible profiles."""
        return float(trapezoid(self.H, self.y))

    def h(self):
        """Inverse deformation ``h(y) = int_0^y H``."""
        return cumulative_trapezoid(self.H, self.y, initial=0.0)

    def u(self):
        """Displacement field ``u = lam H - 1`` at ``s = y/lam``."""
        return self.lam * self.H - 1.0

    def s(self):
        return self.y / self.lam

    def evaluate(self, y):
        """``H`` at arbitrary ``y``: exact when built from quadrature, else linear."""
        if self.sampler is not None:
            return self.sampler(np.asarray(y, dtype=float))
        return np.interp(y, self.y, self.H)

    def resample(self, nodes):
        """``u = lam H(lam s) - 1`` on ``nodes`` equally spaced points of ``[0, 1]``."""
        s = np.linspace(0.0, 1.0, int(nodes))
        return self.lam * self.evaluate(self.lam * s) - 1.0

    def columns(self):
        return {"y": self.y, "H": self.H, "u": self.u(), "h": self.h()}


def chord(model, H1, H2):
    """Return the chord of ``W*`` over ``[H1, H2]``.

    ``admissible`` records whether ``H1 < kappa``, ``H2 < 1``, the
    tilted potential has simple zeros at both ends, and it is positive on
    a sample of interior points.
    """
    model = build_model(model)
    H1, H2 = float(H1), float(H2)
    if H1 < 0:
        raise DomainError("H1 must be non-negative")
    if not H1 < H2:
        raise ValueError(f"need H1 < H2, got H1 = {H1!r}, H2 = {H2!r}")
    W1, W2 = float(model.Wstar(H1)), float(model.Wstar(H2))
    varpi = (W2 - W1) / (H2 - H1)
    Gamma = varpi * H1 - W1
    ok = H1 < model.kappa and H2 < 1.0
    if ok:
        ok = float(model.dWstar(H1)) > varpi > float(model.dWstar(H2))
    if ok:
        z = np.linspace(H1, H2, 259)[1:-1]
        ok = bool(np.all(model.Wstar(z) - varpi * z + Gamma > 0))
    return Chord(H1, H2, varpi, Gamma, bool(ok))


def tilted_potential(model, z, c):
    """``U(z) = W*(z) - varpi z + Gamma``; vanishes at the chord ends."""
    model = build_model(model)
    z = np.asarray(z, dtype=float)
    out = model.Wstar(z) - c.varpi * z + c.Gamma
    return float(out) if np.ndim(out) == 0 else out


def _integrand(model, c):
    return qd.TiltedIntegrand(model, c.H1, c.H2, c.varpi)


def g_integrals(model, c, tol=QUAD_TOL):
    """Return ``(g0, g1)`` for the chord ``c``.

    Raises
    ------
    InadmissibleChordError
        ``U <= 0`` at an interior node.
    DegenerateChordError
        ``U`` has a double zero at an end (tangency), or ``g1 > 1e6``.
    """
    model = build_model(model)
    g0, g1, _ = qd.g_integrals(_integrand(model, c), tol=tol)
    return g0, g1


def _mass_limit(model, eps, H1, mode):
    """Limit of ``n sqrt(eps/2) g1 - 1`` as ``H2 -> H1`` (small oscillations)."""
    curv = -float(model.ddWstar(H1))
    if H1 == 0.0:
        return -1.0
    if curv <= 0:
        return np.inf
    return mode * np.sqrt(eps / 2.0) * H1 * np.pi * np.sqrt(2.0 / curv) - 1.0


def _mass_residual(model, eps, H1, mode, tol):
    scale = mode * np.sqrt(eps / 2.0)

    def f(H2):
        c = chord(model, H1, H2)
        try:
            _, g1 = g_integrals(model, c, tol)
        except (InadmissibleChordError, DegenerateChordError):
            return np.inf
        return scale * g1 - 1.0

    return f


def solve_H2(model, eps, H1, mode=1, tol=QUAD_TOL):
    """Solve the mass condition ``n sqrt(eps/2) g1(H1, H2) = 1`` for ``H2``.

    The search runs over ``(H1, 1)``: bisection on the sign of the residual,
    with inadmissible or tangent chords counted as overshoot, until a finite
    bracket is found, then Brent's method.

    Raises
    ------
    NoBranchPointError
        No root: the residual is already positive for vanishing amplitude
        (``H1`` at or above the bifurcation value ``1/lambda_n``).
    DegenerateChordError
        The root lies closer to a tangent chord than can be resolved (only
        for very small ``eps``; see :func:`fracture_point`).
    """
    model = build_model(model)
    if eps <= 0:
        raise DomainError("eps must be positive")
    H1 = float(H1)
    if not 0.0 <= H1 < model.kappa:
        raise DomainError(f"need 0 <= H1 < kappa = {model.kappa:.12g}")
    if _mass_limit(model, eps, H1, mode) >= 0:
        raise NoBranchPointError(
            f"no mode-{mode} branch point with H1 = {H1:.12g} at eps = {eps:g}")
    f = _mass_residual(model, eps, H1, mode, tol)
    lo, hi = H1, 1.0
    f_lo, f_hi = None, np.inf
    for _ in range(200):
        if f_lo is not None and np.isfinite(f_hi):
            break
        if hi - lo <= 4 * np.finfo(float).eps * max(hi, 1.0):
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm < 0:
            lo, f_lo = mid, fm
        elif fm == 0:
            return mid
        else:
            hi, f_hi = mid, fm
    if f_lo is None:
        raise NoBranchPointError(f"mass condition not bracketed for H1 = {H1:.12g}")
    if not np.isfinite(f_hi):
        raise DegenerateChordError(
            f"root within {hi - H1:.1e} of a tangent chord; H2 not resolvable")
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def branch_point(model, eps, H1, mode=1, tol=QUAD_TOL):
    """Branch point with lower level ``H1``: ``lam = n sqrt(eps/2) g0``, ``sigma = -Gamma``.

    On the root ``n sqrt(eps/2) g1 = 1`` this equals
    ``1 + n sqrt(eps/2) (g0 - g1)``, which is the form evaluated: near a
    tangent chord one ulp of ``H2`` moves ``g1`` far more than the
    mass tolerance, while ``g0 - g1`` barely changes.
    """
    model = build_model(model)
    H2 = solve_H2(model, eps, H1, mode, tol)
    c = chord(model, H1, H2)
    g0, g1 = g_integrals(model, c, tol)
    lam = 1.0 + mode * np.sqrt(eps / 2.0) * (g0 - g1)
    sigma = float(model.Wstar(c.H1)) - c.varpi * c.H1
    return BranchPoint(chord=c, lam=float(lam), sigma=float(sigma), mode=int(mode),
                       g0=g0, g1=g1)


def _asymptotic_fracture(model, eps, mode, tol):
    """Fracture point when ``1 - H2`` is below double-precision resolution.

    Near the tangent chord ``(0, 1)``, ``g1 = A log(1/delta) + B + o(1)``
    with ``A = sqrt(2 / W*''(1))`` and ``delta = 1 - H2``, while
    ``g0 - g1 = int (1 - z)/sqrt(U)`` stays bounded. ``B`` is calibrated
    at ``delta = DELTA_FLOOR`` and ``lam = 1 + n sqrt(eps/2) (g0 - g1)``.
    """
    b = 1.0 - DELTA_FLOOR
    c = chord(model, 0.0, b)
    g0, g1 = g_integrals(model, c, tol)
    target = 1.0 / (mode * np.sqrt(eps / 2.0))
    if target <= g1:
        raise SolverError("asymptotic fracture regime requested outside its range")
    A = np.sqrt(2.0 / float(model.ddWstar(1.0)))
    B = g1 - A * np.log(1.0 / DELTA_FLOOR)
    delta = np.exp(-(target - B) / A)
    lam = 1.0 + mode * np.sqrt(eps / 2.0) * (g0 - g1)
    # W*(1 - delta) ~ W*''(1) delta^2 / 2
    c = Chord(0.0, 1.0 - delta, 0.5 * float(model.ddWstar(1.0)) * delta**2, 0.0, True)
    return BranchPoint(chord=c, lam=float(lam), sigma=0.0, mode=int(mode),
                       g0=float(g0 - g1 + target), g1=float(target), asymptotic=True)


def fracture_point(model, eps, mode=1, tol=QUAD_TOL):
    """The ``H1 = 0`` end of the mode-``n`` branch, where ``sigma = 0``.

    For small ``eps`` (about ``eps < 0.003`` for the rational model) the
    root ``H2`` is within ``1e-12`` of 1; the logarithmic expansion of
    ``g1`` is then used and ``asymptotic`` is set.
    """
    model = build_model(model)
    try:
        return branch_point(model, eps, 0.0, mode, tol)
    except DegenerateChordError:
        return _asymptotic_fracture(model, eps, mode, tol)


@dataclass
class BranchSweep:
    """Result of :func:`sweep_branch`: points ordered by decreasing ``H1``."""

    points: list
    failures: list
    bifurcation: object
    eps: float
    mode: int

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def lam(self):
        return np.array([p.lam for p in self.points])

    @property
    def sigma(self):
        return np.array([p.sigma for p in self.points])

    @property
    def fracture(self):
        last = self.points[-1] if self.points else None
        return last if last is not None and last.H1 == 0.0 else None


def sweep_h1(alpha, num_points):
    """Cosine-graded ``H1`` levels from just below ``alpha`` down to 0."""
    theta_min = np.pi / (2.0 * (num_points - 1))
    theta = np.linspace(theta_min, np.pi, num_points)
    H1 = 0.5 * alpha * (1.0 + np.cos(theta))
    H1[-1] = 0.0
    return H1


def sweep_branch(model, eps, mode=1, num_points=41, tol=QUAD_TOL):
    """Trace the mode-``n`` branch from near ``lambda_n`` to the fracture point."""
    model = build_model(model)
    if num_points < 2:
        raise ValueError("num_points must be >= 2")
    bif = bifurcation_points(model, eps, mode)[mode - 1]
    points, failures = [], []
    for H1 in sweep_h1(1.0 / bif.lambda_n, num_points):
        try:
            if H1 == 0.0:
                points.append(fracture_point(model, eps, mode, tol))
            else:
                points.append(branch_point(model, eps, H1, mode, tol))
        except SolverError as exc:
            failures.append((float(H1), f"{type(exc).__name__}: {exc}"))
    return BranchSweep(points, failures, bif, float(eps), int(mode))


class _LapInverter:
    """Inverts ``y(theta) = sqrt(eps/2) int_theta^{pi/2} 2/sqrt(Q)`` on one lap."""

    def __init__(self, model, eps, c, order):
        self.integ = _integrand(model, c)
        self.order = order
        self.scale = np.sqrt(eps / 2.0)
        breaks = qd.panel_breaks()
        # each panel subdivided uniformly; cumulative integral from the top
        fine = np.concatenate([np.linspace(a, b, _TABLE_SUBDIV + 1)[:-1]
                               for a, b in zip(breaks[:-1], breaks[1:])] + [[breaks[-1]]])
        pieces = qd.partial_from(self.integ, fine[:-1], fine[1:], order)
        tail = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
        self.theta_table = fine
        self.y_table = self.scale * tail
        self.length = float(self.y_table[0])
        # y decreases in theta; interpolate theta as a function of increasing y
        self._guess = PchipInterpolator(self.y_table[::-1], self.theta_table[::-1])

    def _y_of(self, theta):
        idx = np.clip(np.searchsorted(self.theta_table, theta, side="right"), 1,
                      len(self.theta_table) - 1)
        right = self.theta_table[idx]
        return self.scale * qd.partial_from(self.integ, theta, right, self.order) + self.y_table[idx]

    def theta(self, y):
        y = np.clip(np.asarray(y, dtype=float), 0.0, self.length)
        th = np.clip(self._guess(y), 0.0, qd.HALF_PI)
        for _ in range(3):
            inner = (th > 0) & (th < qd.HALF_PI)
            if not np.any(inner):
                break
            t = th[inner]
            resid = self._y_of(t) - y[inner]
            slope = -self.scale * self.integ.weights(t)
            th[inner] = np.clip(t - resid / slope, 0.0, qd.HALF_PI)
        return th

    def H(self, y):
        return self.integ.z(self.theta(y))


def _lap_sampler(model, eps, bp, order=_TABLE_ORDER):
    inv = _LapInverter(model, eps, bp.chord, order)
    L = bp.lam / bp.mode

    def H_at(y):
        # mode-n profile: n laps of length L, alternating direction
        y = np.asarray(y, dtype=float)
        k = np.clip(np.floor(y / L), 0, bp.mode - 1)
        local = y - k * L
        local = np.where(k % 2 == 1, L - local, local)
        out = inv.H(local * inv.length / L)
        return np.clip(out, 0.0, None)

    return H_at, L


def profile_from_quadrature(model, eps, bp, n_samples=8001):
    """Sample the branch solution at ``bp`` on a uniform grid of ``[0, lam]``.

    Mode 1 decreases from ``H(0) = H2`` to ``H(lam) = H1``; mode ``n`` is
    ``n`` laps alternately reflected.
    """
    model = build_model(model)
    if bp.asymptotic:
        raise DegenerateChordError("no profile for an asymptotic fracture point; "
                                   "H2 is not representable")
    H_at, _ = _lap_sampler(model, eps, bp)
    y = np.linspace(0.0, bp.lam, int(n_samples))
    return Profile(y=y, H=H_at(y), lam=bp.lam, eps=float(eps), varpi=bp.chord.varpi,
                   mode=bp.mode, sampler=H_at)


def zero_sites(mode, L):
    """Positions where a mode-``n`` fracture profile touches ``H = 0``."""
    return [(2 * k + 1) * L for k in range((mode + 1) // 2)]


def broken_profile(model, eps, lambda_total, mode=1, n_samples=8001, gap_weights=None,
                   fracture=None):
    """Fracture profile extended by cracks (``H = 0``) to length ``lambda_total``.

    The opening ``lambda_total - lam*`` is inserted at the zeros of the
    fracture profile, split by ``gap_weights`` (one weight per zero, equal
    by default; mode 1 has a single zero at the right end).
    """
    model = build_model(model)
    fp = fracture if fracture is not None else fracture_point(model, eps, mode)
    if fp.asymptotic:
        raise DegenerateChordError("no profile for an asymptotic fracture point")
    lam_star = fp.lam
    if lambda_total < lam_star * (1.0 - 1e-12):
        raise ValueError(f"lambda_total = {lambda_total:.12g} is below the fracture "
                         f"stretch {lam_star:.12g}")
    gap = max(float(lambda_total) - lam_star, 0.0)
    H_at, L = _lap_sampler(model, eps, fp)
    sites = zero_sites(fp.mode, L)
    w = np.ones(len(sites)) if gap_weights is None else np.asarray(gap_weights, dtype=float)
    if w.shape != (len(sites),) or np.any(w < 0) or w.sum() <= 0:
        raise ValueError(f"gap_weights needs {len(sites)} non-negative entries")
    gaps = gap * w / w.sum()

    # deformed-coordinate breakpoints: glued pieces between consecutive sites
    pieces = []
    cursor_ref, cursor_def = 0.0, 0.0
    cracks = []
    for site, g in zip(sites, gaps):
        pieces.append((cursor_ref, site, cursor_def))
        cursor_def += site - cursor_ref
        if g > 0:
            cracks.append((cursor_def, cursor_def + g))
        cursor_def += g
        cursor_ref = site
    if cursor_ref < lam_star:
        pieces.append((cursor_ref, lam_star, cursor_def))
    total = float(lambda_total) if gap > 0 else lam_star

    def sampler(yq):
        yq = np.asarray(yq, dtype=float)
        out = np.zeros_like(yq)
        for a0, a1, d0 in pieces:
            sel = (yq >= d0 - 1e-15) & (yq <= d0 + (a1 - a0) + 1e-15)
            out[sel] = H_at(np.clip(a0 + (yq[sel] - d0), a0, a1))
        return out

    # grid nodes at every piece boundary so the C^1 corners are resolved
    n = int(n_samples)
    knots = sorted({0.0, total, *[d0 for _, _, d0 in pieces],
                    *[d0 + a1 - a0 for a0, a1, d0 in pieces]})
    ys = []
    for left, right in zip(knots[:-1], knots[1:]):
        m = max(int(round(n * (right - left) / total)), 2)
        ys.append(np.linspace(left, right, m)[:-1])
    y = np.concatenate(ys + [[total]])
    return Profile(y=y, H=sampler(y), lam=total, eps=float(eps), varpi=fp.chord.varpi,
                   mode=fp.mode, broken_intervals=cracks, sampler=sampler)


def surface_energy(model, eps):
    """Leading-order energy of a broken bar, in inverse and forward form.

    Returns ``(sqrt(eps) int_0^1 sqrt(2 W*(H)) dH,
    sqrt(eps) int_1^inf sqrt(2 W(F) / F^5) dF)``; ``H = 1/F`` maps one to
    the other.
    """
    model = build_model(model)
    if eps <= 0:
        raise DomainError("eps must be positive")
    inverse = qd.sin2_integrate(lambda H: np.sqrt(2.0 * np.maximum(model.Wstar(H), 0.0)),
                                0.0, 1.0, order=64)
    forward, err = quad(lambda F: np.sqrt(2.0 * max(float(model.W(F)), 0.0) / F**5),
                        1.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=400)
    if not np.isfinite(forward) or err > 1e-9 * abs(forward):
        raise SolverError(f"forward surface-energy integral did not converge (err {err:.2e})")
    root = np.sqrt(eps)
    return root * inverse, root * forward


def phase_critical_points(model, varpi):
    """Roots ``alpha in [0, kappa)`` and ``beta in (kappa, M]`` of ``dW*(H) = varpi``."""
    model = build_model(model)
    low = float(model.dWstar(model.kappa))
    if not low < varpi <= model.gamma * (1.0 + 1e-14):
        raise NoCriticalPointsError(
            f"varpi = {varpi:.12g} outside ({low:.12g}, gamma = {model.gamma:.12g}]")
    f = lambda H: float(model.dWstar(H)) - varpi
    alpha = 0.0 if f(0.0) <= 0 else brentq(f, 0.0, model.kappa, xtol=1e-14)
    beta = model.M if f(model.M) <= 0 else brentq(f, model.kappa, model.M, xtol=1e-14)
    return alpha, beta


def trivial_branch(model, lam):
    """Homogeneous-branch stress ``dW(lam)``."""
    model = build_model(model)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise DomainError("lambda must be positive")
    out = model.dW(lam)
    return float(out) if np.ndim(out) == 0 else out


def lambda_sigma(model, sigma):
    """Stretch ``lam in [1, 1/kappa]`` with ``dW(lam) = sigma`` (trivial-branch inverse)."""
    model = build_model(model)
    top = 1.0 / model.kappa
    f = lambda lam: float(model.dW(lam)) - sigma
    if sigma <= 0:
        return 1.0
    if f(top) < 0:
        raise DomainError(f"sigma = {sigma:.12g} exceeds the peak stress {float(model.dW(top)):.12g}")
    return brentq(f, 1.0, top, xtol=1e-14)
