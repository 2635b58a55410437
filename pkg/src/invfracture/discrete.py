"""Finite-difference oracle for the constrained energy.

Nodal fields ``u_i = u(s_i)``, ``s_i = i/(N-1)``, carry the trapezoid mass
``w``. The discrete energy is

    V(u) = sum_cells (eps/2) ((u_{i+1} - u_i)/h)^2 h + lam^4 sum_i w_i W*((1 + u_i)/lam),

minimised over ``{u >= -1, sum w u = 0}`` by projected gradient descent
in the ``w``-weighted metric. Stationarity, the sign condition on the
broken set and the second variation are checked on the result.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import LinearOperator, eigsh, splu

from .constitutive import build_model
from .exceptions import DomainError, NumericalFailureError

logger = logging.getLogger(__name__)

ACTIVE_TOL = 1e-8
ARMIJO = 1e-4
BACKTRACK = 0.5
MAX_BACKTRACKS = 60
STALL_ITERATIONS = 20


def trapezoid_weights(N):
    if N < 2:
        raise ValueError("need at least two nodes")
    h = 1.0 / (N - 1)
    w = np.full(N, h)
    w[[0, -1]] = 0.5 * h
    return w


@dataclass
class GridField:
    """Nodal values of ``u`` on the uniform grid of ``[0, 1]``."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).copy()
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("GridField needs a 1-d array of at least two values")

    @property
    def N(self):
        return self.values.size

    @property
    def h(self):
        return 1.0 / (self.N - 1)

    @property
    def s(self):
        return np.linspace(0.0, 1.0, self.N)

    @property
    def weights(self):
        return trapezoid_weights(self.N)

    def mean(self):
        return float(self.weights @ self.values)

    def broken(self, tol=ACTIVE_TOL):
        """Mask of nodes on the constraint ``u = -1``."""
        return self.values < -1.0 + tol

    def is_admissible(self, tol=1e-12):
        return bool(np.all(self.values >= -1.0 - tol) and abs(self.mean()) <= tol)

    @property
    def interior(self):
        """True when no node touches the constraint."""
        return not np.any(self.broken())

    def H(self, lam):
        return (1.0 + self.values) / lam


def _values(u):
    return u.values if isinstance(u, GridField) else np.asarray(u, dtype=float)


def energy(model, eps, lam, u):
    """Discrete energy ``V = lam^3 E``, with ``E`` the total stored energy of the bar."""
    model = build_model(model)
    u = _values(u)
    N = u.size
    h = 1.0 / (N - 1)
    w = trapezoid_weights(N)
    du = np.diff(u)
    H = (1.0 + u) / lam
    return float(0.5 * eps * np.sum(du * du) / h + lam**4 * (w @ model.Wstar(H)))


def gradient(model, eps, lam, u):
    """Euclidean gradient of :func:`energy` with respect to the nodal values."""
    model = build_model(model)
    u = _values(u)
    N = u.size
    h = 1.0 / (N - 1)
    w = trapezoid_weights(N)
    du = np.diff(u)
    g = np.zeros(N)
    g[:-1] -= du
    g[1:] += du
    g *= eps / h
    return g + lam**3 * w * model.dWstar((1.0 + u) / lam)


def project(u, weights=None):
    """Closest field with ``u >= -1`` and zero trapezoidal mean.

    The projection is ``max(u - c, -1)`` with the shift ``c`` fixed by the
    mean constraint. The mean of the clipped field is piecewise linear in
    ``c`` with breakpoints ``u_i + 1``; sorting them gives ``c`` exactly.
    """
    u = _values(u)
    w = trapezoid_weights(u.size) if weights is None else np.asarray(weights, dtype=float)
    w = w / w.sum()
    order = np.argsort(-u, kind="stable")
    us, ws = u[order], w[order]
    W = np.cumsum(ws)
    S = np.cumsum(ws * us)
    # with the k largest nodes free: S_k - c W_k - (1 - W_k) = 0
    c = (S - 1.0 + W) / W
    upper = us + 1.0
    lower = np.append(us[1:] + 1.0, -np.inf)
    ok = (c < upper) & (c >= lower)
    k = int(np.flatnonzero(ok)[0]) if np.any(ok) else int(np.argmin(np.abs(c - upper)))
    v = np.maximum(u - c[k], -1.0)
    free = v > -1.0
    if np.any(free):
        v[free] -= (w @ v) / w[free].sum()
    return GridField(v)


@dataclass
class MinimizeResult:
    field: GridField
    energy: float
    energies: list
    iterations: int
    converged: bool
    pg_norm: float
    seed: str = ""
    stagnated: bool = False

    @property
    def broken_fraction(self):
        return float(np.mean(self.field.broken()))


def minimize(model, eps, lam, u0, max_iter=50000, tol=1e-8, step0=1.0):
    """Projected gradient descent with Barzilai-Borwein trial steps.

    Each step backtracks (factor 0.5) from the trial length until the
    Armijo condition holds along the projection arc, so the energy trace
    is monotone. Stops when the sup norm of the projected step of unit
    length drops below ``tol``, or when no step can lower the energy by
    more than its rounding error (``stagnated``; on fine grids this floor
    is near ``h^-1 sqrt(eps * eps_machine * V)``).

    Raises
    ------
    NumericalFailureError
        No decrease after the backtracking floor.
    """
    model = build_model(model)
    if lam <= 0 or eps <= 0:
        raise DomainError("lambda and eps must be positive")
    u = project(u0).values
    N = u.size
    w = trapezoid_weights(N)
    V = energy(model, eps, lam, u)
    energies = [V]
    t = step0
    g = gradient(model, eps, lam, u) / w
    pg = np.inf
    it = 0
    stagnated = False
    stalls = 0
    rounding = 8 * np.finfo(float).eps
    for it in range(1, max_iter + 1):
        pg = float(np.max(np.abs(project(u - g, w).values - u)))
        if pg < tol:
            break
        for _ in range(MAX_BACKTRACKS):
            trial = project(u - t * g, w).values
            d = trial - u
            V_new = energy(model, eps, lam, trial)
            if V_new <= V + ARMIJO * (w * g) @ d:
                break
            t *= BACKTRACK
        else:
            if V_new - V <= rounding * abs(V):
                # energy differences have reached rounding level
                logger.info("minimize stagnated at iteration %d (projected gradient %.3e)", it, pg)
                stagnated = True
                break
            raise NumericalFailureError(
                f"no descent after {MAX_BACKTRACKS} backtracks (iteration {it})")
        g_new = gradient(model, eps, lam, trial) / w
        s_vec, y_vec = trial - u, g_new - g
        sy = (w * s_vec) @ y_vec
        # BB1 step for the next trial, kept positive and bounded
        t = (w * s_vec) @ s_vec / sy if sy > 0 else step0
        t = float(np.clip(t, 1e-12, 1e6))
        stalls = stalls + 1 if V - V_new <= rounding * abs(V) else 0
        u, g, V = trial, g_new, V_new
        energies.append(V)
        if stalls >= STALL_ITERATIONS:
            stagnated = True
            break
    converged = pg < tol or stagnated
    if not converged:
        logger.info("minimize stopped at max_iter=%d with projected-gradient %.3e", max_iter, pg)
    return MinimizeResult(GridField(u), V, energies, it, converged, pg, stagnated=stagnated)


def seed_field(kind, N, lam=None, rng=None):
    """Initial guesses: ``ramp``, ``-ramp``, ``cos``, ``-cos`` or ``random:k``."""
    s = np.linspace(0.0, 1.0, N)
    kind = str(kind).strip().lower()
    if kind in ("ramp", "+ramp"):
        u = 1.0 - 2.0 * s
    elif kind == "-ramp":
        u = 2.0 * s - 1.0
    elif kind in ("cos", "+cos"):
        u = 0.5 * np.cos(np.pi * s)
    elif kind == "-cos":
        u = -0.5 * np.cos(np.pi * s)
    elif kind.startswith("random"):
        _, _, key = kind.partition(":")
        seed = int(key) if key else 0
        gen = np.random.default_rng(seed) if rng is None else rng
        u = 1e-2 * gen.standard_normal(N)
    else:
        raise ValueError(f"unknown seed {kind!r}")
    return project(u)


def prolong(u, N):
    """Linear interpolation of a nodal field to ``N`` nodes, then projection."""
    u = _values(u)
    return project(np.interp(np.linspace(0, 1, N), np.linspace(0, 1, u.size), u))


def minimize_sequenced(model, eps, lam, seed, N=2001, levels=4, max_iter=50000, tol=1e-8):
    """Minimise from ``seed`` on a coarse grid and refine by factors of two.

    Grid sequencing removes the slow smooth-error components cheaply; the
    final level runs to ``tol`` on ``N`` nodes.
    """
    sizes = [N]
    for _ in range(levels - 1):
        nxt = (sizes[-1] - 1) // 2 + 1
        if nxt < 33:
            break
        sizes.append(nxt)
    sizes = sizes[::-1]
    u = seed_field(seed, sizes[0], lam) if isinstance(seed, str) else prolong(seed, sizes[0])
    total = 0
    res = None
    for k, n in enumerate(sizes):
        if k:
            u = prolong(res.field, n)
        last = k == len(sizes) - 1
        res = minimize(model, eps, lam, u, max_iter=max_iter, tol=tol if last else 10 * tol)
        total += res.iterations
    res.iterations = total
    res.seed = seed if isinstance(seed, str) else "custom"
    return res


def minimize_multistart(model, eps, lam, N=2001, seeds=("ramp", "-ramp", "cos", "-cos"),
                        **kwargs):
    """Run :func:`minimize_sequenced` from every seed; return all results, best first."""
    results = [minimize_sequenced(model, eps, lam, s, N=N, **kwargs) for s in seeds]
    return sorted(results, key=lambda r: r.energy)


def _second_difference(u, h):
    # ghost reflection at both ends: u_{-1} = u_1, u_N = u_{N-2}
    ext = np.concatenate([[u[1]], u, [u[-2]]])
    return (ext[2:] - 2.0 * ext[1:-1] + ext[:-2]) / h**2


@dataclass
class ELResidual:
    """Pointwise residual ``-eps u'' + lam^3 dW* - mu`` on the glued set.

    ``mu`` is the multiplier of the mean constraint, estimated as the
    weighted average of ``-eps u'' + lam^3 dW*`` over the checked nodes;
    nodes next to the broken set are skipped (``u''`` is not defined across
    the crack edge) and hold NaN.
    """

    residual: np.ndarray
    multiplier: float
    max_norm: float
    checked: np.ndarray


def el_residual(model, eps, lam, u, active_tol=ACTIVE_TOL):
    model = build_model(model)
    u = _values(u)
    N = u.size
    h = 1.0 / (N - 1)
    w = trapezoid_weights(N)
    broken = u < -1.0 + active_tol
    near = broken.copy()
    near[1:] |= broken[:-1]
    near[:-1] |= broken[1:]
    checked = ~near
    pointwise = -eps * _second_difference(u, h) + lam**3 * model.dWstar((1.0 + u) / lam)
    res = np.full(N, np.nan)
    if not np.any(checked):
        return ELResidual(res, float("nan"), 0.0, checked)
    mu = float(w[checked] @ pointwise[checked] / w[checked].sum())
    res[checked] = pointwise[checked] - mu
    return ELResidual(res, mu, float(np.max(np.abs(res[checked]))), checked)


@dataclass
class VIReport:
    """Stationarity on the glued set and the sign condition on the broken set."""

    ok: bool
    el_max: float
    margin: float
    varpi: float
    n_broken: int
    message: str = ""

    def as_dict(self):
        return {"ok": self.ok, "el_max": self.el_max, "margin": self.margin,
                "varpi": self.varpi, "n_broken": self.n_broken, "message": self.message}


def vi_residual(model, eps, lam, u, el_tol=None, active_tol=ACTIVE_TOL):
    """Check the variational inequality at ``u``.

    On broken nodes the multiplier density ``lam^3 (gamma - varpi)`` must
    be non-negative, with ``varpi = mu / lam^3`` from the glued set.
    ``el_tol`` defaults to ``max(1e-6, 50 eps h^0)`` scaled by ``lam^3``,
    i.e. a loose stationarity check.
    """
    model = build_model(model)
    vals = _values(u)
    el = el_residual(model, eps, lam, vals, active_tol)
    broken = vals < -1.0 + active_tol
    nb = int(np.count_nonzero(broken))
    varpi = el.multiplier / lam**3 if np.isfinite(el.multiplier) else float("nan")
    if el_tol is None:
        el_tol = 1e-3 * max(1.0, lam**3)
    margin = lam**3 * (model.gamma - varpi) if nb else float("inf")
    problems = []
    if el.max_norm > el_tol:
        problems.append(f"EL residual {el.max_norm:.3e} exceeds {el_tol:.1e}")
    if nb and not margin >= 0:
        problems.append(f"negative multiplier density lam^3 (gamma - varpi) = {margin:.6g}")
    return VIReport(not problems, el.max_norm, float(margin), float(varpi), nb, "; ".join(problems))


@dataclass
class StabilityReport:
    """Smallest eigenvalues of the second variation on mean-zero glued fields."""

    smallest_eigenvalues: np.ndarray
    classification: str
    witness_direction: np.ndarray = field(repr=False)
    n_glued: int = 0
    tolerance: float = 0.0

    def as_dict(self):
        return {"smallest_eigenvalues": [float(x) for x in self.smallest_eigenvalues],
                "classification": self.classification, "n_glued": self.n_glued,
                "tolerance": self.tolerance}


def _second_variation_parts(model, eps, lam, u):
    N = u.size
    h = 1.0 / (N - 1)
    w = trapezoid_weights(N)
    main = np.full(N, 2.0)
    main[[0, -1]] = 1.0
    stiff_main = eps * main / h
    stiff_off = -eps * np.ones(N - 1) / h
    pot = lam**2 * model.ddWstar((1.0 + u) / lam)
    return w, stiff_main, stiff_off, pot


def second_variation_value(model, eps, lam, u, eta):
    """``eps int eta'^2 + lam^2 int W*''((1+u)/lam) eta^2`` on the grid."""
    model = build_model(model)
    u, eta = _values(u), _values(eta)
    h = 1.0 / (u.size - 1)
    w = trapezoid_weights(u.size)
    de = np.diff(eta)
    return float(eps * np.sum(de * de) / h + lam**2 * (w @ (model.ddWstar((1.0 + u) / lam) * eta**2)))


def second_variation_spectrum(model, eps, lam, u, k=4, active_tol=ACTIVE_TOL, marginal_tol=None):
    """Smallest ``k`` eigenvalues of the second variation.

    The form is taken relative to the trapezoid mass on mean-zero nodal
    fields vanishing on the broken set. Eigenvalues come from shift-invert
    Lanczos; the shift sits below the whole spectrum so the factorisation
    is positive definite, and the mean constraint enters through a
    bordered solve.
    """
    model = build_model(model)
    u = _values(u)
    N = u.size
    h = 1.0 / (N - 1)
    w, dmain, doff, pot = _second_variation_parts(model, eps, lam, u)
    glued = ~(u < -1.0 + active_tol)
    idx = np.flatnonzero(glued)
    n = idx.size
    if marginal_tol is None:
        marginal_tol = max(1e-10, eps * np.pi**4 * h**2)
    if n < 2:
        return StabilityReport(np.array([]), "stable", np.zeros(N), n, marginal_tol)
    # symmetric form B^{-1/2} A B^{-1/2} on the glued nodes
    A = diags([doff, dmain + w * pot, doff], [-1, 0, 1], format="csr")[idx][:, idx]
    r = 1.0 / np.sqrt(w[idx])
    C = diags(r) @ A @ diags(r)
    q = np.sqrt(w[idx])
    q = q / np.linalg.norm(q)
    k = int(min(k, n - 1))

    if n <= 200:
        P = np.eye(n) - np.outer(q, q)
        evals, evecs = np.linalg.eigh(P @ C.toarray() @ P)
        keep = np.abs(evecs.T @ q) < 0.5
        evals, evecs = evals[keep][:k], evecs[:, keep][:, :k]
    else:
        sigma = float(np.min(pot[idx])) - 1.0
        lu = splu((C - sigma * diags(np.ones(n))).tocsc())
        Tq = lu.solve(q)
        qTq = q @ Tq

        def apply(b):
            b = np.ravel(b)
            x = lu.solve(b)
            return x - (q @ x) / qTq * Tq

        op = LinearOperator((n, n), matvec=apply, dtype=float)
        theta, evecs = eigsh(op, k=k, which="LA", tol=1e-12)
        order = np.argsort(-theta)
        evals = sigma + 1.0 / theta[order]
        evecs = evecs[:, order]
    witness = np.zeros(N)
    if evecs.shape[1]:
        witness[idx] = evecs[:, 0] * r
        witness -= (w @ witness) / w[idx].sum() * glued
    lo = float(evals[0]) if len(evals) else np.inf
    if lo < -marginal_tol:
        cls = "unstable"
    elif lo <= marginal_tol:
        cls = "marginal"
    else:
        cls = "stable"
    return StabilityReport(np.asarray(evals, dtype=float), cls, witness, n, marginal_tol)


@dataclass
class DirectionResult:
    value: float
    tau: float
    curvature: float
    inconclusive: bool
    direction: np.ndarray = field(repr=False)


def higher_mode_instability_direction(model, eps, lam, u, tau, period=None, mode=2):
    """Second variation along ``eta = phi + tau psi`` for a mode-``n`` field.

    ``phi = u'`` on the first full period ``[0, b]`` and zero beyond, a
    neutral direction up to discretisation error; ``psi = (1 - t)(1 - 3t)``
    with ``t = s/b`` has ``psi(0) = 1`` and zero mean on ``[0, b]``. The
    returned value behaves like ``-2 eps tau u''(0)`` for small ``tau``.
    ``period`` defaults to ``2/mode`` (unbroken fields).
    """
    model = build_model(model)
    u = _values(u)
    N = u.size
    h = 1.0 / (N - 1)
    s = np.linspace(0.0, 1.0, N)
    b = 2.0 / mode if period is None else float(period)
    if not 0 < b <= 1.0 + 1e-12:
        raise ValueError("period must lie in (0, 1]")
    inside = s <= b + 0.5 * h
    phi = np.where(inside, np.gradient(u, h), 0.0)
    phi[0] = 0.0
    last = np.flatnonzero(inside)[-1]
    phi[last] = 0.0
    t = np.clip(s / b, 0.0, 1.0)
    psi = np.where(inside, (1.0 - t) * (1.0 - 3.0 * t), 0.0)
    eta = phi + tau * psi
    curvature = 2.0 * (u[1] - u[0]) / h**2
    value = second_variation_value(model, eps, lam, u, eta)
    scale = max(1.0, float(np.max(np.abs(np.diff(u, 2)))) / h**2)
    inconclusive = abs(curvature) <= 1e-8 * scale
    return DirectionResult(value, float(tau), float(curvature), bool(inconclusive), eta)


def stress_estimate(model, eps, lam, u, active_tol=ACTIVE_TOL):
    """Axial stress from the first integral, averaged over the glued nodes.

    ``sigma = W*(H) - varpi H - (eps/2) H'^2`` is constant on exact
    solutions; ``varpi`` comes from the EL multiplier and
    ``H' = u'(s) / lam^2``.
    """
    model = build_model(model)
    u = _values(u)
    el = el_residual(model, eps, lam, u, active_tol)
    if not np.isfinite(el.multiplier):
        return 0.0
    varpi = el.multiplier / lam**3
    h = 1.0 / (u.size - 1)
    H = (1.0 + u) / lam
    dH = np.gradient(u, h) / lam**2
    sig = model.Wstar(H) - varpi * H - 0.5 * eps * dH**2
    w = trapezoid_weights(u.size)
    mask = el.checked
    return float(w[mask] @ sig[mask] / w[mask].sum())
