"""Gauss-Legendre quadrature with the ``sin^2`` endpoint substitution.

Integrals of the form ``int_a^b f(z) / sqrt(U(z)) dz`` with simple zeros
of ``U`` at both ends are mapped by ``z = a + (b - a) sin^2(theta)`` to

    int_0^{pi/2} 2 f(z) / sqrt(Q(theta)) dtheta,
    Q = U(z) / ((z - a) (b - z)),

whose integrand is analytic in ``theta``. Near a tangency (``U'`` small at
an endpoint) ``Q`` nearly vanishes there, so the panels are graded
geometrically towards ``theta = 0`` and ``theta = pi/2``.
"""

from functools import lru_cache

import numpy as np

from .exceptions import DegenerateChordError, InadmissibleChordError

HALF_PI = 0.5 * np.pi
GRADING_DEPTH = 30
UNIFORM_PANELS = 8
START_ORDER = 16
MAX_ORDER = 128
G1_CAP = 1e6


@lru_cache(maxsize=None)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=None)
def panel_breaks(depth=GRADING_DEPTH, uniform=UNIFORM_PANELS):
    """Breakpoints on ``[0, pi/2]``: uniform interior, geometric at both ends."""
    h = HALF_PI / uniform
    inner = np.linspace(h, HALF_PI - h, uniform - 1)
    geo = h * 2.0 ** -np.arange(1, depth + 1)
    left = np.concatenate([[0.0], geo[::-1]])
    right = HALF_PI - geo
    out = np.concatenate([left, inner, right, [HALF_PI]])
    out.flags.writeable = False
    return out


def composite_nodes(order, breaks=None):
    """Nodes and weights of composite Gauss-Legendre on ``breaks``."""
    if breaks is None:
        breaks = panel_breaks()
    x, w = gauss_legendre(order)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def sin2_integrate(f, a, b, order=64):
    """``int_a^b f(z) dz`` through ``z = a + (b - a) sin^2(theta)``.

    Suited to integrands with square-root behaviour at the ends, such as
    ``sqrt(W*(H))`` near ``H = 0``.
    """
    theta, w = composite_nodes(order)
    s, c = np.sin(theta), np.cos(theta)
    z = np.where(theta <= 0.25 * np.pi, a + (b - a) * s**2, b - (b - a) * c**2)
    jac = 2.0 * (b - a) * s * c
    return float(np.sum(w * np.asarray(f(z), dtype=float) * jac))


class TiltedIntegrand:
    """The ``theta``-form of ``1/sqrt(U)`` for the chord ``(a, b)`` of ``W*``.

    ``U(z) = W*(z) - W*(a) - varpi (z - a)`` vanishes at both ends.
    """

    def __init__(self, model, a, b, varpi):
        self.model = model
        self.a = float(a)
        self.b = float(b)
        self.varpi = float(varpi)
        self.width = self.b - self.a
        self.Wa = float(model.Wstar(self.a))

    def z(self, theta):
        theta = np.asarray(theta, dtype=float)
        s2, c2 = np.sin(theta) ** 2, np.cos(theta) ** 2
        return np.where(theta <= 0.25 * np.pi, self.a + self.width * s2, self.b - self.width * c2)

    def q(self, theta):
        """``U(z) / ((z - a)(b - z))`` at ``z = z(theta)``; finite at both ends.

        Very close to an endpoint the direct difference loses its digits to
        cancellation; there ``U`` is replaced by its second-order expansion,
        switching where the expansion's truncation error (distance cubed)
        drops below the rounding error of the direct form.
        """
        theta = np.asarray(theta, dtype=float)
        s2, c2 = np.sin(theta) ** 2, np.cos(theta) ** 2
        da, db = self.width * s2, self.width * c2
        z = self.z(theta)
        Wz = np.asarray(self.model.Wstar(z), dtype=float)
        U = (Wz - self.Wa) - self.varpi * da
        radius = np.cbrt(8 * np.finfo(float).eps * (np.abs(Wz) + abs(self.Wa) + np.abs(self.varpi * da)))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = U / (da * db)
            near_a = da < radius
            near_b = db < radius
            kink = getattr(self.model, "kink", None)
            if kink is not None and self.a < kink < self.b:
                # the expansion must not reach across a curvature jump
                near_a &= da < kink - self.a
                near_b &= db < self.b - kink
            if np.any(near_a) or np.any(near_b):
                slope_a, slope_b = self.endpoint_slopes()
                curv_a = float(self.model.ddWstar(self.a))
                curv_b = float(self.model.ddWstar(self.b))
                out = np.where(near_a, (slope_a + 0.5 * curv_a * da) / db, out)
                out = np.where(near_b, (-slope_b + 0.5 * curv_b * db) / da, out)
        return out

    def endpoint_slopes(self):
        """``U'(a)`` and ``U'(b)``: positive and negative for a simple-zero chord."""
        return (float(self.model.dWstar(self.a)) - self.varpi,
                float(self.model.dWstar(self.b)) - self.varpi)

    def check(self, tol=1e-13):
        da, db = self.endpoint_slopes()
        scale = max(1.0, abs(self.varpi))
        if da <= tol * scale or db >= -tol * scale:
            raise DegenerateChordError(
                f"tangency at a chord endpoint: U'(H1) = {da:.3e}, U'(H2) = {db:.3e}")

    def weights(self, theta):
        """``2 / sqrt(Q)``; raises on a non-positive ``Q`` at an interior node."""
        q = self.q(theta)
        if np.any(~(q > 0)):
            bad = theta[~(q > 0)][0]
            raise InadmissibleChordError(
                f"U <= 0 inside chord ({self.a:.6g}, {self.b:.6g}) near z = {float(self.z(bad)):.6g}")
        return 2.0 / np.sqrt(q)


def g_integrals(integrand, tol=1e-11, start_order=START_ORDER, max_order=MAX_ORDER):
    """Return ``(g0, g1, order_used)`` with ``g0 = int dz/sqrt(U)``, ``g1 = int z dz/sqrt(U)``.

    The per-panel order is doubled until both integrals change by less
    than ``tol`` (relative). For chords within ~1e-9 of a tangency the
    rounding of ``z`` itself sets a floor near ``1e-10``; the highest-order
    value is returned in that case.
    """
    integrand.check()
    previous = None
    order = start_order
    while True:
        theta, w = composite_nodes(order)
        kern = integrand.weights(theta) * w
        g0 = float(np.sum(kern))
        g1 = float(np.sum(kern * integrand.z(theta)))
        if g1 > G1_CAP:
            raise DegenerateChordError(f"g1 = {g1:.3e} exceeds {G1_CAP:g} (near-tangent chord)")
        if previous is not None:
            d0 = abs(g0 - previous[0]) / max(abs(g0), 1e-300)
            d1 = abs(g1 - previous[1]) / max(abs(g1), 1e-300)
            if max(d0, d1) <= tol:
                return g0, g1, order
        if order >= max_order:
            return g0, g1, order
        previous = (g0, g1)
        order *= 2


def cumulative_from_top(integrand, order):
    """Cumulative ``int_theta^{pi/2} 2/sqrt(Q)`` at every panel breakpoint.

    Returns ``(breaks, tail)`` with ``tail[k]`` the integral from
    ``breaks[k]`` to ``pi/2``.
    """
    breaks = panel_breaks()
    theta, w = composite_nodes(order, breaks)
    kern = (integrand.weights(theta) * w).reshape(len(breaks) - 1, order)
    per_panel = kern.sum(axis=1)
    tail = np.concatenate([np.cumsum(per_panel[::-1])[::-1], [0.0]])
    return breaks, tail


def partial_from(integrand, lo, hi, order):
    """Vectorised ``int_lo^hi 2/sqrt(Q)`` for arrays ``lo``, ``hi`` of equal shape."""
    x, w = gauss_legendre(order)
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1.0)
    vals = integrand.weights(nodes.ravel()).reshape(nodes.shape)
    return np.sum(vals * w * half, axis=-1)
