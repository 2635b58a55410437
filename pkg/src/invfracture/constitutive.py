"""Stored-energy models and their Shield inverses.

A stored energy ``W(F)`` per unit reference length is turned into the
inverse stored energy ``W*(H) = H W(1/H)`` per unit deformed length,
with ``W*(0) = 0`` (the cracked phase). Two built-in models are provided:

``"rational"``
    ``W(F) = (1 - 1/F)^2``, so ``W*(H) = H (1 - H)^2``.
``"quadratic"``
    Piecewise-quadratic ``W*`` with inflection ``kappa = 1/sqrt(2)``;
    ``C^1`` but only piecewise ``C^2``.

Custom models supply ``W``, ``dW`` and ``ddW`` as expression strings in ``F``
(see :mod:`invfracture.expr`) or as callables.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError, HypothesisViolationError, ModelDefinitionError
from .expr import parse_expression

SMALL_H = 1e-12
ROOT_XTOL = 1e-12
BRACKET_CAP = 64.0


def shield_invert(W, H):
    """Return ``H * W(1/H)``, extended by 0 at ``H = 0``.

    Raises :class:`DomainError` for ``H < 0``: a negative inverse stretch
    would be an orientation-reversing interpenetration.
    """
    H = np.asarray(H, dtype=float)
    if np.any(H < 0):
        raise DomainError("negative inverse stretch (interpenetration)")
    with np.errstate(divide="ignore", invalid="ignore"):
        safe = np.where(H > 0, H, 1.0)
        out = np.where(H > 0, safe * np.asarray(W(1.0 / safe), dtype=float), 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ConstitutiveModel:
    """Immutable bundle of ``W``, ``W*`` and derivatives plus structural constants.

    Attributes
    ----------
    kappa : float
        Inflection point of ``W*`` in ``(0, 1)``.
    gamma : float
        ``dW*/dH`` at ``0+``; the asymptote of ``W`` as ``F -> inf``.
    M : float
        Unique root ``> 1`` of ``dW*(M) = gamma``.
    kink : float or None
        Location where ``ddWstar`` jumps, for piecewise ``C^2`` models.
    """

    name: str
    W: Callable
    dW: Callable
    ddW: Callable
    Wstar: Callable
    dWstar: Callable
    ddWstar: Callable
    kappa: float = float("nan")
    gamma: float = float("nan")
    M: float = float("nan")
    kink: Optional[float] = None
    params: dict = field(default_factory=dict, compare=False)

    def stress(self, lam):
        """Trivial-branch (homogeneous) stress ``dW(lam)``."""
        return self.dW(lam)

    def __repr__(self):
        return (f"ConstitutiveModel(name={self.name!r}, kappa={self.kappa:.12g}, "
                f"gamma={self.gamma:.12g}, M={self.M:.12g})")


# ----------------------------------------------------------------------------
# built-in models
# ----------------------------------------------------------------------------

def _rational_parts():
    def W(F):
        F = np.asarray(F, dtype=float)
        return (1.0 - 1.0 / F) ** 2

    def dW(F):
        F = np.asarray(F, dtype=float)
        return 2.0 * (1.0 - 1.0 / F) / F**2

    def ddW(F):
        F = np.asarray(F, dtype=float)
        return 2.0 * (3.0 / F**4 - 2.0 / F**3)

    def Wstar(H):
        H = np.asarray(H, dtype=float)
        return H * (1.0 - H) ** 2

    def dWstar(H):
        H = np.asarray(H, dtype=float)
        return 1.0 - 4.0 * H + 3.0 * H**2

    def ddWstar(H):
        H = np.asarray(H, dtype=float)
        return 6.0 * H - 4.0

    return dict(W=W, dW=dW, ddW=ddW, Wstar=Wstar, dWstar=dWstar, ddWstar=ddWstar)


def _quadratic_parts():
    kappa = 1.0 / np.sqrt(2.0)
    d = np.sqrt(2.0) - 1.0

    def Wstar(H):
        H = np.asarray(H, dtype=float)
        return np.where(H <= kappa, d**2 - (H - d) ** 2, (H - 1.0) ** 2)

    def dWstar(H):
        H = np.asarray(H, dtype=float)
        return np.where(H <= kappa, -2.0 * (H - d), 2.0 * (H - 1.0))

    def ddWstar(H):
        # left limit at exactly kappa
        H = np.asarray(H, dtype=float)
        return np.where(H <= kappa, -2.0, 2.0)

    def W(F):
        F = np.asarray(F, dtype=float)
        return F * Wstar(1.0 / F)

    def dW(F):
        F = np.asarray(F, dtype=float)
        H = 1.0 / F
        return Wstar(H) - H * dWstar(H)

    def ddW(F):
        F = np.asarray(F, dtype=float)
        H = 1.0 / F
        return H**3 * ddWstar(H)

    return dict(W=W, dW=dW, ddW=ddW, Wstar=Wstar, dWstar=dWstar, ddWstar=ddWstar), kappa, d


def _derived_inverse(W, dW, ddW):
    """Shield inverse and its derivatives from ``W`` and its derivatives."""

    def _H(H):
        H = np.asarray(H, dtype=float)
        return H, np.maximum(H, SMALL_H)

    def Wstar(H):
        H, Hs = _H(H)
        if np.any(H < 0):
            raise DomainError("negative inverse stretch (interpenetration)")
        slope = dWstar(SMALL_H)
        return np.where(H < SMALL_H, slope * H, Hs * W(1.0 / Hs))

    def dWstar(H):
        _, Hs = _H(H)
        F = 1.0 / Hs
        return W(F) - F * dW(F)

    def ddWstar(H):
        _, Hs = _H(H)
        F = 1.0 / Hs
        return F**3 * ddW(F)

    return Wstar, dWstar, ddWstar


# ----------------------------------------------------------------------------
# structural constants
# ----------------------------------------------------------------------------

def _scalar(f, x):
    return float(np.asarray(f(x), dtype=float))


def find_kappa(ddWstar):
    """Inflection point of ``W*``: sign change of ``ddWstar`` on ``(0, 1)``."""
    lo = 1e-9
    if _scalar(ddWstar, lo) >= 0:
        raise HypothesisViolationError("W* is not concave near H = 0")
    hi = 1.0 / 64.0
    while _scalar(ddWstar, hi) < 0:
        lo = hi
        hi *= 2.0
        if hi > BRACKET_CAP:
            raise HypothesisViolationError("no inflection point of W* bracketed in (0, 64]")
    kappa = brentq(lambda h: _scalar(ddWstar, h), lo, hi, xtol=ROOT_XTOL, maxiter=500)
    if not 0.0 < kappa < 1.0:
        raise HypothesisViolationError(f"inflection point {kappa:g} not in (0, 1)")
    return kappa


def find_M(dWstar, gamma):
    """Root ``M > 1`` of ``dWstar(M) = gamma``."""
    f = lambda h: _scalar(dWstar, h) - gamma
    lo, hi = 1.0, 2.0
    if f(lo) >= 0:
        raise HypothesisViolationError("dW*(1) >= gamma; M is undefined")
    while f(hi) < 0:
        lo = hi
        hi *= 2.0
        if hi > BRACKET_CAP:
            raise HypothesisViolationError("no root of dW*(H) = gamma bracketed in (1, 64]")
    return brentq(f, lo, hi, xtol=ROOT_XTOL, maxiter=500)


def _check_derivative(f, df, xs, label, rtol=1e-6):
    xs = np.asarray(xs, dtype=float)
    h = 1e-5 * np.maximum(np.abs(xs), 1e-3)
    fd = (np.asarray(f(xs + h)) - np.asarray(f(xs - h))) / (2 * h)
    an = np.asarray(df(xs), dtype=float)
    err = np.abs(fd - an) / np.maximum(1.0, np.abs(an))
    worst = int(np.argmax(err))
    if err[worst] > rtol:
        raise ModelDefinitionError(
            f"{label} disagrees with finite differences at {xs[worst]:.6g}: "
            f"analytic {an[worst]:.10g}, finite difference {fd[worst]:.10g}")


BUILTIN_MODELS = ("rational", "quadratic")


def build_model(spec="rational", strict=True):
    """Build a :class:`ConstitutiveModel`.

    Parameters
    ----------
    spec : str or dict or ConstitutiveModel
        ``"rational"``, ``"quadratic"``, or a mapping with ``name`` and, for
        custom models, ``W``, ``dW``, ``ddW`` given as expression strings in
        ``F`` or as callables.
    strict : bool
        If False, constants that cannot be bracketed are left as NaN instead
        of raising, so that :func:`validate_hypotheses` can report on a
        model that violates the structural assumptions.
    """
    if isinstance(spec, ConstitutiveModel):
        return spec
    if isinstance(spec, str):
        spec = {"name": spec}
    spec = dict(spec)
    name = str(spec.get("name", "custom")).lower()
    kink = None
    if name == "rational":
        parts = _rational_parts()
    elif name == "quadratic":
        parts, kink, _ = _quadratic_parts()
    else:
        try:
            funcs = [spec[k] for k in ("W", "dW", "ddW")]
        except KeyError as exc:
            raise ModelDefinitionError(f"custom model needs W, dW and ddW (missing {exc})") from None
        funcs = [parse_expression(f) if isinstance(f, str) else f for f in funcs]
        W, dW, ddW = funcs
        Wstar, dWstar, ddWstar = _derived_inverse(W, dW, ddW)
        parts = dict(W=W, dW=dW, ddW=ddW, Wstar=Wstar, dWstar=dWstar, ddWstar=ddWstar)

    samples_F = np.array([0.3, 0.55, 0.8, 1.1, 1.7, 2.5, 4.0, 9.0])
    if kink is not None:
        samples_F = samples_F[np.abs(1.0 / samples_F - kink) > 1e-3]
    _check_derivative(parts["W"], parts["dW"], samples_F, "dW")
    _check_derivative(parts["dW"], parts["ddW"], samples_F, "ddW")
    samples_H = 1.0 / samples_F
    _check_derivative(parts["Wstar"], parts["dWstar"], samples_H, "dW*")
    _check_derivative(parts["dWstar"], parts["ddWstar"], samples_H, "ddW*")

    if kink is None and name not in BUILTIN_MODELS:
        # linear extrapolation to H = 0 removes the O(H) bias of dW*(H)
        h = 1e-8
        gamma = _scalar(parts["dWstar"], h) - h * _scalar(parts["ddWstar"], h)
    else:
        gamma = _scalar(parts["dWstar"], 0.0)
    constants = {}
    for key, finder in (("kappa", lambda: find_kappa(parts["ddWstar"])),
                        ("M", lambda: find_M(parts["dWstar"], gamma))):
        try:
            constants[key] = finder()
        except HypothesisViolationError:
            if strict:
                raise
            constants[key] = float("nan")
    kappa, M = constants["kappa"], constants["M"]
    if kink is not None and abs(kappa - kink) < 1e-9:
        # bisection on a jump only localises it to the root tolerance
        kappa = kink
    params = {k: v for k, v in spec.items() if k != "name" and isinstance(v, (str, int, float))}
    return ConstitutiveModel(name=name, kappa=kappa, gamma=gamma, M=M, kink=kink,
                             params=params, **parts)


# ----------------------------------------------------------------------------
# hypothesis validation
# ----------------------------------------------------------------------------

@dataclass
class ValidationReport:
    """Outcome of :func:`validate_hypotheses`.

    ``checks`` holds one ``(name, passed, worst_sample)`` tuple per
    structural hypothesis; ``worst_sample`` is ``(x, value)`` at the worst
    violation, or ``None``.
    """

    model: str
    checks: list
    smoothness_note: str = ""

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks)

    def failures(self):
        return [name for name, ok, _ in self.checks if not ok]

    def as_dict(self):
        return {
            "model": self.model,
            "passed": self.passed,
            "checks": [{"hypothesis": n, "passed": ok,
                        "worst_sample": None if w is None else list(w)} for n, ok, w in self.checks],
            "smoothness_note": self.smoothness_note,
        }


def _worst(mask, xs, values):
    """Worst violating sample among ``mask``, judged by ``values``."""
    if not np.any(mask):
        return None
    idx = np.flatnonzero(mask)
    i = idx[np.argmax(np.abs(values[idx]))]
    return (float(xs[i]), float(values[i]))


def validate_hypotheses(model, grid=400):
    """Check the structural hypotheses on ``W`` and ``W*`` on log-spaced samples.

    Failures are reported, never raised.
    """
    model = build_model(model) if not isinstance(model, ConstitutiveModel) else model
    F = np.geomspace(1e-3, 1e4, grid)
    F = F[np.abs(F - 1.0) > 1e-9]
    H = np.concatenate([np.geomspace(1e-6, 0.999, grid // 2), np.linspace(1.001, 8.0, grid // 2)])
    kappa, gamma = model.kappa, model.gamma
    have_kappa = np.isfinite(kappa) and 0 < kappa < 1
    checks = []

    with np.errstate(all="ignore"):
        WF = np.asarray(model.W(F), dtype=float)
        ddWF = np.asarray(model.ddW(F), dtype=float)
        WsH = np.asarray(model.Wstar(H), dtype=float)
        ddWsH = np.asarray(model.ddWstar(H), dtype=float)

        # W -> inf as F -> 0, monotonically on (0, 1)
        left = F < 1.0
        dec = np.diff(WF[left])
        bad = np.append(dec >= 0, False)
        ok = not np.any(bad) and float(model.W(1e-6)) > 1e3
        checks.append(("W(F) -> inf as F -> 0", ok,
                       _worst(bad, F[left], WF[left]) if np.any(bad) else
                       (None if ok else (1e-6, float(model.W(1e-6))))))

        # W increases to gamma > 0 as F -> inf
        right = F > 1.0
        inc = np.diff(WF[right])
        bad = np.append(inc <= 0, False) | (WF[right] >= gamma)
        far = float(model.W(1e8))
        ok = (np.isfinite(gamma) and gamma > 0 and not np.any(bad)
              and abs(far - gamma) < 1e-3 * max(1.0, abs(gamma)))
        worst = _worst(bad, F[right], WF[right] - gamma) if np.any(bad) else None
        if not ok and worst is None:
            worst = (1e8, far)
        checks.append(("W(F) increases to gamma > 0 as F -> inf", ok, worst))

        w1 = float(model.W(1.0))
        checks.append(("W(1) = 0", abs(w1) < 1e-12, None if abs(w1) < 1e-12 else (1.0, w1)))

        bad = WF <= 0
        checks.append(("W(F) > 0 for F != 1", not np.any(bad), _worst(bad, F, WF)))

        checks.append(("0 < kappa < 1", bool(have_kappa), None if have_kappa else (float("nan"), kappa)))

        if have_kappa:
            away = np.abs(F - 1.0 / kappa) > 1e-6 * (1.0 / kappa)
            conv = away & (F < 1.0 / kappa)
            conc = away & (F > 1.0 / kappa)
            bad_cv = conv & (ddWF <= 0)
            bad_cc = conc & (ddWF >= 0)
            awayH = np.abs(H - kappa) > 1e-6
            bad_scc = awayH & (H < kappa) & (ddWsH >= 0)
            bad_scv = awayH & (H > kappa) & (ddWsH <= 0)
        else:
            bad_cv = bad_cc = np.ones_like(F, dtype=bool)
            bad_scc = bad_scv = np.ones_like(H, dtype=bool)
        checks.append(("W strictly convex on (0, 1/kappa)", not np.any(bad_cv), _worst(bad_cv, F, ddWF)))
        checks.append(("W strictly concave on (1/kappa, inf)", not np.any(bad_cc), _worst(bad_cc, F, ddWF)))

        w0, w1s = float(model.Wstar(0.0)), float(model.Wstar(1.0))
        ok = abs(w0) < 1e-12 and abs(w1s) < 1e-12
        checks.append(("W*(0) = W*(1) = 0", ok, None if ok else ((0.0, w0) if abs(w0) >= 1e-12 else (1.0, w1s))))

        bad = WsH <= 0
        checks.append(("W*(H) > 0 for H not in {0, 1}", not np.any(bad), _worst(bad, H, WsH)))

        h0 = 1e-7
        one_sided = (float(model.Wstar(h0)) - float(model.Wstar(0.0))) / h0
        ok = np.isfinite(gamma) and gamma > 0 and abs(one_sided - gamma) < 1e-5 * max(1.0, abs(gamma))
        checks.append(("dW*(0+) = gamma > 0", bool(ok), None if ok else (0.0, one_sided)))

        checks.append(("W* strictly concave on [0, kappa)", not np.any(bad_scc), _worst(bad_scc, H, ddWsH)))
        checks.append(("W* strictly convex on (kappa, inf)", not np.any(bad_scv), _worst(bad_scv, H, ddWsH)))

        # smoothness: W* must be C^1 everywhere; a jump in W*'' is only noted
        Hs = np.linspace(1e-3, 3.0, 6001)
        d1 = np.asarray(model.dWstar(Hs), dtype=float)
        d2 = np.asarray(model.ddWstar(Hs), dtype=float)
        step = Hs[1] - Hs[0]
        jump1 = np.abs(np.diff(d1)) > 50 * step * max(1.0, np.max(np.abs(d2)))
        jump2 = np.abs(np.diff(d2)) > 0.05 * max(1.0, np.max(np.abs(d2)))
        note = ""
        if np.any(jump2):
            where = Hs[:-1][jump2] + 0.5 * step
            note = ("W* is C^1 but only piecewise C^2: W*'' jumps near H = "
                    + ", ".join(f"{x:.6g}" for x in where[:4]))
        checks.append(("W in C^3(0, inf) (W* at least C^1; piecewise C^2 tolerated)",
                       not np.any(jump1), _worst(np.append(jump1, False), Hs, d1)))

    return ValidationReport(model=model.name, checks=checks, smoothness_note=note)
