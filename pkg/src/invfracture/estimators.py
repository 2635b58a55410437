"""scikit-learn style wrappers around the functional solvers.

The solvers are deterministic functions of ``(model, eps, ...)``, so
"fitting" means running the expensive computation once and caching it;
``predict`` / ``transform`` then map stretches to stresses or fields.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import branch as br
from . import discrete as dc
from ._validation import check_int, check_positive, check_stretches
from .constitutive import build_model
from .linearization import bifurcation_points


class BranchSolver(BaseEstimator):
    """Bifurcation points, first (or mode-``n``) branch and fracture point.

    Parameters
    ----------
    model : str or dict
        Constitutive model spec accepted by :func:`build_model`.
    eps : float
        Gradient coefficient.
    mode : int
        Branch mode ``n``.
    n_points : int
        Number of ``H1`` levels in the branch sweep.
    n_bifurcations : int
        How many bifurcation points to report.

    Attributes
    ----------
    bifurcation_points_ : list of BifurcationPoint
    branch_ : BranchSweep
    fracture_ : BranchPoint
    """

    def __init__(self, model="rational", eps=0.01, mode=1, n_points=41, n_bifurcations=1):
        self.model = model
        self.eps = eps
        self.mode = mode
        self.n_points = n_points
        self.n_bifurcations = n_bifurcations

    def fit(self, X=None, y=None):
        eps = check_positive(self.eps, "eps")
        mode = check_int(self.mode, "mode")
        n_points = check_int(self.n_points, "n_points", 2)
        model = build_model(self.model)
        self.model_ = model
        self.bifurcation_points_ = bifurcation_points(
            model, eps, max(mode, check_int(self.n_bifurcations, "n_bifurcations")))
        self.branch_ = br.sweep_branch(model, eps, mode, n_points)
        self.fracture_ = self.branch_.fracture or br.fracture_point(model, eps, mode)
        return self

    @property
    def lambda_star_(self):
        check_is_fitted(self, "fracture_")
        return self.fracture_.lam

    def predict(self, X, drop_at="fracture"):
        """Stress along the trivial branch until the drop, zero after.

        ``drop_at="fracture"`` follows the trivial branch up to ``lam*``;
        ``"bifurcation"`` drops at ``lambda_1`` instead.
        """
        check_is_fitted(self, "fracture_")
        lam = check_stretches(X)
        if drop_at == "fracture":
            cut = self.fracture_.lam
        elif drop_at == "bifurcation":
            cut = self.bifurcation_points_[0].lambda_n
        else:
            raise ValueError("drop_at must be 'fracture' or 'bifurcation'")
        sigma = np.asarray(br.trivial_branch(self.model_, lam), dtype=float).reshape(lam.shape)
        return np.where(lam < cut, sigma, 0.0)


class ProfileTransformer(TransformerMixin, BaseEstimator):
    """Map stretches to nodal displacement fields ``u(s)``.

    Below ``lam*`` the homogeneous field ``u = 0`` is returned; at or
    above it, the broken profile with crack opening ``lam - lam*``.
    """

    def __init__(self, model="rational", eps=0.01, nodes=201, n_samples=8001):
        self.model = model
        self.eps = eps
        self.nodes = nodes
        self.n_samples = n_samples

    def fit(self, X=None, y=None):
        check_positive(self.eps, "eps")
        check_int(self.nodes, "nodes", 2)
        self.model_ = build_model(self.model)
        self.fracture_ = br.fracture_point(self.model_, self.eps)
        return self

    def transform(self, X):
        check_is_fitted(self, "fracture_")
        lam = check_stretches(X)
        out = np.zeros((lam.size, int(self.nodes)))
        for row, value in enumerate(lam):
            if value >= self.fracture_.lam:
                prof = br.broken_profile(self.model_, self.eps, value, n_samples=self.n_samples,
                                         fracture=self.fracture_)
                out[row] = prof.resample(self.nodes)
        return out


class DirectMinimizer(BaseEstimator):
    """Multi-start projected-gradient minimisation at a list of stretches.

    ``fit(X)`` stores the lowest-energy field per stretch in ``fields_``
    (shape ``(n_stretches, nodes)``), the energies in ``energies_`` and
    the broken fractions in ``broken_fractions_``.
    """

    def __init__(self, model="rational", eps=0.01, nodes=2001,
                 seeds=("ramp", "-ramp", "cos", "-cos"), max_iter=50000, tol=1e-8):
        self.model = model
        self.eps = eps
        self.nodes = nodes
        self.seeds = seeds
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y=None):
        eps = check_positive(self.eps, "eps")
        nodes = check_int(self.nodes, "nodes", 3)
        check_positive(self.tol, "tol")
        lam = check_stretches(X)
        self.model_ = build_model(self.model)
        results = []
        for value in lam:
            best = dc.minimize_multistart(self.model_, eps, value, N=nodes, seeds=tuple(self.seeds),
                                          max_iter=self.max_iter, tol=self.tol)[0]
            results.append(best)
        self.results_ = results
        self.stretches_ = lam
        self.fields_ = np.vstack([r.field.values for r in results])
        self.energies_ = np.array([r.energy for r in results])
        self.broken_fractions_ = np.array([r.broken_fraction for r in results])
        return self
