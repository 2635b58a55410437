import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from invfracture import (BranchSolver, ConfigError, DirectMinimizer, ProfileTransformer,
                         first_bifurcation, fracture_point)


def test_branch_solver_fit_predict():
    est = BranchSolver(eps=2.0, n_points=9).fit()
    assert est.lambda_star_ == pytest.approx(fracture_point("rational", 2.0).lam)
    assert est.bifurcation_points_[0].lambda_n == pytest.approx(first_bifurcation("rational", 2.0))
    lam = np.array([1.5, 2.5, est.lambda_star_ + 0.01, 4.0])
    sigma = est.predict(lam)
    assert sigma[0] > 0 and sigma[1] > 0
    assert sigma[2] == 0.0 and sigma[3] == 0.0
    later = est.predict(lam, drop_at="bifurcation")
    assert later[2] > 0
    with pytest.raises(ValueError):
        est.predict(lam, drop_at="never")


def test_branch_solver_params_and_clone():
    est = BranchSolver(model="quadratic", eps=8.0, mode=2)
    assert est.get_params()["mode"] == 2
    twin = clone(est).set_params(mode=1)
    assert twin.mode == 1 and est.mode == 2


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        BranchSolver().predict([1.0])


def test_invalid_params_raise_config_error():
    with pytest.raises(ConfigError):
        BranchSolver(eps=-1.0).fit()
    with pytest.raises(ConfigError):
        BranchSolver(mode=0).fit()


def test_profile_transformer():
    tr = ProfileTransformer(eps=0.01, nodes=101, n_samples=2001).fit()
    X = np.array([1.05, 1.5, 2.0])
    U = tr.transform(X)
    assert U.shape == (3, 101)
    np.testing.assert_array_equal(U[0], 0.0)
    assert U[1].min() == -1.0 and U[2].min() == -1.0
    assert np.mean(U[2] == -1.0) > np.mean(U[1] == -1.0)


def test_direct_minimizer_small_grid():
    est = DirectMinimizer(eps=0.01, nodes=257, seeds=("ramp",)).fit([1.05, 2.0])
    assert est.fields_.shape == (2, 257)
    assert est.broken_fractions_[0] == 0.0
    assert est.broken_fractions_[1] > 0.3
    assert est.energies_[1] < 8.0 * float(est.model_.W(2.0))
