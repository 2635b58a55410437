import numpy as np
import pytest
from scipy.integrate import trapezoid
from hypothesis import given
from hypothesis import strategies as st

from invfracture import (DomainError, bifurcation_points, characteristic_residual, eigenfunction,
                         first_bifurcation, trivial_stability)


@pytest.mark.parametrize("eps", [16 / np.pi**2, 2.0, 8.0])
def test_quadratic_bifurcations_exact(quadratic, eps):
    pts = bifurcation_points(quadratic, eps, 5)
    for p in pts:
        assert p.lambda_n == pytest.approx(p.n * np.pi * np.sqrt(eps / 2), rel=1e-12)


@pytest.mark.parametrize("eps", [0.01, 0.1, 2.0])
def test_rational_roots_solve_characteristic_equation(rational, eps):
    for p in bifurcation_points(rational, eps, 4):
        assert abs(characteristic_residual(rational, eps, p.n, p.lambda_n)) < 1e-9
        assert p.sigma_n == pytest.approx(float(rational.dW(p.lambda_n)), rel=1e-14)
        assert p.lambda_n > 1.0


@pytest.mark.parametrize("eps", [0.01, 2.0, 7.5])
def test_rational_bifurcation_closed_form(rational, eps):
    # W*''(H) = 6H - 4 turns eps n^2 pi^2 / lam^2 = 4 - 6/lam into 4 lam^2 - 6 lam - eps n^2 pi^2 = 0
    for p in bifurcation_points(rational, eps, 3):
        exact = (6 + np.sqrt(36 + 16 * eps * (p.n * np.pi) ** 2)) / 8
        assert p.lambda_n == pytest.approx(exact, rel=1e-13)
    assert first_bifurcation(rational, 0.01) == pytest.approx(1.515, abs=0.01)


@given(st.floats(1e-3, 10.0))
def test_bifurcations_increase_with_mode(rational, eps):
    lam = [p.lambda_n for p in bifurcation_points(rational, eps, 3)]
    assert np.all(np.diff(lam) > 0)


@given(st.floats(1e-3, 5.0), st.floats(1.01, 2.0))
def test_first_bifurcation_increases_with_eps(rational, eps, factor):
    assert first_bifurcation(rational, eps * factor) > first_bifurcation(rational, eps)


def test_beyond_inflection_for_rational(rational):
    # bifurcation only happens where W* is concave at 1/lambda
    lam = first_bifurcation(rational, 0.05)
    assert 1.0 / lam < rational.kappa


def test_eigenfunction_mean_zero_and_neumann():
    s = np.linspace(0.0, 1.0, 2001)
    for n in range(1, 5):
        phi = eigenfunction(n, s)
        assert abs(trapezoid(phi, s)) < 1e-12
        assert phi[0] == pytest.approx(1.0)


def test_trivial_stability_classes(rational):
    lam1 = first_bifurcation(rational, 0.01)
    assert trivial_stability(rational, 0.01, 0.9 * lam1) == "stable"
    assert trivial_stability(rational, 0.01, 1.1 * lam1) == "unstable"
    assert trivial_stability(rational, 0.01, lam1) == "marginal"
    with pytest.raises(DomainError):
        trivial_stability(rational, 0.01, -1.0)
