import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from invfracture import (GridField, branch_point, profile_from_quadrature, NumericalFailureError, SolverError, broken_profile, el_residual, energy,
                         first_bifurcation, gradient, higher_mode_instability_direction, minimize,
                         minimize_sequenced, project, second_variation_spectrum, stress_estimate,
                         surface_energy, trivial_branch, vi_residual)
from invfracture.discrete import seed_field, trapezoid_weights

fields = arrays(np.float64, st.integers(5, 60), elements=st.floats(-3.0, 3.0))


def test_energy_of_homogeneous_field(rational):
    # u = 0 gives V = lam^3 * lam W*(1/lam) = lam^3 W(lam)
    for lam in (0.8, 1.3, 2.0):
        expected = lam**3 * float(rational.W(lam))
        assert energy(rational, 0.01, lam, np.zeros(31)) == pytest.approx(expected, rel=1e-14)
    assert energy(rational, 0.01, 2.0, np.zeros(11)) == pytest.approx(2.0)


def test_gradient_matches_finite_differences(rational, rng):
    u = project(0.3 * rng.standard_normal(41)).values
    g = gradient(rational, 0.05, 1.4, u)
    step = 1e-6
    fd = np.empty_like(u)
    for i in range(u.size):
        e = np.zeros_like(u)
        e[i] = step
        fd[i] = (energy(rational, 0.05, 1.4, u + e) - energy(rational, 0.05, 1.4, u - e)) / (2 * step)
    np.testing.assert_allclose(g, fd, rtol=1e-6, atol=1e-8)


def test_project_reference():
    np.testing.assert_array_equal(project(np.full(9, -2.0)).values, np.zeros(9))


@given(fields)
def test_project_lands_in_constraint_set(u):
    v = project(u).values
    w = trapezoid_weights(u.size)
    assert np.all(v >= -1.0)
    assert abs(w @ v) <= 1e-12 * max(1.0, np.max(np.abs(u)))


@given(fields)
def test_project_idempotent(u):
    v = project(u).values
    np.testing.assert_allclose(project(v).values, v, atol=1e-12)


@given(fields)
def test_project_is_closest_point(u):
    # variational inequality of a convex projection: <u - Pu, y - Pu>_w <= 0 for feasible y
    w = trapezoid_weights(u.size)
    v = project(u).values
    for y in (np.zeros_like(u), project(u[::-1]).values, project(np.cos(np.arange(u.size))).values):
        assert (w * (u - v)) @ (y - v) <= 1e-10 * max(1.0, np.max(np.abs(u))) ** 2


def test_grid_field_properties():
    f = GridField(np.array([-1.0, -1.0, 0.0, 0.5, 2.0]))
    assert f.N == 5 and f.h == 0.25
    assert f.broken().tolist() == [True, True, False, False, False]
    assert f.is_admissible()
    np.testing.assert_allclose(f.H(2.0), [0.0, 0.0, 0.5, 0.75, 1.5])
    assert not GridField(np.array([-1.0, 0.0, 0.5])).is_admissible()


def test_seeds_are_admissible():
    for kind in ("ramp", "-ramp", "cos", "-cos", "random:7"):
        assert seed_field(kind, 101).is_admissible()
    np.testing.assert_array_equal(seed_field("random:7", 50).values, seed_field("random:7", 50).values)
    with pytest.raises(ValueError):
        seed_field("zigzag", 10)


def test_minimize_below_bifurcation_returns_homogeneous(rational):
    res = minimize_sequenced(rational, 0.01, 1.2, "random:1", N=501)
    assert res.converged
    assert np.max(np.abs(res.field.values)) < 1e-4
    assert np.all(np.diff(res.energies) <= 1e-12 * abs(res.energies[0]))


def test_minimize_beyond_fracture_breaks(rational):
    eps, lam = 0.01, 2.0
    res = minimize_sequenced(rational, eps, lam, "ramp", N=1001)
    assert res.field.values.min() == -1.0
    assert res.energy <= energy(rational, eps, lam, np.zeros(1001))
    leading = surface_energy(rational, eps)[0]
    assert res.energy / lam**3 == pytest.approx(leading, rel=0.2)
    assert stress_estimate(rational, eps, lam, res.field.values) == pytest.approx(0.0, abs=1e-3)
    assert vi_residual(rational, eps, lam, res.field.values).ok


def test_minimize_energy_trace_monotone(rational):
    res = minimize(rational, 0.05, 1.6, seed_field("cos", 101), max_iter=300)
    assert np.all(np.diff(res.energies) <= 0.0)


def test_minimize_rejects_bad_arguments(rational):
    with pytest.raises(ValueError):
        minimize(rational, 0.01, -1.0, np.zeros(11))


def test_numerical_failure_is_a_solver_error():
    assert issubclass(NumericalFailureError, SolverError)


def test_el_residual_zero_for_homogeneous(rational):
    el = el_residual(rational, 0.01, 1.3, np.zeros(101))
    assert el.max_norm <= 1e-14
    assert el.multiplier == pytest.approx(1.3**3 * float(rational.dWstar(1 / 1.3)))


def test_el_residual_nonzero_for_random_field(rational, rng):
    u = project(0.2 * rng.standard_normal(101)).values
    assert el_residual(rational, 0.01, 1.3, u).max_norm > 1e-3


def test_el_residual_small_on_broken_profile(rational):
    eps, lam = 0.01, 1.5
    prof = broken_profile(rational, eps, lam, n_samples=2001)
    res = [el_residual(rational, eps, lam, prof.resample(n)).max_norm for n in (1001, 2001)]
    assert res[1] < res[0] / 3


def test_vi_residual_detects_wrong_sign_multiplier(rational):
    # u = +1 / -1 halves at lam = 1: glued H = 2 with dW*(2) = 5 > gamma
    u = np.where(np.arange(101) < 50, 1.0, -1.0)
    u[50] = 0.0
    rep = vi_residual(rational, 1e-6, 1.0, u, el_tol=np.inf)
    assert rep.varpi == pytest.approx(5.0, rel=1e-2)
    assert rep.margin < 0
    assert not rep.ok


def test_stress_estimate_on_trivial_branch(rational):
    for lam in (1.1, 1.4):
        assert stress_estimate(rational, 0.01, lam, np.zeros(51)) == pytest.approx(
            trivial_branch(rational, lam), rel=1e-12)


@pytest.mark.parametrize("N", [101, 401])
def test_trivial_spectrum_sign_change(rational, N):
    eps = 0.05
    lam1 = first_bifurcation(rational, eps)
    lo = second_variation_spectrum(rational, eps, 0.97 * lam1, np.zeros(N))
    hi = second_variation_spectrum(rational, eps, 1.03 * lam1, np.zeros(N))
    assert lo.classification == "stable"
    assert hi.classification == "unstable"
    assert hi.smallest_eigenvalues[0] < 0 < lo.smallest_eigenvalues[0]
    assert np.all(np.diff(lo.smallest_eigenvalues) >= 0)


def test_quadratic_spectrum_at_bifurcation(quadratic):
    eps = 2.0
    lam1 = first_bifurcation(quadratic, eps)
    rep = second_variation_spectrum(quadratic, eps, lam1, np.zeros(401))
    assert rep.classification == "marginal"
    # next mode: eps (2 pi)^2 - eps pi^2 = 3 eps pi^2 above the neutral one
    assert rep.smallest_eigenvalues[1] == pytest.approx(3 * eps * np.pi**2, rel=1e-3)


def test_witness_direction_is_admissible(rational):
    rep = second_variation_spectrum(rational, 0.05, 2.0, np.zeros(301))
    w = trapezoid_weights(301)
    assert abs(w @ rep.witness_direction) < 1e-10
    assert rep.as_dict()["classification"] == "unstable"


def test_higher_mode_direction_negative(rational):
    eps = 0.01
    bp = branch_point(rational, eps, 0.5 / 1.6, mode=2)
    prof = profile_from_quadrature(rational, eps, bp, 4001)
    u = prof.resample(2001)
    res = higher_mode_instability_direction(rational, eps, bp.lam, u, tau=1e-3, mode=2)
    assert not res.inconclusive
    assert res.value < 0
