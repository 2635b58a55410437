import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invfracture import (DegenerateChordError, DomainError, NoCriticalPointsError, branch_point, broken_profile, chord,
                         first_bifurcation, fracture_point, lambda_sigma, phase_critical_points,
                         profile_from_quadrature, solve_H2, surface_energy, sweep_branch,
                         tilted_potential, trivial_branch)
from invfracture.acceptance import first_integral_spread

# H1 = 0 roots of the mass condition, solved by bisection on mpmath integrals (40 digits)
FRACTURE_REF = {
    2.0: (0.60950280465567342, 3.0615560274119433),
    0.1: (0.98763328538456722, 1.4472561073891804),
    0.01: (0.99999921900265145, 1.1414213562374674),
}


def test_chord_reference_values(rational):
    c = chord(rational, 0.0, 0.5)
    assert c.varpi == pytest.approx(0.25, abs=1e-15)
    assert c.Gamma == pytest.approx(0.0, abs=1e-15)
    assert c.admissible
    assert tilted_potential(rational, 0.25, c) == pytest.approx(0.078125, abs=1e-15)


@given(st.floats(0.0, 0.6), st.floats(0.05, 0.95))
def test_tilted_potential_vanishes_at_ends(rational, H1, frac):
    H2 = H1 + frac * (1.0 - H1)
    c = chord(rational, H1, H2)
    assert tilted_potential(rational, H1, c) == pytest.approx(0.0, abs=1e-14)
    assert tilted_potential(rational, H2, c) == pytest.approx(0.0, abs=1e-14)


def test_chord_domain(rational):
    with pytest.raises(DomainError):
        chord(rational, -0.1, 0.5)
    with pytest.raises(ValueError):
        chord(rational, 0.5, 0.5)


@pytest.mark.parametrize("eps", sorted(FRACTURE_REF))
def test_fracture_point_matches_reference(rational, eps):
    H2, lam = FRACTURE_REF[eps]
    fp = fracture_point(rational, eps)
    assert fp.H2 == pytest.approx(H2, rel=1e-11)
    assert fp.lam == pytest.approx(lam, rel=1e-10)
    assert fp.sigma == 0.0
    assert not fp.asymptotic


@pytest.mark.parametrize("eps", [0.01, 0.003, 0.001, 1e-4])
def test_small_eps_fracture_stretch(rational, eps):
    # as H2 -> 1, g0 - g1 -> int_0^1 dz / sqrt(z) = 2, so lam* -> 1 + sqrt(2 eps)
    fp = fracture_point(rational, eps)
    assert fp.lam == pytest.approx(1.0 + np.sqrt(2.0 * eps), rel=1e-9)


def test_asymptotic_regime_flagged(rational):
    fp = fracture_point(rational, 0.001)
    assert fp.asymptotic
    assert fp.lam == pytest.approx(1.0447213595, abs=1e-9)
    with pytest.raises(DegenerateChordError):
        profile_from_quadrature(rational, 0.001, fp)


@pytest.mark.parametrize("eps", [16 / np.pi**2, 2.0, 8.0])
def test_quadratic_fracture_closed_form(quadratic, eps):
    fp = fracture_point(quadratic, eps)
    H2 = 2 * np.sqrt(2) / (np.pi * np.sqrt(eps))
    assert fp.H2 == pytest.approx(min(H2, quadratic.kappa), rel=1e-8)
    assert fp.lam == pytest.approx(first_bifurcation(quadratic, eps), rel=1e-8)


def test_quadratic_branch_is_vertical(quadratic):
    sweep = sweep_branch(quadratic, 2.0, 1, 15)
    lam1 = first_bifurcation(quadratic, 2.0)
    assert np.max(np.abs(sweep.lam - lam1)) <= 1e-8


@pytest.mark.parametrize("eps", [0.01, 2.0])
def test_sweep_runs_from_bifurcation_to_fracture(rational, eps):
    sweep = sweep_branch(rational, eps, 1, 11)
    assert not sweep.failures
    lam1 = first_bifurcation(rational, eps)
    assert sweep.lam[0] == pytest.approx(lam1, rel=1e-3)
    assert sweep.points[-1].H1 == 0.0
    assert sweep.fracture.sigma == 0.0
    np.testing.assert_allclose(sweep.sigma, [-p.chord.Gamma for p in sweep.points], atol=1e-15)
    assert np.all(np.diff(sweep.sigma) < 0)


@given(st.floats(0.02, 0.98))
def test_branch_point_mass_condition(rational, frac):
    eps = 0.05
    lam1 = first_bifurcation(rational, eps)
    bp = branch_point(rational, eps, frac / lam1)
    assert np.sqrt(eps / 2) * bp.g1 == pytest.approx(1.0, abs=1e-10)
    # lam = sqrt(eps/2) g0 up to the mass residual 1 - sqrt(eps/2) g1
    residual = 1.0 - np.sqrt(eps / 2) * bp.g1
    assert bp.lam - np.sqrt(eps / 2) * bp.g0 == pytest.approx(residual, abs=1e-14)
    assert bp.sigma == pytest.approx(-bp.chord.Gamma, abs=1e-15)
    assert bp.H1 < 1.0 / bp.lam < bp.H2


def test_branch_point_outside_window(rational):
    with pytest.raises(DomainError):
        branch_point(rational, 0.01, 0.9)


def test_solve_H2_mode_two(rational):
    h1 = solve_H2(rational, 0.01, 0.0, mode=1)
    h2 = solve_H2(rational, 0.01, 0.0, mode=2)
    assert 0.0 < h2 < h1 < 1.0


def test_surface_energy_closed_form(rational):
    for eps in (0.01, 0.5, 2.0):
        inverse, forward = surface_energy(rational, eps)
        exact = np.sqrt(eps) * 4 * np.sqrt(2) / 15
        assert inverse == pytest.approx(exact, rel=1e-12)
        assert forward == pytest.approx(inverse, rel=1e-10)


def test_phase_critical_points(rational):
    assert phase_critical_points(rational, rational.gamma) == pytest.approx((0.0, 4 / 3), abs=1e-12)
    alpha, beta = phase_critical_points(rational, 0.5)
    assert float(rational.dWstar(alpha)) == pytest.approx(0.5)
    assert float(rational.dWstar(beta)) == pytest.approx(0.5)
    assert alpha < rational.kappa < beta
    with pytest.raises(NoCriticalPointsError):
        phase_critical_points(rational, 2.0)


def test_trivial_branch_reference(rational):
    assert trivial_branch(rational, 2.0) == pytest.approx(0.25)
    assert trivial_branch(rational, 1.0) == pytest.approx(0.0)


@given(st.floats(1.0, 1.49))
def test_lambda_sigma_inverts_trivial_branch(rational, lam):
    assert lambda_sigma(rational, trivial_branch(rational, lam)) == pytest.approx(lam, abs=1e-9)


@pytest.mark.parametrize("eps,frac", [(0.01, 0.5), (2.0, 0.9), (2.0, 0.0)])
def test_branch_profile_properties(rational, eps, frac):
    lam1 = first_bifurcation(rational, eps)
    bp = branch_point(rational, eps, frac / lam1)
    prof = profile_from_quadrature(rational, eps, bp, 4001)
    assert prof.mass() == pytest.approx(1.0, abs=1e-6)
    assert prof.y[-1] == pytest.approx(bp.lam)
    assert np.min(prof.H) >= bp.H1 - 1e-12
    assert np.max(prof.H) <= bp.H2 + 1e-12
    assert first_integral_spread(rational, prof) < 1e-6


@pytest.mark.parametrize("mode", [1, 2])
def test_broken_profile_structure(rational, mode):
    eps = 0.01
    fp = fracture_point(rational, eps, mode)
    lam = fp.lam + 0.3
    prof = broken_profile(rational, eps, lam, mode, n_samples=4001)
    assert len(prof.broken_intervals) >= 1
    assert prof.crack_opening == pytest.approx(lam - fp.lam, rel=1e-12)
    assert prof.mass() == pytest.approx(1.0, abs=1e-6)
    for a, b in prof.broken_intervals:
        inside = (prof.y > a + 1e-9) & (prof.y < b - 1e-9)
        assert np.all(prof.H[inside] == 0.0)
    assert np.all(prof.H < rational.M)


def test_broken_profile_below_fracture_rejected(rational):
    with pytest.raises(ValueError):
        broken_profile(rational, 0.01, 1.1)


def test_profile_resample_is_exact(rational):
    eps = 0.01
    prof = broken_profile(rational, eps, 1.5, n_samples=2001)
    u = prof.resample(501)
    assert u.min() == -1.0
    s = np.linspace(0, 1, 501)
    np.testing.assert_allclose(u, 1.5 * prof.evaluate(1.5 * s) - 1.0)
