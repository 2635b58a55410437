import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invfracture import InadmissibleChordError, chord, g_integrals
from invfracture.quadrature import TiltedIntegrand, gauss_legendre, sin2_integrate

# chord (0, 0.5) of the rational model, integrals evaluated with mpmath at 30 digits
G0_REF = 2.8314744168519124
G1_REF = 0.7436690738882329


@pytest.mark.parametrize("order", [4, 16, 64])
def test_gauss_legendre_exact_for_polynomials(order):
    x, w = gauss_legendre(order)
    for k in range(2 * order):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert np.dot(w, x**k) == pytest.approx(exact, abs=1e-13)


def test_sin2_integrate_smooth_and_sqrt_endpoint():
    assert sin2_integrate(lambda z: np.ones_like(z), 0.2, 0.7) == pytest.approx(0.5, rel=1e-14)
    # int_0^1 sqrt(z (1 - z)) dz = pi / 8
    val = sin2_integrate(lambda z: np.sqrt(z * (1 - z)), 0.0, 1.0)
    assert val == pytest.approx(np.pi / 8, rel=1e-13)


def test_rational_g_integrals_match_reference(rational):
    g0, g1 = g_integrals(rational, chord(rational, 0.0, 0.5))
    assert g0 == pytest.approx(G0_REF, rel=1e-12)
    assert g1 == pytest.approx(G1_REF, rel=1e-12)


@given(st.floats(0.0, 0.6), st.floats(0.01, 0.99))
def test_quadratic_g_integrals_closed_form(quadratic, H1, frac):
    H2 = H1 + frac * (quadratic.kappa - H1)
    c = chord(quadratic, H1, H2)
    g0, g1 = g_integrals(quadratic, c)
    assert g0 == pytest.approx(np.pi, rel=1e-10)
    assert g1 == pytest.approx(np.pi * (H1 + H2) / 2, rel=1e-10)


@given(st.floats(0.0, 0.6), st.floats(0.05, 0.95))
def test_weights_positive_on_admissible_chords(rational, H1, frac):
    lo = H1 if H1 < rational.kappa - 1e-3 else 0.0
    H2 = lo + frac * (0.999 - lo)
    c = chord(rational, lo, H2)
    if not c.admissible:
        return
    g0, g1 = g_integrals(rational, c)
    assert g0 > 0 and lo * g0 <= g1 <= H2 * g0


def test_inadmissible_chord_raises(rational):
    # both ends above the inflection point: U < 0 inside
    c = chord(rational, 0.8, 1.2)
    assert not c.admissible
    integrand = TiltedIntegrand(rational, c.H1, c.H2, c.varpi)
    with pytest.raises(InadmissibleChordError):
        integrand.weights(np.linspace(0.1, 1.4, 7))
