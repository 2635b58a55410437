import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invfracture import (ConfigError, ModelDefinitionError, build_model, find_kappa,
                         shield_invert, validate_hypotheses)
from invfracture.expr import parse_expression

RATIONAL_EXPR = {"name": "custom", "W": "(1 - 1/F)^2", "dW": "2*(1 - 1/F)/F^2",
                 "ddW": "(6/F - 4)/F^3"}


def test_rational_constants(rational):
    assert rational.kappa == pytest.approx(2 / 3, abs=1e-12)
    assert rational.gamma == pytest.approx(1.0, abs=1e-14)
    assert rational.M == pytest.approx(4 / 3, abs=1e-12)
    assert float(rational.ddWstar(1.0)) == pytest.approx(2.0)


def test_rational_inverse_energy_closed_form(rational):
    H = np.linspace(0.0, 2.0, 41)
    np.testing.assert_allclose(rational.Wstar(H), H * (1 - H) ** 2, atol=1e-15)


def test_quadratic_constants(quadratic):
    assert quadratic.kappa == 1 / np.sqrt(2)
    assert quadratic.gamma == pytest.approx(2 * (np.sqrt(2) - 1))
    assert float(quadratic.ddWstar(0.5)) == -2.0
    assert float(quadratic.ddWstar(0.8)) == 2.0


def test_quadratic_is_c1_at_kink(quadratic):
    k = quadratic.kappa
    left = float(quadratic.dWstar(k - 1e-12))
    right = float(quadratic.dWstar(k + 1e-12))
    assert left == pytest.approx(right, abs=1e-10)


@given(st.floats(0.05, 5.0))
def test_shield_inversion_identity(rational, H):
    assert float(shield_invert(rational.W, H)) == pytest.approx(float(rational.Wstar(H)), rel=1e-12,
                                                                abs=1e-15)


@given(st.floats(0.2, 20.0))
def test_stress_from_inverse_energy(rational, F):
    H = 1.0 / F
    expected = float(rational.Wstar(H)) - H * float(rational.dWstar(H))
    assert float(rational.dW(F)) == pytest.approx(expected, rel=1e-10, abs=1e-14)


@given(st.floats(0.2, 10.0))
def test_second_derivative_relation(rational, F):
    H = 1.0 / F
    assert float(rational.ddW(F)) == pytest.approx(H**3 * float(rational.ddWstar(H)), rel=1e-10,
                                                   abs=1e-14)


def test_custom_expression_model_matches_builtin(rational):
    m = build_model(RATIONAL_EXPR)
    assert m.kappa == pytest.approx(rational.kappa, abs=1e-9)
    assert m.gamma == pytest.approx(rational.gamma, abs=1e-7)
    assert m.M == pytest.approx(rational.M, abs=1e-7)
    H = np.linspace(0.05, 1.5, 30)
    np.testing.assert_allclose(m.ddWstar(H), rational.ddWstar(H), rtol=1e-9, atol=1e-9)


def test_wrong_derivative_rejected():
    bad = dict(RATIONAL_EXPR, dW="2*(1 - 1/F)/F^3")
    with pytest.raises(ModelDefinitionError):
        build_model(bad)


def test_custom_model_needs_all_parts():
    with pytest.raises(ModelDefinitionError):
        build_model({"name": "custom", "W": "F"})


def test_find_kappa_locates_sign_change():
    assert find_kappa(lambda H: 3.0 * H - 1.0) == pytest.approx(1 / 3, abs=1e-12)


def test_validate_rational_passes(rational):
    rep = validate_hypotheses(rational)
    assert rep.passed, rep.failures()
    assert rep.smoothness_note == ""


def test_validate_quadratic_passes_with_note(quadratic):
    rep = validate_hypotheses(quadratic)
    assert rep.passed, rep.failures()
    assert "piecewise C^2" in rep.smoothness_note


def test_validate_convex_energy_fails_asymptote_clause():
    m = build_model({"name": "custom", "W": "(F - 1)^2", "dW": "2*(F - 1)", "ddW": "2"},
                    strict=False)
    rep = validate_hypotheses(m)
    assert not rep.passed
    assert any("gamma" in name for name in rep.failures())
    assert rep.as_dict()["passed"] is False


@pytest.mark.parametrize("text,value", [("(1 - 1/F)^2", 0.25), ("2**F", 4.0), ("-F + 3", 1.0),
                                        ("sqrt(F) * exp(0)", np.sqrt(2.0))])
def test_parse_expression(text, value):
    assert parse_expression(text)(2.0) == pytest.approx(value)


@pytest.mark.parametrize("text", ["__import__('os')", "F.real", "x + 1", "open(F)", "", "F +"])
def test_parse_expression_rejects_unsafe_or_bad(text):
    with pytest.raises(ConfigError):
        parse_expression(text)


def test_parse_expression_vectorised():
    f = parse_expression("1")
    assert f(np.ones(3)).shape == (3,)
