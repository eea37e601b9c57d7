import numpy as np
import pytest

from toricweyl import dombrowski
from toricweyl.dombrowski import (AffineChange, check_kahler, complex_structure, connector_at,
                                  exterior_derivative, kahler_at)
from toricweyl.errors import NonAffineChange
from toricweyl.expfam import binomial, categorical, fisher
from toricweyl.geometry import theta_grid


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_complex_structure_squares_to_minus_identity(n):
    J = complex_structure(n)
    assert J.dtype.kind == "i"
    assert np.array_equal(J @ J, -np.eye(2 * n, dtype=int))
    v, w = np.arange(n), np.arange(n) + 10
    assert np.array_equal(J @ np.concatenate([v, w]), np.concatenate([-w, v]))


def test_pointwise_structure():
    fam = categorical(3)
    data = kahler_at(fam, [0.2, -0.1], [1.0, 2.0])
    h = fisher(fam, [0.2, -0.1]).entries
    assert np.array_equal(data.g[:2, :2], h) and np.array_equal(data.g[2:, 2:], h)
    assert not data.g[:2, 2:].any()
    J = data.J
    assert np.abs(J.T @ data.g @ J - data.g).max() == 0
    assert np.abs(data.omega + data.omega.T).max() == 0
    with pytest.raises(ValueError):
        kahler_at(fam, [0, 0], [1.0])


def test_exterior_derivative_formula(monkeypatch):
    # omega = z0 dz1 ^ dz2 on R^4 has d omega = dz0 ^ dz1 ^ dz2
    def field(fam, z):
        W = np.zeros((4, 4))
        W[1, 2], W[2, 1] = z[0], -z[0]
        return W

    monkeypatch.setattr(dombrowski, "_omega_field", field)
    dw = exterior_derivative(None, np.array([0.3, 0.1, 0.2, 0.4]))
    assert dw[0, 1, 2] == pytest.approx(1.0)
    assert dw[1, 0, 2] == pytest.approx(-1.0)
    assert dw[2, 0, 1] == pytest.approx(1.0)
    assert abs(dw[0, 1, 3]) < 1e-12


@pytest.mark.parametrize("fam", [categorical(3), categorical(4), binomial(3)], ids=repr)
def test_kahler_checks_pass(fam):
    rep = check_kahler(fam, theta_grid(fam.n))
    assert rep.passed, rep.details
    assert rep.details["J_squared_is_minus_identity"]


def test_connector_in_affine_charts(rng):
    fam = categorical(3)
    point = np.array([0.1, 0.2, 1.0, -1.0])
    tangent = np.array([0.5, -0.3, 0.2, 0.7])
    assert np.allclose(connector_at(fam, None, point, tangent), tangent[2:], atol=1e-12)
    M = np.array([[2.0, 1.0], [0.0, 1.0]])
    change = AffineChange(M, np.array([0.5, -0.5]))
    assert np.allclose(connector_at(fam, change, point, tangent), tangent[2:], atol=1e-12)
    out = connector_at(fam, lambda x: M @ x + 1.0, point, tangent)
    assert np.allclose(out, tangent[2:], atol=1e-12)


def test_connector_rejects_bad_input():
    fam = categorical(3)
    with pytest.raises(NonAffineChange):
        connector_at(fam, lambda x: x ** 2, np.ones(4), np.ones(4))
    with pytest.raises(ValueError):
        connector_at(fam, None, np.ones(3), np.ones(4))
    with pytest.raises(ValueError):
        connector_at(fam, AffineChange(np.zeros((2, 2)), np.zeros(2)), np.ones(4), np.ones(4))
    with pytest.raises(TypeError):
        connector_at(fam, "identity", np.ones(4), np.ones(4))
