from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from toricweyl.errors import NoConvergence, OutsidePolytope
from toricweyl.expfam import binomial, categorical, christoffel_alpha, fisher, mean_params, prob_vector
from toricweyl.geometry import (check_dual_affinity, check_duality_identity, dual_metric, is_interior,
                                legendre_dual_point, legendre_roundtrip, metric_derivative, theta_grid)
from toricweyl.weyl import enumerate_weyl

from conftest import random_theta


@pytest.mark.parametrize("n", [1, 3, 5])
def test_binomial_legendre_closed_form(n):
    fam = binomial(n)
    for eta in np.linspace(0.1, n - 0.1, 7):
        dp = legendre_dual_point(fam, [eta])
        q = eta / n
        assert dp.theta[0] == pytest.approx(np.log(q / (1 - q)), abs=1e-8)
        assert dp.k[0, 0] == pytest.approx(1 / (n * q * (1 - q)), rel=1e-9)


def test_dual_potential_is_negative_entropy():
    fam = categorical(4)
    eta = [0.1, 0.2, 0.3]
    dp = legendre_dual_point(fam, eta)
    p = np.array([*eta, 1 - sum(eta)])
    assert dp.phi == pytest.approx(float(p @ np.log(p)), abs=1e-10)


def test_dual_metric_is_jacobian_of_inverse_map():
    fam = categorical(3)
    eta = np.array([0.2, 0.5])
    h = 1e-5
    J = np.stack([(legendre_dual_point(fam, eta + h * e).theta - legendre_dual_point(fam, eta - h * e).theta)
                  / (2 * h) for e in np.eye(2)])
    assert np.abs(J - dual_metric(fam, eta)).max() <= 1e-5


def test_roundtrip_random_points(rng):
    for fam in (categorical(3), categorical(5), binomial(4)):
        for _ in range(20):
            err, dp = legendre_roundtrip(fam, random_theta(rng, fam.n, 3.0))
            assert err <= 1e-8 and dp.iterations <= 30


def test_boundary_and_outside_points_are_rejected():
    fam = categorical(3)
    assert is_interior(fam, [Fraction(1, 3), Fraction(1, 3)])
    assert not is_interior(fam, [Fraction(1, 2), Fraction(1, 2)])
    assert not is_interior(fam, [0.5, 0.5])
    with pytest.raises(OutsidePolytope):
        legendre_dual_point(fam, ["1/2", "1/2"])
    with pytest.raises(OutsidePolytope):
        legendre_dual_point(fam, [2.0, 0.0])
    with pytest.raises(ValueError):
        is_interior(fam, [0.1])


def test_no_convergence_is_reported():
    with pytest.raises(NoConvergence):
        legendre_dual_point(binomial(3), [2.9], max_iter=1)


def test_grid_size():
    assert len(theta_grid(3)) == 27
    assert len(theta_grid(2, 4)) == 16
    assert np.allclose(theta_grid(1, 1)[0], 0)


@pytest.mark.parametrize("fam", [categorical(3), categorical(4), binomial(2), binomial(5)], ids=repr)
def test_duality_identity_on_grid(fam):
    rep = check_duality_identity(fam, theta_grid(fam.n))
    assert rep.passed, rep.details


def test_wrong_pairing_violates_identity():
    fam = categorical(3)
    th = np.array([0.3, -0.4])
    D = metric_derivative(fam, th)
    G = christoffel_alpha(fam, th, 1).entries
    assert np.abs(D - (G + G.transpose(0, 2, 1))).max() > 1e-3


def test_exponential_connection_is_flat(rng):
    fam = categorical(4)
    for th in theta_grid(3):
        assert np.abs(christoffel_alpha(fam, th, 1).entries).max() <= 1e-10


def test_metric_derivative_symmetry():
    D = metric_derivative(categorical(4), [0.1, 0.2, -0.3])
    # third derivatives of psi are totally symmetric
    assert np.abs(D - D.transpose(1, 0, 2)).max() <= 1e-8
    assert np.abs(D - D.transpose(0, 2, 1)).max() <= 1e-8


def test_symmetries_are_affine_in_eta(rng):
    fam = categorical(3)
    samples = [rng.normal(size=2) for _ in range(8)]
    for w in enumerate_weyl(fam).elements:
        assert check_dual_affinity(fam, w, samples).passed
    stretch = SimpleNamespace(A_array=2 * np.eye(2), B_array=np.zeros(2))
    assert not check_dual_affinity(fam, stretch, samples).passed
    with pytest.raises(ValueError):
        check_dual_affinity(fam, stretch, samples[:3])


def test_probabilities_along_dual_point():
    fam = categorical(3)
    dp = legendre_dual_point(fam, [0.25, 0.25])
    assert prob_vector(fam, dp.theta) == pytest.approx([0.25, 0.25, 0.5], abs=1e-10)
    assert np.allclose(mean_params(fam, dp.theta), [0.25, 0.25])
    assert np.allclose(dp.k @ fisher(fam, dp.theta).entries, np.eye(2))
