from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toricweyl.errors import NonIntegral, SingularBasis
from toricweyl.expfam import binomial, categorical
from toricweyl.torus import (SemidirectElement, SemidirectModel, TorusElement, rho_matrix, sd_inverse,
                             sd_mul, verify_normalizer_model)
from toricweyl.weyl import enumerate_weyl

B2 = enumerate_weyl(binomial(2))
S = 1 - B2.identity_index
E = B2.identity_index
C3 = enumerate_weyl(categorical(3))


def el(coords, w):
    return SemidirectElement(TorusElement.of(coords), w)


def test_binomial_products():
    assert sd_mul(el(["1/4"], S), el(["1/10"], S), B2) == el(["3/20"], E)
    assert sd_mul(el(["1/4"], S), el(["1/4"], S), B2) == el([0], E)
    assert sd_inverse(el(["3/10"], E), B2) == el(["7/10"], E)
    assert rho_matrix(B2, S) == ((-1,),)


def test_torus_reduction():
    assert TorusElement.of(["-1/4", 3, "5/2"]).coords == (Fraction(3, 4), 0, Fraction(1, 2))
    assert TorusElement.of([-0.25]).coords == (0.75,)
    assert TorusElement.of([-1e-18]).coords == (0.0,)


def test_rho_is_unimodular_for_categorical():
    for i in range(C3.order):
        R = np.array(rho_matrix(C3, i))
        assert R.dtype.kind == "i" and round(abs(np.linalg.det(R))) == 1
        assert np.array_equal(R, np.array(C3.elements[i].A, dtype=float))


def test_change_of_lattice_basis():
    L = [[1, 1], [0, 1]]
    for i in range(C3.order):
        A = np.array(C3.elements[i].A, dtype=float)
        R = np.array(rho_matrix(C3, i, L))
        assert np.array_equal(np.array(L) @ R, A @ np.array(L))
    assert verify_normalizer_model(C3, L, trials=100).passed


def test_non_integral_basis_is_diagnosed():
    with pytest.raises(NonIntegral) as info:
        SemidirectModel(C3, [[2, 0], [0, 1]])
    assert info.value.offending
    i, j, value = info.value.offending[0]
    assert Fraction(value).denominator == 2


def test_singular_or_malformed_basis():
    with pytest.raises(SingularBasis):
        rho_matrix(C3, 0, [[1, 2], [2, 4]])
    with pytest.raises(SingularBasis):
        rho_matrix(C3, 0, [[1, 0]])
    with pytest.raises(SingularBasis):
        rho_matrix(enumerate_weyl(categorical(3, "float")), 0, [[1.0, 2.0], [2.0, 4.0]])


def test_float_backend_rho():
    rep = enumerate_weyl(categorical(3, "float"))
    assert all(isinstance(v, int) for i in range(rep.order) for r in rho_matrix(rep, i) for v in r)


@pytest.mark.parametrize("fam", [categorical(3), categorical(4), binomial(2), binomial(3), binomial(4)],
                         ids=repr)
def test_normalizer_model(fam):
    rep = verify_normalizer_model(enumerate_weyl(fam), trials=300, seed=3)
    assert rep.passed, rep.details
    assert rep.details["quotient_equals_cayley"] and rep.details["index"] == len(rep.details["rho"])


coords = st.fractions(min_value=0, max_value=1, max_denominator=50).filter(lambda x: x < 1)


@settings(max_examples=80)
@given(st.lists(st.tuples(coords, coords, st.integers(0, 5)), min_size=3, max_size=3))
def test_associativity_and_inverse(triple):
    model = SemidirectModel(C3)
    x, y, z = (SemidirectElement(TorusElement((a, b)), w) for a, b, w in triple)
    assert model.mul(model.mul(x, y), z) == model.mul(x, model.mul(y, z))
    assert model.mul(x, model.inverse(x)) == model.identity() == model.mul(model.inverse(x), x)


@settings(max_examples=40)
@given(coords, coords, st.integers(0, 5))
def test_torus_is_normal(a, b, w):
    model = SemidirectModel(C3)
    g = SemidirectElement(TorusElement((b, a)), w)
    t = SemidirectElement(TorusElement((a, b)), model.identity_index)
    conj = model.mul(model.mul(g, t), model.inverse(g))
    assert conj.w == model.identity_index
    R = model.rho[w]
    expected = TorusElement.of([R[i][0] * a + R[i][1] * b for i in range(2)])
    assert conj.a == expected
