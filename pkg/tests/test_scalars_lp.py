import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from toricweyl import scalars
from toricweyl.lp import convex_weights, interior_slack, simplex_max
from toricweyl.scalars import LogRational, parse_log_rational, to_fraction

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def test_to_fraction_reads_float_repr():
    assert to_fraction(0.1) == Fraction(1, 10)
    assert to_fraction("3/7") == Fraction(3, 7)
    assert to_fraction(4) == 4
    with pytest.raises(TypeError):
        to_fraction(True)
    with pytest.raises(ValueError):
        to_fraction(float("nan"))


def test_log_rational_identities():
    assert LogRational.ln(6) == LogRational.ln(2) + LogRational.ln(3)
    assert LogRational.ln(8) == 3 * LogRational.ln(2)
    assert LogRational.ln(Fraction(1, 4)) == -2 * LogRational.ln(2)
    assert LogRational.ln(1) == 0
    assert LogRational.ln(2) != Fraction(693, 1000)
    assert float(LogRational.ln(10)) == pytest.approx(math.log(10), abs=1e-15)


def test_log_rational_exp():
    assert (LogRational.ln(6) - LogRational.ln(4)).exp() == Fraction(3, 2)
    assert LogRational(0).exp() == 1
    with pytest.raises(ValueError):
        LogRational(Fraction(1, 2)).exp()


@given(fractions, st.lists(st.tuples(st.sampled_from([2, 3, 5, 7]), fractions), max_size=3))
def test_log_rational_str_roundtrip(r, terms):
    x = LogRational(r)
    for p, q in terms:
        x = x + LogRational.ln(p) * q
    assert parse_log_rational(str(x)) == x
    expected = float(r) + sum(float(q) * math.log(p) for p, q in terms)
    assert float(x) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("text", ["", "ln(", "2ln(3)", "1/2*", "ln(x)", "1 2"])
def test_parse_rejects_garbage(text):
    with pytest.raises(ValueError):
        parse_log_rational(text)


matrices = st.integers(1, 4).flatmap(
    lambda k: st.lists(st.lists(st.integers(-4, 4), min_size=k, max_size=k), min_size=k, max_size=k))


@settings(max_examples=60)
@given(matrices)
def test_fraction_linear_algebra_matches_sympy(rows):
    M = sympy.Matrix(rows)
    Q = scalars.as_fraction_matrix(rows)
    assert scalars.rank(Q) == M.rank()
    assert scalars.det(Q) == Fraction(int(M.det()))
    if M.det() != 0:
        inv = scalars.inverse(Q)
        ref = M.inv()
        assert all(inv[i][j] == Fraction(int(ref[i, j].p), int(ref[i, j].q))
                   for i in range(len(rows)) for j in range(len(rows)))


def _vertex_oracle(A, b, c):
    """Exact optimum of a bounded LP by enumerating basic feasible solutions."""
    A = scalars.as_fraction_matrix(A)
    b = [Fraction(v) for v in b]
    keep = scalars.independent_rows([row + [bi] for row, bi in zip(A, b)])
    if scalars.rank([A[i] for i in keep]) < len(keep):
        return "infeasible", None
    A = [A[i] for i in keep]
    b = [b[i] for i in keep]
    r, ncols = len(A), len(A[0])
    best = None
    for cols in itertools.combinations(range(ncols), r):
        sub = [[row[j] for j in cols] for row in A]
        if scalars.det(sub) == 0:
            continue
        xb = scalars.matmul(scalars.inverse(sub), [[v] for v in b])
        if any(v[0] < 0 for v in xb):
            continue
        val = sum(c[j] * v[0] for j, v in zip(cols, xb))
        best = val if best is None else max(best, val)
    return ("infeasible", None) if best is None else ("optimal", best)


def _bounded(A, b, c):
    # extra row x_1 + ... + x_4 + s = 10 keeps the feasible set compact
    A = [row + [0] for row in A] + [[1] * (len(c) + 1)]
    return A, b + [10], c + [0]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda r: st.tuples(
    st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=r, max_size=r),
    st.lists(st.integers(-3, 3), min_size=r, max_size=r),
    st.lists(st.integers(-3, 3), min_size=4, max_size=4))))
def test_simplex_matches_vertex_enumeration(data):
    A, b, c = _bounded(*data)
    res = simplex_max(A, b, c)
    status, val = _vertex_oracle(A, b, c)
    assert res.status == status
    if status == "optimal":
        assert res.value == val
        x = res.x
        assert all(v >= 0 for v in x)
        assert all(sum(a * v for a, v in zip(row, x)) == bi for row, bi in zip(A, b))


def test_simplex_unbounded_and_infeasible():
    assert simplex_max([[1, -1]], [1], [1, 0]).status == "unbounded"
    assert simplex_max([[1, 1]], [-1], [1, 1]).status == "infeasible"
    res = simplex_max([[1, 1, 1]], [1], [1, 2, 3])
    assert res.status == "optimal" and res.value == 3 and res.x == (0, 0, 1)


def test_convex_weights_exact_and_float():
    square = [[0, 0], [1, 0], [0, 1], [1, 1]]
    lam = convex_weights(square, [Fraction(1, 2), Fraction(1, 2)], exact=True)
    assert sum(lam) == 1 and all(v >= 0 for v in lam)
    assert [sum(l * p[k] for l, p in zip(lam, square)) for k in range(2)] == [Fraction(1, 2)] * 2
    assert convex_weights(square, [2, 0], exact=True) is None
    lam_f = convex_weights(square, [0.25, 0.75], exact=False)
    assert np.allclose(np.asarray(lam_f) @ np.asarray(square, float), [0.25, 0.75])


def test_interior_slack():
    tri = [[0, 0], [1, 0], [0, 1]]
    assert interior_slack(tri, [Fraction(1, 3), Fraction(1, 3)], exact=True) == Fraction(1, 3)
    assert interior_slack(tri, [Fraction(1, 2), 0], exact=True) == 0
    assert interior_slack(tri, [1, 1], exact=True) is None
    assert interior_slack(tri, [1 / 3, 1 / 3], exact=False) == pytest.approx(1 / 3)
