"""Linear programming over Q (two-phase simplex, Bland's rule) and a float fallback.

Only the small feasibility problems needed for polytope membership are solved
here, so the dense tableau implementation is adequate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .scalars import to_fraction


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: object = None
    x: tuple = ()


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    inv = 1 / T[r][c]
    T[r] = [v * inv for v in T[r]]
    for i, row in enumerate(T):
        if i != r and row[c] != 0:
            f = row[c]
            T[i] = [a - f * b for a, b in zip(row, T[r])]
    basis[r] = c


def _run(T, basis, ncols) -> str:
    # T[-1] is the objective row; columns >= ncols are excluded from entering.
    while True:
        z = T[-1]
        entering = next((j for j in range(ncols) if z[j] < 0), None)
        if entering is None:
            return "optimal"
        best = None
        for i in range(len(T) - 1):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(T, basis, best[1], entering)


def simplex_max(A: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    """Maximise ``c.x`` subject to ``A x = b``, ``x >= 0`` in exact rational arithmetic."""
    A = [[to_fraction(v) for v in row] for row in A]
    b = [to_fraction(v) for v in b]
    c = [to_fraction(v) for v in c]
    m, n = len(A), len(c)
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]

    # phase 1: artificial columns n..n+m-1
    T = [A[i] + [Fraction(int(i == k)) for k in range(m)] + [b[i]] for i in range(m)]
    z = [Fraction(0)] * n + [Fraction(1)] * m + [Fraction(0)]
    for row in T:
        z = [a - r for a, r in zip(z, row)]
    T.append(z)
    basis = list(range(n, n + m))
    _run(T, basis, n + m)
    if T[-1][-1] != 0:
        return LPResult("infeasible")

    # drive remaining artificials out of the basis; drop redundant rows
    r = 0
    while r < len(T) - 1:
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is None:
                del T[r]
                del basis[r]
                continue
            _pivot(T, basis, r, col)
        r += 1
    T = [row[:n] + row[-1:] for row in T]

    z = [-v for v in c] + [Fraction(0)]
    for i, j in enumerate(basis):
        if z[j] != 0:
            f = z[j]
            z = [a - f * v for a, v in zip(z, T[i])]
    T[-1] = z
    status = _run(T, basis, n)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = T[i][-1]
    return LPResult("optimal", T[-1][-1], tuple(x))


def _float_max(A, b, c) -> LPResult:
    res = linprog(-np.asarray(c, float), A_eq=np.asarray(A, float), b_eq=np.asarray(b, float),
                  bounds=(0, None), method="highs")
    if res.status == 2:
        return LPResult("infeasible")
    if res.status == 3:
        return LPResult("unbounded")
    if res.status != 0:
        raise RuntimeError(f"linprog failed: {res.message}")
    return LPResult("optimal", -res.fun, tuple(res.x))


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def convex_weights(points, target, exact: bool | None = None):
    """Convex coefficients expressing ``target`` in conv(points), or None if outside.

    ``points`` is a list of length-n rows.  Exact arithmetic is used when every
    coordinate is an int/Fraction (or when ``exact`` is forced).
    """
    pts = [list(p) for p in points]
    tgt = list(target)
    if exact is None:
        exact = _is_exact([v for p in pts for v in p] + tgt)
    k = len(pts)
    n = len(tgt)
    A = [[p[d] for p in pts] for d in range(n)] + [[1] * k]
    b = tgt + [1]
    res = (simplex_max if exact else _float_max)(A, b, [0] * k)
    if res.status != "optimal":
        return None
    return res.x


def interior_slack(points, target, exact: bool | None = None):
    """Largest ``t`` such that ``target = sum l_i p_i`` with ``l_i >= t``, ``sum l_i = 1``.

    Returns None when ``target`` lies outside conv(points).  A positive value
    means ``target`` is in the relative interior.
    """
    pts = [list(p) for p in points]
    tgt = list(target)
    if exact is None:
        exact = _is_exact([v for p in pts for v in p] + tgt)
    k, n = len(pts), len(tgt)
    # variables: mu_1..mu_k (l_i = mu_i + t), t
    A = []
    for d in range(n):
        A.append([p[d] for p in pts] + [sum(p[d] for p in pts)])
    A.append([1] * k + [k])
    b = tgt + [1]
    c = [0] * k + [1]
    res = (simplex_max if exact else _float_max)(A, b, c)
    if res.status != "optimal":
        return None
    return res.value
