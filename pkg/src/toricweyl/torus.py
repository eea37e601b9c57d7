"""The normalizer model T^n x| W with the twisted product.

Multiplication is ``(a, w) * (a', w') = (rho(w) a' + a mod 1, w w')`` where
``rho(w)`` is the integer matrix of the Weyl element acting on the torus.
For a witness with theta-map ``theta -> A theta + B`` and lattice generators
given by the columns of ``L`` (theta-coordinates), ``rho(w) = L^{-1} A L``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import scalars
from .errors import NonIntegral, SingularBasis
from .report import CheckReport
from .weyl import WeylGroupReport

INTEGRALITY_TOL = 1e-9


def _reduce(v):
    if isinstance(v, Fraction):
        return v - math.floor(v)
    r = float(v) % 1.0
    return 0.0 if r == 1.0 else r


@dataclass(frozen=True)
class TorusElement:
    coords: tuple

    @classmethod
    def of(cls, coords) -> "TorusElement":
        vals = []
        for c in coords:
            vals.append(_reduce(scalars.to_fraction(c) if isinstance(c, (int, str, Fraction)) else c))
        return cls(tuple(vals))

    @classmethod
    def zero(cls, n: int) -> "TorusElement":
        return cls(tuple(Fraction(0) for _ in range(n)))


@dataclass(frozen=True)
class SemidirectElement:
    a: TorusElement
    w: int


def _basis(report: WeylGroupReport, lattice_basis):
    n = report.n
    if lattice_basis is None:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    L = [list(r) for r in lattice_basis]
    if len(L) != n or any(len(r) != n for r in L):
        raise SingularBasis(f"lattice basis must be {n} x {n}")
    try:
        return scalars.as_fraction_matrix(L)
    except (TypeError, ValueError):
        return np.asarray(L, dtype=float)


def rho_matrix(report: WeylGroupReport, element_index: int, lattice_basis=None) -> tuple[tuple[int, ...], ...]:
    """Integer matrix of a Weyl element on the torus ``R^n / L Z^n``.

    Raises
    ------
    SingularBasis
        If the lattice basis is not invertible.
    NonIntegral
        If ``L^{-1} A L`` has non-integer entries or determinant other than +-1.
    """
    L = _basis(report, lattice_basis)
    e = report.elements[element_index]
    exact = report.exact and not isinstance(L, np.ndarray)
    if exact:
        try:
            Linv = scalars.inverse(L)
        except ZeroDivisionError as exc:
            raise SingularBasis("lattice basis is singular") from exc
        R = scalars.matmul(scalars.matmul(Linv, [list(r) for r in e.A]), L)
        offending = [(i, j, str(v)) for i, row in enumerate(R) for j, v in enumerate(row)
                     if v.denominator != 1]
        ints = None if offending else [[int(v) for v in row] for row in R]
    else:
        Lf = np.asarray(L, dtype=float)
        if abs(np.linalg.det(Lf)) < 1e-12:
            raise SingularBasis("lattice basis is singular")
        R = np.linalg.solve(Lf, e.A_array @ Lf)
        rounded = np.rint(R)
        bad = np.argwhere(np.abs(R - rounded) > INTEGRALITY_TOL)
        offending = [(int(i), int(j), float(R[i, j])) for i, j in bad]
        ints = None if offending else rounded.astype(int).tolist()
    if ints is None:
        raise NonIntegral(f"rho of element {element_index} is not integral", R, offending)
    d = round(np.linalg.det(np.array(ints, dtype=float)))
    if abs(d) != 1:
        raise NonIntegral(f"rho of element {element_index} has determinant {d}", ints, [])
    return tuple(tuple(r) for r in ints)


class SemidirectModel:
    """``T^n x| W`` for a Weyl report and lattice basis, with all rho matrices cached."""

    def __init__(self, report: WeylGroupReport, lattice_basis=None):
        self.report = report
        self.basis = lattice_basis
        self.rho = [rho_matrix(report, i, lattice_basis) for i in range(report.order)]
        self.identity_index = report.identity_index

    @property
    def n(self) -> int:
        return self.report.n

    def act(self, w: int, a: TorusElement) -> TorusElement:
        R = self.rho[w]
        return TorusElement.of([sum((R[i][j] * a.coords[j] for j in range(self.n)), 0 * a.coords[0])
                                for i in range(self.n)])

    def identity(self) -> SemidirectElement:
        return SemidirectElement(TorusElement.zero(self.n), self.identity_index)

    def mul(self, x: SemidirectElement, y: SemidirectElement) -> SemidirectElement:
        moved = self.act(x.w, y.a)
        a = TorusElement.of([p + q for p, q in zip(moved.coords, x.a.coords)])
        return SemidirectElement(a, self.report.cayley[x.w][y.w])

    def inverse(self, x: SemidirectElement) -> SemidirectElement:
        w_inv = self.report.inverse_index(x.w)
        return SemidirectElement(self.act(w_inv, TorusElement.of([-v for v in x.a.coords])), w_inv)


def sd_mul(x: SemidirectElement, y: SemidirectElement, report: WeylGroupReport,
           basis=None) -> SemidirectElement:
    return SemidirectModel(report, basis).mul(x, y)


def sd_inverse(x: SemidirectElement, report: WeylGroupReport, basis=None) -> SemidirectElement:
    return SemidirectModel(report, basis).inverse(x)


def _random_torus(rng: random.Random, n: int, max_denominator: int = 60) -> TorusElement:
    coords = []
    for _ in range(n):
        q = rng.randint(1, max_denominator)
        coords.append(Fraction(rng.randrange(q), q))
    return TorusElement(tuple(coords))


def verify_normalizer_model(report: WeylGroupReport, basis=None, trials: int = 1000,
                            seed: int = 0) -> CheckReport:
    """Randomised and exhaustive checks of the semidirect product model.

    Associativity on ``trials`` random triples with rational torus parts,
    rho a homomorphism into GL(n, Z) on all pairs, normality of the torus,
    quotient table equal to the Cayley table, and index equal to |W|.
    """
    model = SemidirectModel(report, basis)
    rng = random.Random(seed)
    k = report.order
    n = report.n
    e = model.identity_index

    def rand_el():
        return SemidirectElement(_random_torus(rng, n), rng.randrange(k))

    assoc_fail = 0
    for _ in range(trials):
        x, y, z = rand_el(), rand_el(), rand_el()
        if model.mul(model.mul(x, y), z) != model.mul(x, model.mul(y, z)):
            assoc_fail += 1

    hom_fail = 0
    for s in range(k):
        for t in range(k):
            prod = scalars.matmul([list(r) for r in model.rho[s]], [list(r) for r in model.rho[t]])
            if prod != [list(r) for r in model.rho[report.cayley[s][t]]]:
                hom_fail += 1

    normal_fail = 0
    inverse_fail = 0
    for w in range(k):
        for _ in range(max(1, trials // max(k, 1) // 10)):
            g = SemidirectElement(_random_torus(rng, n), w)
            s = SemidirectElement(_random_torus(rng, n), e)
            conj = model.mul(model.mul(g, s), model.inverse(g))
            if conj.w != e or conj.a != model.act(w, s.a):
                normal_fail += 1
            if model.mul(g, model.inverse(g)) != model.identity():
                inverse_fail += 1

    quotient = [[None] * k for _ in range(k)]
    for s in range(k):
        for t in range(k):
            x = SemidirectElement(_random_torus(rng, n), s)
            y = SemidirectElement(_random_torus(rng, n), t)
            quotient[s][t] = model.mul(x, y).w
    quotient_ok = quotient == report.cayley

    cosets = {SemidirectElement(TorusElement.zero(n), w).w for w in range(k)}
    index_ok = len(cosets) == k

    failures = assoc_fail + hom_fail + normal_fail + inverse_fail + (not quotient_ok) + (not index_ok)
    return CheckReport("normalizer model", failures == 0, float(failures), 0.0, {
        "associativity_failures": assoc_fail,
        "homomorphism_failures": hom_fail,
        "normality_failures": normal_fail,
        "inverse_failures": inverse_fail,
        "quotient_equals_cayley": quotient_ok,
        "index": len(cosets),
        "trials": trials,
        "rho": [list(map(list, r)) for r in model.rho],
    })
