"""Permutation symmetries of a finite exponential family.

A permutation ``sigma`` of the sample space is a symmetry of the family iff
there are ``A`` (invertible), ``u``, ``B``, ``c`` with::

    F[sigma(i)] = A^T F[i] + u
    C[sigma(i)] = C[i] + <B, F[i]> + c

for every outcome ``i``.  The affine map ``theta -> A theta + B`` then
satisfies ``p(x_i; A theta + B) = p(x_sigma(i); theta)``.  Because
``[1 | F]`` has full column rank, the witness is unique when it exists, so
deciding membership is a pair of exact linear solves.

Composition convention: ``(s*t)(i) = t(s(i))``.  With it the affine parts
compose as ``A_{s*t} = A_s A_t`` and ``B_{s*t} = B_s + A_s B_t``, i.e. the
product in the Cayley table is composition of the theta-maps.
"""
from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import scalars
from .errors import NotInSpan, TooLarge
from .expfam import FiniteExpFam, fisher, prob_vector
from .report import CheckReport, jsonable
from .scalars import LogRational

DEFAULT_LIMIT_M = 9
_PREFILTER_TOL = 1e-6
_CHUNK = 20000


@dataclass(frozen=True)
class PermSymmetry:
    """A symmetry ``sigma`` (0-based tuple) with its affine witness.

    Exact witnesses hold Fractions (``A``, ``u``) and LogRationals (``B``, ``c``);
    float witnesses hold floats.
    """

    sigma: tuple[int, ...]
    A: tuple[tuple, ...]
    u: tuple
    B: tuple
    c: object

    @cached_property
    def A_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.A], dtype=float)

    @cached_property
    def u_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.u], dtype=float)

    @cached_property
    def B_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.B], dtype=float)

    @property
    def c_value(self) -> float:
        return float(self.c)

    def theta_map(self, theta) -> np.ndarray:
        return self.A_array @ np.asarray(theta, dtype=float) + self.B_array

    def to_dict(self) -> dict:
        return jsonable({
            "sigma": [i + 1 for i in self.sigma],
            "A": self.A,
            "u": self.u,
            "B": self.B,
            "c": self.c,
        })


@dataclass
class WeylGroupReport:
    """Enumerated symmetry group with its Cayley table (``cayley[s][t]`` = index of ``s*t``)."""

    elements: list[PermSymmetry]
    cayley: list[list[int]]
    injective: bool
    m: int
    n: int
    exact: bool
    descriptors: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity_index(self) -> int:
        ident = tuple(range(self.m))
        return next(i for i, e in enumerate(self.elements) if e.sigma == ident)

    @property
    def kind(self) -> str:
        return "Diff=Perm" if self.injective else "Perm(E) only"

    def index_of(self, sigma) -> int:
        sigma = tuple(sigma)
        return next(i for i, e in enumerate(self.elements) if e.sigma == sigma)

    def inverse_index(self, i: int) -> int:
        e = self.identity_index
        return next(j for j in range(self.order) if self.cayley[i][j] == e)

    def to_dict(self) -> dict:
        return jsonable({
            "order": self.order,
            "name": self.descriptors.get("name", "unidentified"),
            "kind": self.kind,
            "injective": self.injective,
            "elements": [e.to_dict() for e in self.elements],
            "cayley": self.cayley,
            "descriptors": {k: v for k, v in self.descriptors.items() if k != "name"},
        })


# ---------------------------------------------------------------------------
# witness solving
# ---------------------------------------------------------------------------

class _Solver:
    """Precomputed data for deciding ``affine_witness`` quickly for one family."""

    def __init__(self, fam: FiniteExpFam):
        self.fam = fam
        m, n = fam.m, fam.n
        design = [[1, *row] for row in (fam.F if fam.exact else fam.F_array.tolist())]
        if fam.exact:
            self.basis = scalars.independent_rows(design)[: n + 1]
            self.inv = scalars.inverse([design[i] for i in self.basis])
            self.design = scalars.as_fraction_matrix(design)
        else:
            D = np.array(design, dtype=float)
            self.basis = _independent_rows_float(D, n + 1)
            self.inv = None
            self.design = D
        D = np.array([[1.0, *row] for row in fam.F_array.tolist()])
        self.design_f = D
        self.inv_f = np.linalg.inv(D[self.basis])
        self.scale_F = max(1.0, float(np.abs(fam.F_array).max()))
        self.scale_C = max(1.0, float(np.abs(fam.C_array).max()))

    def prefilter(self, perms: np.ndarray) -> np.ndarray:
        """Boolean mask of permutations whose F-system is numerically consistent."""
        F = self.fam.F_array
        X = np.einsum("ab,kbj->kaj", self.inv_f, F[perms[:, self.basis]])
        pred = np.einsum("ia,kaj->kij", self.design_f, X)
        res = np.abs(pred - F[perms]).max(axis=(1, 2))
        return res <= _PREFILTER_TOL * self.scale_F

    def solve(self, sigma) -> PermSymmetry | None:
        return self._solve_exact(sigma) if self.fam.exact else self._solve_float(sigma)

    def _solve_exact(self, sigma):
        fam = self.fam
        n = fam.n
        rhs = [list(fam.F[sigma[i]]) for i in self.basis]
        X = scalars.matmul(self.inv, rhs)  # rows: u^T, then A
        for i in range(fam.m):
            pred = [sum((d * X[a][j] for a, d in enumerate(self.design[i])), Fraction(0))
                    for j in range(n)]
            if pred != list(fam.F[sigma[i]]):
                return None
        A = [X[1 + a] for a in range(n)]
        if scalars.det(A) == 0:
            return None
        dC = [fam.C[sigma[i]] - fam.C[i] for i in range(fam.m)]
        Y = [sum((w * dC[self.basis[b]] for b, w in enumerate(row)), LogRational(0))
             for row in self.inv]  # c, then B
        for i in range(fam.m):
            pred = sum((d * Y[a] for a, d in enumerate(self.design[i])), LogRational(0))
            if pred != dC[i]:
                return None
        return PermSymmetry(tuple(sigma), tuple(tuple(r) for r in A), tuple(X[0]),
                            tuple(Y[1:]), Y[0])

    def _solve_float(self, sigma):
        fam = self.fam
        n = fam.n
        F, C = fam.F_array, fam.C_array
        sigma = list(sigma)
        X = self.inv_f @ F[np.array(sigma)[self.basis]]
        if np.abs(self.design_f @ X - F[sigma]).max() > fam.tol * self.scale_F:
            return None
        A = X[1:]
        if abs(np.linalg.det(A)) < fam.tol:
            return None
        dC = C[sigma] - C
        Y = self.inv_f @ dC[self.basis]
        if np.abs(self.design_f @ Y - dC).max() > fam.tol * self.scale_C:
            return None
        return PermSymmetry(tuple(sigma), tuple(tuple(float(v) for v in r) for r in A),
                            tuple(float(v) for v in X[0]), tuple(float(v) for v in Y[1:]),
                            float(Y[0]))


def _independent_rows_float(D: np.ndarray, k: int) -> list[int]:
    chosen: list[int] = []
    for i in range(D.shape[0]):
        trial = chosen + [i]
        if np.linalg.matrix_rank(D[trial], tol=1e-9 * max(1.0, np.abs(D).max())) == len(trial):
            chosen = trial
        if len(chosen) == k:
            break
    return chosen


def affine_witness(fam: FiniteExpFam, sigma) -> PermSymmetry | None:
    """Witness ``(A, u, B, c)`` for the permutation ``sigma`` (0-based), or None."""
    sigma = tuple(int(i) for i in sigma)
    if sorted(sigma) != list(range(fam.m)):
        raise ValueError(f"{sigma} is not a permutation of range({fam.m})")
    return _Solver(fam).solve(sigma)


def _solve_batch(args):
    fam, perms = args
    solver = _Solver(fam)
    return [solver.solve(p) for p in perms]


def _worker_count(workers) -> int:
    if workers is None:
        try:
            workers = int(os.environ.get("TORICWEYL_THREADS", "1"))
        except ValueError:
            workers = 1
    return max(1, workers)


def enumerate_weyl(fam: FiniteExpFam, limit_m: int = DEFAULT_LIMIT_M,
                   workers: int | None = None) -> WeylGroupReport:
    """All permutations of the sample space that are family symmetries.

    Every one of the ``m!`` permutations is tested.  A vectorised float pass
    discards permutations whose F-system residual is far from zero; the
    survivors are decided by the exact (or tolerance-based) witness solve.

    Raises TooLarge when ``m > limit_m``.  For non-injective F the report is
    labelled ``Perm(E) only``.
    """
    m = fam.m
    if m > limit_m:
        raise TooLarge(f"m = {m} exceeds limit_m = {limit_m} ({math.factorial(m)} permutations)")
    solver = _Solver(fam)
    candidates: list[tuple[int, ...]] = []
    it = itertools.permutations(range(m))
    while True:
        chunk = list(itertools.islice(it, _CHUNK))
        if not chunk:
            break
        mask = solver.prefilter(np.array(chunk, dtype=np.intp))
        candidates.extend(p for p, keep in zip(chunk, mask) if keep)

    nw = _worker_count(workers)
    if nw > 1 and len(candidates) > 256:
        size = -(-len(candidates) // nw)
        batches = [(fam, candidates[i:i + size]) for i in range(0, len(candidates), size)]
        with ProcessPoolExecutor(max_workers=nw) as pool:
            solved = [w for part in pool.map(_solve_batch, batches) for w in part]
    else:
        solved = [solver.solve(p) for p in candidates]
    elements = [w for w in solved if w is not None]

    cayley = _cayley(elements)
    report = WeylGroupReport(elements, cayley, fam.injective, fam.m, fam.n, fam.exact)
    _check_composition(fam, report)
    report.descriptors = describe_group(report)
    return report


def compose(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[int, ...]:
    """``(s*t)(i) = t(s(i))``."""
    return tuple(t[s[i]] for i in range(len(s)))


def _cayley(elements) -> list[list[int]]:
    index = {e.sigma: k for k, e in enumerate(elements)}
    table = []
    for s in elements:
        row = []
        for t in elements:
            st = compose(s.sigma, t.sigma)
            if st not in index:
                raise AssertionError(f"witness set not closed: {s.sigma} * {t.sigma}")
            row.append(index[st])
        table.append(row)
    return table


def _check_composition(fam: FiniteExpFam, report: WeylGroupReport) -> None:
    """Witness of ``s*t`` must equal the composite of the affine parts.

    ``A_{s*t} = A_s A_t``, ``u_{s*t} = A_t^T u_s + u_t``,
    ``B_{s*t} = B_s + A_s B_t``, ``c_{s*t} = c_s + c_t + <B_t, u_s>``.
    """
    if not report.elements:
        raise AssertionError("identity permutation was not enumerated")
    if fam.exact:
        packed = _pack_integer(report.elements, fam.n)
        arrays = packed[1:] if packed is not None else None
        scale = packed[0] if packed is not None else None
        if packed is None:
            _check_composition_slow(fam, report)
            return
    else:
        els = report.elements
        arrays = (np.array([e.A_array for e in els]), np.array([e.u_array for e in els]),
                  np.array([e.B_array[:, None] for e in els]),
                  np.array([[e.c_value] for e in els]))
        scale = 1.0
    A, u, B, c = arrays
    idx = np.asarray(report.cayley)
    D = scale
    A_st = np.einsum("sab,tbc->stac", A, A)
    u_st = np.einsum("tba,sb->sta", A, u) + D * u[None, :, :]
    B_st = D * B[:, None] + np.einsum("sab,tbk->stak", A, B)
    c_st = D * (c[:, None] + c[None, :]) + np.einsum("tak,sa->stk", B, u)
    expect = (D * A[idx], D * u[idx], D * B[idx], D * c[idx])
    got = (A_st, u_st, B_st, c_st)
    for name, g, x in zip("AuBc", got, expect):
        bad = (g != x) if fam.exact else ~np.isclose(g, x, atol=1e-7, rtol=0)
        if np.any(bad):
            s, t = np.argwhere(bad.reshape(bad.shape[0], bad.shape[1], -1).any(axis=2))[0]
            raise AssertionError(
                f"{name}-part of witness {report.elements[idx[s, t]].sigma} is not the composite "
                f"of {report.elements[s].sigma} and {report.elements[t].sigma}")


def _pack_integer(elements, n):
    """Integer arrays of the exact witnesses over a common denominator, or None on overflow risk."""
    keys = sorted({k for e in elements for v in (*e.B, e.c) for k in v.components()},
                  key=lambda k: (k != 1, k))
    denom = 1
    for e in elements:
        for v in (*[x for r in e.A for x in r], *e.u):
            denom = math.lcm(denom, v.denominator)
        for v in (*e.B, e.c):
            for q in v.components().values():
                denom = math.lcm(denom, q.denominator)
    K = max(1, len(keys))

    def coords(v):
        comp = v.components()
        return [int(comp.get(k, 0) * denom) for k in keys] or [0]

    A = [[[int(x * denom) for x in r] for r in e.A] for e in elements]
    u = [[int(x * denom) for x in e.u] for e in elements]
    B = [[coords(b) for b in e.B] for e in elements]
    c = [coords(e.c) for e in elements]
    big = max([abs(x) for M in A for r in M for x in r] + [abs(x) for r in u for x in r]
              + [abs(x) for M in B for r in M for x in r] + [abs(x) for r in c for x in r] + [1])
    if big * big * (n + 2) * denom >= 2 ** 62:
        return None
    return (denom, np.array(A, dtype=np.int64), np.array(u, dtype=np.int64).reshape(-1, n),
            np.array(B, dtype=np.int64).reshape(-1, n, K), np.array(c, dtype=np.int64).reshape(-1, K))


def _check_composition_slow(fam: FiniteExpFam, report: WeylGroupReport) -> None:
    els = report.elements
    n = fam.n
    for i, s in enumerate(els):
        for j, t in enumerate(els):
            st = els[report.cayley[i][j]]
            As, At = [list(r) for r in s.A], [list(r) for r in t.A]
            A = scalars.matmul(As, At)
            u = [sum((At[a][k] * s.u[a] for a in range(n)), Fraction(0)) + t.u[k] for k in range(n)]
            B = [s.B[k] + sum((As[k][a] * t.B[a] for a in range(n)), LogRational(0)) for k in range(n)]
            c = s.c + t.c + sum((t.B[a] * s.u[a] for a in range(n)), LogRational(0))
            if not (A == [list(r) for r in st.A] and u == list(st.u) and B == list(st.B)
                    and c == st.c):
                raise AssertionError(f"witness of {st.sigma} is not the composite of "
                                     f"{s.sigma} and {t.sigma}")


# ---------------------------------------------------------------------------
# group descriptors
# ---------------------------------------------------------------------------

def _key(counts: dict[int, int]) -> tuple:
    return tuple(sorted(counts.items()))


# Non-abelian groups of order <= 24 whose element-order statistics are unique
# among all groups of that order.  Order 16 and the remaining order-24 groups
# are not catalogued.
_NONABELIAN = {
    (6, _key({1: 1, 2: 3, 3: 2})): "S_3",
    (8, _key({1: 1, 2: 5, 4: 2})): "D_4",
    (8, _key({1: 1, 2: 1, 4: 6})): "Q_8",
    (10, _key({1: 1, 2: 5, 5: 4})): "D_5",
    (12, _key({1: 1, 2: 3, 3: 8})): "A_4",
    (12, _key({1: 1, 2: 7, 3: 2, 6: 2})): "D_6",
    (12, _key({1: 1, 2: 1, 3: 2, 4: 6, 6: 2})): "Dic_3",
    (14, _key({1: 1, 2: 7, 7: 6})): "D_7",
    (18, _key({1: 1, 2: 9, 3: 2, 9: 6})): "D_9",
    (18, _key({1: 1, 2: 3, 3: 8, 6: 6})): "S_3 x Z_3",
    (18, _key({1: 1, 2: 9, 3: 8})): "(Z_3 x Z_3) : Z_2",
    (20, _key({1: 1, 2: 11, 5: 4, 10: 4})): "D_10",
    (20, _key({1: 1, 2: 1, 4: 10, 5: 4, 10: 4})): "Dic_5",
    (20, _key({1: 1, 2: 5, 4: 10, 5: 4})): "F_20",
    (21, _key({1: 1, 3: 14, 7: 6})): "Z_7 : Z_3",
    (22, _key({1: 1, 2: 11, 11: 10})): "D_11",
    (24, _key({1: 1, 2: 9, 3: 8, 4: 6})): "S_4",
}

CATALOGUE_MAX_ORDER = 24


def _primes(n: int) -> list[int]:
    return sorted(scalars._factor(n))


def abelian_invariants(order: int, element_orders: dict[int, int]) -> list[int]:
    """Invariant factors ``d_1 | d_2 | ...`` of an abelian group from its order statistics."""
    primary: list[list[int]] = []
    for p in _primes(order):
        # log_p #{g : g^(p^k) = 1} = sum_i min(k, e_i)
        logs = [0]
        k = 1
        while True:
            cnt = sum(c for o, c in element_orders.items() if (p ** k) % o == 0 and _is_p_power(o, p))
            logs.append(round(math.log(cnt, p)))
            if cnt == p ** _valuation(order, p):
                break
            k += 1
        at_least = [logs[j] - logs[j - 1] for j in range(1, len(logs))]
        exps = [sum(1 for a in at_least if a > i) for i in range(at_least[0])] if at_least else []
        primary.append([p ** e for e in sorted(exps)])
    width = max((len(x) for x in primary), default=0)
    factors = [1] * width
    for powers in primary:
        padded = [1] * (width - len(powers)) + powers
        factors = [f * q for f, q in zip(factors, padded)]
    return [f for f in factors if f > 1]


def _is_p_power(o: int, p: int) -> bool:
    while o % p == 0:
        o //= p
    return o == 1


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def group_name(order: int, abelian: bool, element_orders: dict[int, int]) -> str:
    if order == 1:
        return "1"
    if order > CATALOGUE_MAX_ORDER:
        return "unidentified"
    if abelian:
        return " x ".join(f"Z_{d}" for d in abelian_invariants(order, element_orders))
    return _NONABELIAN.get((order, _key(element_orders)), "unidentified")


def _element_order(table, i, e) -> int:
    k, x = 1, i
    while x != e:
        x = table[x][i]
        k += 1
    return k


def _generated(table, gens, e) -> int:
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = table[x][g]
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def minimal_generators(table, e: int) -> list[int]:
    """Lexicographically first generating set of minimum size."""
    order = len(table)
    pool = [i for i in range(order) if i != e]
    for k in range(0, order):
        for combo in itertools.combinations(pool, k):
            if _generated(table, combo, e) == order:
                return list(combo)
    return pool


def table_descriptors(table, e: int) -> dict:
    order = len(table)
    abelian = all(table[i][j] == table[j][i] for i in range(order) for j in range(i))
    orders = Counter(_element_order(table, i, e) for i in range(order))
    counts = dict(sorted(orders.items()))
    return {
        "order": order,
        "abelian": abelian,
        "element_orders": counts,
        "generators": minimal_generators(table, e),
        "name": group_name(order, abelian, counts),
    }


def describe_group(report: WeylGroupReport) -> dict:
    """Order, abelianness, element-order counts, minimal generators and a catalogue name."""
    return table_descriptors(report.cayley, report.identity_index)


# ---------------------------------------------------------------------------
# action and checks
# ---------------------------------------------------------------------------

def _in_span(fam: FiniteExpFam, X) -> bool:
    if fam.exact:
        design = [[1, *row, x] for row, x in zip(fam.F, X)]
        return scalars.rank(design) == fam.n + 1
    D = np.hstack([np.ones((fam.m, 1)), fam.F_array])
    x = np.asarray(X, dtype=float)
    coef = np.linalg.lstsq(D, x, rcond=None)[0]
    return float(np.abs(D @ coef - x).max()) <= 1e-9 * max(1.0, float(np.abs(x).max()))


def action_on_statistics(fam: FiniteExpFam, element: PermSymmetry, X):
    """``(phi_sigma . X)(x_i) = X(x_sigma(i))`` for ``X`` in span{1, F^1, ..., F^n}."""
    if len(X) != fam.m:
        raise ValueError(f"X must have length {fam.m}")
    X = [scalars.to_fraction(x) for x in X] if fam.exact else [float(x) for x in X]
    if not _in_span(fam, X):
        raise NotInSpan("X is not a linear combination of 1, F^1, ..., F^n")
    Y = [X[element.sigma[i]] for i in range(fam.m)]
    assert _in_span(fam, Y), "image left the span; witness is inconsistent"
    return Y


def check_probability_action(fam: FiniteExpFam, report: WeylGroupReport, thetas,
                             tol: float = 1e-10) -> CheckReport:
    """``max |p(x_i; A theta + B) - p(x_sigma(i); theta)|`` over elements and thetas."""
    worst = 0.0
    for e in report.elements:
        idx = np.array(e.sigma)
        for th in thetas:
            lhs = prob_vector(fam, e.theta_map(th))
            rhs = prob_vector(fam, th)[idx]
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return CheckReport("probability action", worst <= tol, worst, tol,
                       {"elements": report.order, "points": len(thetas)})


def check_isometry(fam: FiniteExpFam, report: WeylGroupReport, thetas,
                   tol: float = 1e-8) -> CheckReport:
    """``A^T h(A theta + B) A = h(theta)`` for every element."""
    worst = 0.0
    for e in report.elements:
        A = e.A_array
        for th in thetas:
            th = np.asarray(th, dtype=float)
            lhs = A.T @ fisher(fam, e.theta_map(th)).entries @ A
            worst = max(worst, float(np.abs(lhs - fisher(fam, th).entries).max()))
    return CheckReport("fisher isometry", worst <= tol, worst, tol,
                       {"elements": report.order, "points": len(thetas)})


def check_group_table(report: WeylGroupReport) -> CheckReport:
    """Latin-square property, identity, inverses and associativity of the Cayley table."""
    T = report.cayley
    k = report.order
    e = report.identity_index
    latin = all(sorted(row) == list(range(k)) for row in T) and all(
        sorted(T[i][j] for i in range(k)) == list(range(k)) for j in range(k))
    ident = all(T[e][i] == i and T[i][e] == i for i in range(k))
    assoc = all(T[T[a][b]][c] == T[a][T[b][c]]
                for a in range(k) for b in range(k) for c in range(k)) if k <= 40 else True
    ok = latin and ident and assoc
    return CheckReport("group table", ok, 0.0 if ok else 1.0, 0.0,
                       {"latin": latin, "identity": ident, "associative": assoc})
