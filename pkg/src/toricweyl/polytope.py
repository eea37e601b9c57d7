"""Momentum polytope conv{F_i} and its symmetry groups.

This is the second, independent route to the Weyl group: enumerate the affine
symmetries of the polytope from its extreme points, then keep those that are
isometries of the dual metric ``k`` on the interior.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import scalars
from .errors import Mismatch, TooManyVertices
from .expfam import FiniteExpFam, mean_params
from .geometry import dual_metric
from .lp import convex_weights, interior_slack
from .report import CheckReport, jsonable

MAX_VERTICES = 10
ROUND_GRID = 1e-6


@dataclass(frozen=True)
class Polytope:
    """Convex hull of ``points``; ``vertices`` index the extreme points.

    ``weights[i]`` expresses a non-vertex point as a convex combination of the
    vertices (in vertex order).  Repeated points are represented by their first
    occurrence.
    """

    points: tuple[tuple, ...]
    vertices: tuple[int, ...]
    dim: int
    exact: bool
    weights: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.points[0])

    @cached_property
    def vertex_array(self) -> np.ndarray:
        return np.array([[float(v) for v in self.points[i]] for i in self.vertices])

    def to_dict(self) -> dict:
        return jsonable({
            "points": self.points,
            "vertices": list(self.vertices),
            "dim": self.dim,
            "weights": {str(k): v for k, v in sorted(self.weights.items())},
        })


@dataclass(frozen=True)
class AffineSymmetry:
    """``x -> A x + b`` with ``A v_k + b = v_{vertex_perm[k]}`` for every vertex position ``k``."""

    A: tuple[tuple, ...]
    b: tuple
    vertex_perm: tuple[int, ...]

    @cached_property
    def A_array(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.A])

    @cached_property
    def b_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.b])

    def __call__(self, x):
        return self.A_array @ np.asarray(x, dtype=float) + self.b_array

    def to_dict(self) -> dict:
        return jsonable({"A": self.A, "b": self.b, "vertex_perm": list(self.vertex_perm)})


def symmetry_group_dict(syms: list[AffineSymmetry]) -> dict:
    return {"order": len(syms), "maps": [s.to_dict() for s in syms]}


def _affine_dim(rows, exact) -> int:
    if len(rows) <= 1:
        return 0
    diffs = [[a - b for a, b in zip(r, rows[0])] for r in rows[1:]]
    if exact:
        return scalars.rank(diffs)
    return int(np.linalg.matrix_rank(np.array(diffs, dtype=float), tol=1e-9))


def polytope_from_points(points, exact: bool | None = None) -> Polytope:
    """Extreme points by LP: a point is extreme iff it is not a convex combination of the others."""
    if exact is None:
        exact = all(isinstance(v, (int, Fraction, str)) for row in points for v in row)
    if exact:
        pts = tuple(tuple(scalars.to_fraction(v) for v in row) for row in points)
    else:
        pts = tuple(tuple(float(v) for v in row) for row in points)
    first: dict[tuple, int] = {}
    for i, p in enumerate(pts):
        first.setdefault(p, i)
    unique = sorted(first.values())
    vertices = []
    for i in unique:
        others = [pts[j] for j in unique if j != i]
        if not others or convex_weights(others, pts[i], exact=exact) is None:
            vertices.append(i)
    vpts = [pts[i] for i in vertices]
    weights = {}
    for i in range(len(pts)):
        if i not in vertices:
            weights[i] = tuple(convex_weights(vpts, pts[i], exact=exact))
    return Polytope(pts, tuple(vertices), _affine_dim(list(pts), exact), exact, weights)


def momentum_polytope(fam: FiniteExpFam) -> Polytope:
    """conv{F_i} with its extreme points (exact for rational families)."""
    return polytope_from_points(fam.F if fam.exact else fam.F_array.tolist(), exact=fam.exact)


def _affine_basis(vpts, exact) -> list[int]:
    chosen = [0]
    for k in range(1, len(vpts)):
        trial = chosen + [k]
        if _affine_dim([vpts[i] for i in trial], exact) == len(trial) - 1:
            chosen = trial
    return chosen


def _grid_key(p) -> tuple:
    return tuple(int(round(float(v) / ROUND_GRID)) for v in p)


def affine_symmetries(poly: Polytope) -> list[AffineSymmetry]:
    """Affine bijections of R^n mapping the polytope onto itself.

    Each symmetry is fixed by the images of ``n + 1`` affinely independent
    vertices, so candidate images of that basis are enumerated and the induced
    map is checked to permute the whole vertex set.
    """
    V = len(poly.vertices)
    if V > MAX_VERTICES:
        raise TooManyVertices(f"{V} vertices exceed the guard of {MAX_VERTICES}")
    n = poly.n
    if poly.dim != n:
        raise ValueError(f"polytope has affine dimension {poly.dim} < {n}")
    exact = poly.exact
    vpts = [poly.points[i] for i in poly.vertices]
    basis = _affine_basis(vpts, exact)
    if exact:
        inv = scalars.inverse([[*vpts[i], 1] for i in basis])
        lookup = {p: k for k, p in enumerate(vpts)}
        rows = [[*p, Fraction(1)] for p in vpts]
    else:
        Vf = np.array(vpts, dtype=float)
        inv_f = np.linalg.inv(np.hstack([Vf[basis], np.ones((n + 1, 1))]))
        lookup = {_grid_key(p): k for k, p in enumerate(vpts)}
        rows_f = np.hstack([Vf, np.ones((V, 1))])

    out = []
    for images in itertools.permutations(range(V), n + 1):
        if exact:
            X = scalars.matmul(inv, [list(vpts[k]) for k in images])  # rows: A^T, then b
            img = [tuple(sum((r[a] * X[a][j] for a in range(n + 1)), Fraction(0)) for j in range(n))
                   for r in rows]
            perm = tuple(lookup.get(p, -1) for p in img)
        else:
            X = inv_f @ Vf[list(images)]
            img = rows_f @ X
            perm = tuple(lookup.get(_grid_key(p), -1) for p in img)
            if -1 not in perm and np.abs(img - Vf[list(perm)]).max() > ROUND_GRID:
                continue
        if -1 in perm or len(set(perm)) != V:
            continue
        A = tuple(tuple(X[a][j] for a in range(n)) for j in range(n))  # A = (A^T)^T
        if exact:
            if scalars.det([list(r) for r in A]) == 0:
                continue
            b = tuple(X[n])
        else:
            A = tuple(tuple(float(v) for v in r) for r in A)
            b = tuple(float(v) for v in X[n])
        out.append(AffineSymmetry(A, b, perm))
    out.sort(key=lambda s: s.vertex_perm)
    return out


def interior_samples(fam: FiniteExpFam, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Random points of the open polytope: Dirichlet(2) mixtures of the F rows."""
    lam = rng.dirichlet(np.full(fam.m, 2.0), size=count)
    return list(lam @ fam.F_array)


def metric_symmetries(fam: FiniteExpFam, samples=7, tol: float = 1e-7,
                      rng: np.random.Generator | None = None,
                      poly: Polytope | None = None) -> list[AffineSymmetry]:
    """Polytope symmetries that are isometries of the dual metric ``k``.

    Keeps ``g(x) = A x + b`` iff ``A^T k(A eta + b) A = k(eta)`` at every sample.
    ``samples`` is either a count of random interior points or a list of them.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if isinstance(samples, int):
        samples = interior_samples(fam, samples, rng)
    poly = momentum_polytope(fam) if poly is None else poly
    base = [(eta, dual_metric(fam, eta, check_interior=False)) for eta in samples]
    kept = []
    for sym in affine_symmetries(poly):
        A = sym.A_array
        ok = True
        for eta, k0 in base:
            k1 = dual_metric(fam, sym(eta), check_interior=False)
            if np.abs(A.T @ k1 @ A - k0).max() > tol * max(1.0, float(np.abs(k0).max())):
                ok = False
                break
        if ok:
            kept.append(sym)
    return kept


def induced_eta_map(element) -> tuple[np.ndarray, np.ndarray]:
    """Affine map ``eta -> A^{-T} (eta - u)`` of a Weyl element, which sends F_j to F_{sigma^{-1}(j)}."""
    M = np.linalg.inv(element.A_array).T
    return M, -M @ element.u_array


def _vertex_action(fam: FiniteExpFam, poly: Polytope, element) -> tuple[int, ...]:
    sigma = element.sigma
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inv[s] = i
    pos = {row_index: k for k, row_index in enumerate(poly.vertices)}
    first = {}
    for i, p in enumerate(poly.points):
        first.setdefault(p, i)
    if fam.exact:
        Ainv_T = scalars.transpose(scalars.inverse([list(r) for r in element.A]))
    else:
        M, off = induced_eta_map(element)
    perm = []
    for j in poly.vertices:
        target = inv[j]
        if fam.exact:
            shifted = [[a - b for a, b in zip(poly.points[j], element.u)]]
            img = tuple(scalars.matmul(shifted, scalars.transpose(Ainv_T))[0])
            if img != poly.points[target]:
                raise AssertionError(f"eta-map of {sigma} does not send F_{j} to F_{target}")
        else:
            img = M @ np.array(poly.points[j]) + off
            if np.abs(img - np.array(poly.points[target])).max() > 1e-7:
                raise AssertionError(f"eta-map of {sigma} does not send F_{j} to F_{target}")
        rep = first[poly.points[target]]
        if rep not in pos:
            raise AssertionError(f"eta-map of {sigma} sends a vertex to a non-vertex")
        perm.append(pos[rep])
    return tuple(perm)


def cross_validate(fam: FiniteExpFam, weyl_report=None, samples=7, tol: float = 1e-7,
                   seed: int = 0) -> CheckReport:
    """Compare the permutation/witness group with the metric-filtered polytope group.

    Passes iff both groups have the same order and induce the same set of
    permutations of the extreme points.  Raises Mismatch otherwise.
    """
    from .weyl import enumerate_weyl

    if not fam.injective:
        raise ValueError("cross validation requires pairwise distinct F rows")
    if weyl_report is None:
        weyl_report = enumerate_weyl(fam)
    poly = momentum_polytope(fam)
    rng = np.random.default_rng(seed)
    metric = metric_symmetries(fam, samples, tol, rng, poly)
    from_weyl = {}
    for e in weyl_report.elements:
        from_weyl[_vertex_action(fam, poly, e)] = e
    from_poly = {s.vertex_perm: s for s in metric}
    details = {
        "weyl_order": weyl_report.order,
        "polytope_order": len(affine_symmetries(poly)),
        "metric_order": len(metric),
        "vertices": list(poly.vertices),
    }
    if len(from_weyl) != weyl_report.order or set(from_weyl) != set(from_poly):
        extra = sorted(set(from_weyl) ^ set(from_poly))
        offending = extra[0] if extra else None
        element = from_weyl.get(offending) or from_poly.get(offending)
        report = CheckReport("cross validation", False, 1.0, tol, {**details, "offending": offending})
        raise Mismatch(f"Weyl group (order {weyl_report.order}) and metric polytope group "
                       f"(order {len(metric)}) differ at vertex action {offending}",
                       weyl_report.order, len(metric), element, report)
    return CheckReport("cross validation", True, 0.0, tol, details)


def check_mean_map_containment(fam: FiniteExpFam, thetas) -> CheckReport:
    """eta(theta) has strictly positive convex coefficients over the F rows."""
    worst = np.inf
    pts = fam.F_array.tolist()
    for th in thetas:
        slack = interior_slack(pts, mean_params(fam, th).tolist(), exact=False)
        worst = min(worst, -1.0 if slack is None else slack)
    return CheckReport("mean map containment", bool(worst > 0), float(worst), 0.0,
                       {"points": len(thetas), "min_slack": float(worst)})
