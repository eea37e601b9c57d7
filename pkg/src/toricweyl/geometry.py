"""Legendre duality between natural and expectation parameters.

The mean map ``theta -> eta = grad psi(theta)`` is inverted by damped Newton
iteration; the dual metric on the interior of the momentum polytope is the
inverse Fisher metric transported along this map.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NoConvergence, OutsidePolytope
from .expfam import FiniteExpFam, christoffel_alpha, fisher, log_partition, mean_params
from .lp import interior_slack
from .report import CheckReport

FD_STEP = 1e-4
FLOAT_SLACK = 1e-9


@dataclass(frozen=True)
class DualPoint:
    eta: np.ndarray
    theta: np.ndarray
    phi: float
    k: np.ndarray
    iterations: int
    residual: float


def _coords(eta) -> list:
    return [Fraction(v) if isinstance(v, str) else v for v in eta]


def is_interior(fam: FiniteExpFam, eta) -> bool:
    """True iff ``eta`` lies strictly inside conv{F_i}.

    Exact when the family is rational and ``eta`` is given as ints/Fractions.
    """
    eta = _coords(eta)
    if len(eta) != fam.n:
        raise ValueError(f"eta must have length {fam.n}")
    exact = fam.exact and all(isinstance(v, (int, Fraction)) for v in eta)
    if exact:
        slack = interior_slack(fam.F, eta, exact=True)
        return slack is not None and slack > 0
    slack = interior_slack(fam.F_array.tolist(), [float(v) for v in eta], exact=False)
    return slack is not None and slack > FLOAT_SLACK


def legendre_dual_point(fam: FiniteExpFam, eta, tol: float = 1e-10, max_iter: int = 100,
                        check_interior: bool = True) -> DualPoint:
    """Solve ``grad psi(theta) = eta`` by Newton's method with residual halving.

    Raises
    ------
    OutsidePolytope
        If ``eta`` is not strictly inside conv{F_i}.
    NoConvergence
        If the residual is still above ``tol`` after ``max_iter`` steps.
    """
    eta = _coords(eta)
    if check_interior and not is_interior(fam, eta):
        raise OutsidePolytope(f"eta = {list(eta)} is not strictly inside conv(F)")
    target = np.array([float(v) for v in eta])
    theta = np.zeros(fam.n)
    g = mean_params(fam, theta) - target
    r = float(np.linalg.norm(g))
    it = 0
    while r > tol:
        if it >= max_iter:
            raise NoConvergence(f"Newton stalled at residual {r:.3e} after {it} iterations")
        it += 1
        step = np.linalg.solve(fisher(fam, theta).entries, -g)
        s = 1.0
        while True:
            trial = theta + s * step
            g_trial = mean_params(fam, trial) - target
            r_trial = float(np.linalg.norm(g_trial))
            if r_trial < r:
                break
            s /= 2
            if s < 1e-12:
                raise NoConvergence(f"line search failed at residual {r:.3e}")
        theta, g, r = trial, g_trial, r_trial
    # one polishing step: cheap, and the theta error scales like r / min eig(h)
    if r > 0:
        it += 1
        trial = theta + np.linalg.solve(fisher(fam, theta).entries, -g)
        g_trial = mean_params(fam, trial) - target
        if np.linalg.norm(g_trial) <= r:
            theta, g, r = trial, g_trial, float(np.linalg.norm(g_trial))
    h = fisher(fam, theta).entries
    k = np.linalg.inv(h)
    k = (k + k.T) / 2
    phi = float(theta @ target - log_partition(fam, theta))
    return DualPoint(target, theta, phi, k, it, r)


def dual_metric(fam: FiniteExpFam, eta, **kwargs) -> np.ndarray:
    """Metric ``k(eta)`` on the interior of the momentum polytope."""
    return legendre_dual_point(fam, eta, **kwargs).k


def theta_grid(n: int, points_per_axis: int = 3, radius: float = 1.0) -> list[np.ndarray]:
    """Tensor grid in theta-space, ``points_per_axis ** n`` points in [-radius, radius]^n."""
    axis = np.linspace(-radius, radius, points_per_axis) if points_per_axis > 1 else np.zeros(1)
    return [np.array(p) for p in itertools.product(axis, repeat=n)]


def metric_derivative(fam: FiniteExpFam, theta, step: float = FD_STEP) -> np.ndarray:
    """``D[i, j, k] = d_i h_{jk}`` by central differences."""
    theta = np.asarray(theta, dtype=float)
    n = fam.n
    D = np.empty((n, n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        D[i] = (fisher(fam, theta + e).entries - fisher(fam, theta - e).entries) / (2 * step)
    return D


def check_duality_identity(fam: FiniteExpFam, theta_grid, alphas=(-1, 0, 1),
                           step: float = FD_STEP, tol: float = 1e-6) -> CheckReport:
    """Check ``d_i h_{jk} = Gamma^(a)_{ij,k} + Gamma^(-a)_{ik,j}`` on a grid."""
    worst = 0.0
    per_alpha = {}
    for a in alphas:
        w = 0.0
        for th in theta_grid:
            D = metric_derivative(fam, th, step)
            G = christoffel_alpha(fam, th, a).entries
            Gd = christoffel_alpha(fam, th, -a).entries
            rhs = G + Gd.transpose(0, 2, 1)  # rhs[i,j,k] = G[i,j,k] + Gd[i,k,j]
            w = max(w, float(np.abs(D - rhs).max()))
        per_alpha[str(a)] = w
        worst = max(worst, w)
    return CheckReport("duality identity", worst <= tol, worst, tol,
                       {"per_alpha": per_alpha, "points": len(theta_grid)})


def check_dual_affinity(fam: FiniteExpFam, witness, samples, tol: float = 1e-6) -> CheckReport:
    """Test that a theta-affine symmetry induces an affine map of eta-space.

    The induced map is ``eta(theta) -> eta(A theta + B)``.  An affine map is
    fitted on ``n + 1`` affinely independent sample images and the remaining
    samples are checked against it.
    """
    A = witness.A_array
    B = witness.B_array
    n = fam.n
    samples = [np.asarray(s, dtype=float) for s in samples]
    if len(samples) < n + 2:
        raise ValueError(f"need at least n + 2 = {n + 2} samples")
    src = np.array([mean_params(fam, s) for s in samples])
    dst = np.array([mean_params(fam, A @ s + B) for s in samples])

    base: list[int] = []
    for i in range(len(samples)):
        trial = base + [i]
        diffs = src[trial[1:]] - src[trial[0]] if len(trial) > 1 else np.zeros((0, n))
        if len(trial) == 1 or np.linalg.matrix_rank(diffs, tol=1e-8) == len(trial) - 1:
            base = trial
        if len(base) == n + 1:
            break
    if len(base) < n + 1:
        raise ValueError("samples do not affinely span eta-space")
    X = np.hstack([src[base], np.ones((n + 1, 1))])
    coef = np.linalg.solve(X, dst[base])  # rows: M^T then offset
    M, b = coef[:n].T, coef[n]
    rest = [i for i in range(len(samples)) if i not in base]
    pred = src[rest] @ M.T + b
    worst = float(np.abs(pred - dst[rest]).max()) if rest else 0.0
    return CheckReport("dual affinity", worst <= tol, worst, tol,
                       {"matrix": M, "offset": b, "checked": len(rest)})


def legendre_roundtrip(fam: FiniteExpFam, theta, **kwargs) -> tuple[float, DualPoint]:
    """Error of theta -> eta -> theta and the dual point reached."""
    theta = np.asarray(theta, dtype=float)
    dp = legendre_dual_point(fam, mean_params(fam, theta), check_interior=False, **kwargs)
    return float(np.abs(dp.theta - theta).max()), dp
