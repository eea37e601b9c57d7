"""Kähler structure on the tangent bundle of a dually flat family, in (q, r) coordinates.

A tangent vector ``u = sum_j r_j d/dx_j`` at the point with affine coordinates
``x = q`` gets the metric ``diag(h(q), h(q))`` and the complex structure
``J(v, w) = (-w, v)``.  Everything here is pointwise linear algebra plus a
finite-difference check that the Kähler form is closed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonAffineChange
from .expfam import FiniteExpFam, christoffel_alpha, fisher, raise_index
from .report import CheckReport

FD_STEP = 1e-3


@dataclass(frozen=True)
class KahlerPointData:
    theta: np.ndarray
    fiber: np.ndarray
    g: np.ndarray
    omega: np.ndarray
    J: np.ndarray


@dataclass(frozen=True)
class AffineChange:
    """Reparametrisation ``theta = matrix @ x + offset`` of the natural coordinates."""

    matrix: np.ndarray
    offset: np.ndarray

    @classmethod
    def identity(cls, n: int) -> "AffineChange":
        return cls(np.eye(n), np.zeros(n))

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float) + self.offset


def complex_structure(n: int) -> np.ndarray:
    """Integer matrix of ``(v, w) -> (-w, v)``."""
    I = np.eye(n, dtype=int)
    Z = np.zeros((n, n), dtype=int)
    return np.block([[Z, -I], [I, Z]])


def kahler_at(fam: FiniteExpFam, theta, fiber) -> KahlerPointData:
    theta = np.asarray(theta, dtype=float)
    fiber = np.asarray(fiber, dtype=float)
    if fiber.shape != (fam.n,):
        raise ValueError(f"fiber must have length {fam.n}")
    h = fisher(fam, theta).entries
    Z = np.zeros_like(h)
    g = np.block([[h, Z], [Z, h]])
    J = complex_structure(fam.n)
    omega = J.T @ g  # omega(X, Y) = g(JX, Y)
    return KahlerPointData(theta, fiber, g, omega, J)


def _as_affine(change, n: int, point) -> AffineChange:
    if change is None:
        return AffineChange.identity(n)
    if isinstance(change, AffineChange):
        M = np.asarray(change.matrix, dtype=float)
        if M.shape != (n, n) or abs(np.linalg.det(M)) < 1e-12:
            raise ValueError("coordinate change must be an invertible n x n affine map")
        return change
    if not callable(change):
        raise TypeError("coordinate change must be an AffineChange or a callable")
    return _affine_from_callable(change, n, point)


def _affine_from_callable(f: Callable, n: int, point, step: float = 1e-2,
                          tol: float = 1e-8) -> AffineChange:
    x0 = np.asarray(point, dtype=float)
    f0 = np.asarray(f(x0), dtype=float)
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        fp, fm = np.asarray(f(x0 + e), float), np.asarray(f(x0 - e), float)
        second = fp - 2 * f0 + fm
        if np.abs(second).max() > tol * max(1.0, np.abs(f0).max()):
            raise NonAffineChange(f"coordinate change is not affine along axis {i}")
        cols.append((fp - fm) / (2 * step))
    M = np.column_stack(cols)
    for i, j in itertools.combinations(range(n), 2):
        e = np.zeros(n)
        e[i] = e[j] = step
        mixed = np.asarray(f(x0 + e), float) - f0 - M @ e
        if np.abs(mixed).max() > tol * max(1.0, np.abs(f0).max()):
            raise NonAffineChange(f"coordinate change is not affine in the ({i},{j}) plane")
    if abs(np.linalg.det(M)) < 1e-12:
        raise ValueError("coordinate change is singular")
    return AffineChange(M, f0 - M @ x0)


def connector_at(fam: FiniteExpFam, coordinate_change, point, tangent) -> np.ndarray:
    """Connector of the exponential connection applied to a vector of T(TM).

    ``point = (q, r)`` and ``tangent = (dq, dr)`` are length-2n vectors in the
    chart induced by the coordinates ``x`` with ``theta = T(x)``.  Returns
    ``sum_a dq_a Gamma^k_{aj} r_j + dr_k`` in the basis ``d/dx_k``.
    """
    n = fam.n
    point = np.asarray(point, dtype=float)
    tangent = np.asarray(tangent, dtype=float)
    if point.shape != (2 * n,) or tangent.shape != (2 * n,):
        raise ValueError(f"point and tangent must have length {2 * n}")
    q, r = point[:n], point[n:]
    dq, dr = tangent[:n], tangent[n:]
    T = _as_affine(coordinate_change, n, q)
    M = np.asarray(T.matrix, dtype=float)
    theta = T(q)
    gamma_theta = raise_index(fam, theta, christoffel_alpha(fam, theta, 1).entries)
    # affine changes add no second-derivative term
    Minv = np.linalg.inv(M)
    gamma_x = np.einsum("kl,lpq,pi,qj->kij", Minv, gamma_theta, M, M)
    return np.einsum("a,kaj,j->k", dq, gamma_x, r) + dr


def _omega_field(fam, z):
    n = fam.n
    return kahler_at(fam, z[:n], z[n:]).omega


def exterior_derivative(fam: FiniteExpFam, z, step: float = FD_STEP) -> np.ndarray:
    """``(d omega)_{XYZ}`` over all coordinate triples of the (q, r) chart."""
    z = np.asarray(z, dtype=float)
    N = z.size
    dW = np.empty((N, N, N))  # dW[x] = d omega / d z_x
    for x in range(N):
        e = np.zeros(N)
        e[x] = step
        dW[x] = (_omega_field(fam, z + e) - _omega_field(fam, z - e)) / (2 * step)
    return (dW
            - dW.transpose(1, 0, 2)
            + dW.transpose(1, 2, 0))


def check_kahler(fam: FiniteExpFam, theta_grid, fd_step: float = FD_STEP,
                 tol: float = 1e-6, fiber=None) -> CheckReport:
    """Pointwise Kähler checks on a theta grid.

    J^2 = -I is checked exactly on the integer matrix, compatibility and
    antisymmetry to 1e-12, and closedness of omega by central differences.
    """
    n = fam.n
    J = complex_structure(n)
    j_squared = bool(np.array_equal(J @ J, -np.eye(2 * n, dtype=int)))
    fiber = np.full(n, 0.5) if fiber is None else np.asarray(fiber, dtype=float)
    compat = antisym = d_omega = 0.0
    min_det = np.inf
    for th in theta_grid:
        data = kahler_at(fam, th, fiber)
        compat = max(compat, float(np.abs(J.T @ data.g @ J - data.g).max()),
                     float(np.abs(data.g @ J + J.T @ data.g).max()))
        antisym = max(antisym, float(np.abs(data.omega + data.omega.T).max()))
        min_det = min(min_det, abs(float(np.linalg.det(data.omega))))
        dw = exterior_derivative(fam, np.concatenate([th, fiber]), fd_step)
        d_omega = max(d_omega, float(np.abs(dw).max()))
    passed = (j_squared and compat <= 1e-12 and antisym <= 1e-12
              and min_det > 0 and d_omega <= tol)
    return CheckReport("kahler", passed, d_omega, tol, {
        "J_squared_is_minus_identity": j_squared,
        "compatibility_residual": compat,
        "antisymmetry_residual": antisym,
        "min_abs_det_omega": min_det,
        "points": len(theta_grid),
    })
