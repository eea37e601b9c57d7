"""Finite exponential families p(x_i; theta) = exp(C_i + <theta, F_i> - psi(theta)).

Two scalar backends are supported.  With ``backend="rational"`` the data
(C, F) are stored exactly (``F`` as Fractions, ``C`` as
:class:`~toricweyl.scalars.LogRational`), which lets the symmetry search
decide its linear systems exactly.  Transcendental quantities (psi, p, the
Fisher metric) are always evaluated in floating point unless an exact
evaluation is explicitly requested and possible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import scalars
from .errors import DuplicateLabel, FamilyParseError, PositivityLost, RankDeficient
from .scalars import LogRational, parse_log_rational, to_fraction

BACKENDS = ("rational", "float")
DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteExpFam:
    """A validated exponential family over the finite set ``labels``.

    Build instances with :func:`new_family`, :func:`categorical` or
    :func:`binomial`; the constructor itself does not validate.
    """

    labels: tuple[str, ...]
    C: tuple
    F: tuple[tuple, ...]
    backend: str = "rational"
    tol: float = DEFAULT_TOL

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.F[0])

    @property
    def exact(self) -> bool:
        return self.backend == "rational"

    @cached_property
    def F_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.F], dtype=float)

    @cached_property
    def C_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.C], dtype=float)

    @cached_property
    def injective(self) -> bool:
        return len(set(self.F)) == self.m

    def __eq__(self, other):
        if not isinstance(other, FiniteExpFam):
            return NotImplemented
        return (self.labels, self.C, self.F, self.backend) == (
            other.labels, other.C, other.F, other.backend)

    def __hash__(self):
        return hash((self.labels, self.C, self.F, self.backend))

    def __repr__(self):
        return f"FiniteExpFam(m={self.m}, n={self.n}, backend={self.backend!r})"


@dataclass(frozen=True)
class MetricTensor:
    theta: np.ndarray
    entries: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class ChristoffelArray:
    """Lowered coefficients ``entries[i, j, k] = Gamma^(alpha)_{ij,k}``."""

    theta: np.ndarray
    alpha: float
    entries: np.ndarray = field(repr=False)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def new_family(labels: Sequence, C: Sequence, F: Sequence[Sequence], backend: str = "rational",
               tol: float = DEFAULT_TOL) -> FiniteExpFam:
    """Validate and build a family.

    Raises
    ------
    DuplicateLabel
        If two outcomes share a label.
    RankDeficient
        If ``[1 | F]`` has rank below ``n + 1``.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    labels = tuple(str(x) for x in labels)
    if len(set(labels)) != len(labels):
        seen = set()
        dup = next(x for x in labels if x in seen or seen.add(x))
        raise DuplicateLabel(f"duplicate outcome label {dup!r}")
    m = len(labels)
    if len(C) != m or len(F) != m:
        raise ValueError(f"expected {m} entries in C and rows in F, got {len(C)} and {len(F)}")
    if m == 0:
        raise ValueError("empty sample space")
    widths = {len(row) for row in F}
    if len(widths) != 1:
        raise ValueError("rows of F have different lengths")
    n = widths.pop()
    if n < 1:
        raise ValueError("F must have at least one column")

    if backend == "rational":
        Fq = tuple(tuple(to_fraction(v) for v in row) for row in F)
        Cq = tuple(parse_log_rational(c) for c in C)
        r = scalars.rank([[Fraction(1), *row] for row in Fq])
    else:
        Fq = tuple(tuple(float(v) if not isinstance(v, str) else float(Fraction(v)) for v in row)
                   for row in F)
        Cq = tuple(scalars.log_value_float(c) for c in C)
        M = np.hstack([np.ones((m, 1)), np.array(Fq, dtype=float)])
        s = np.linalg.svd(M, compute_uv=False)
        r = int(np.sum(s > tol * max(1.0, s[0])))
    if r < n + 1:
        raise RankDeficient(f"rank[1|F] = {r} < n + 1 = {n + 1}: 1, F^1..F^{n} are dependent")
    return FiniteExpFam(labels, Cq, Fq, backend, tol)


def categorical(m: int, backend: str = "rational") -> FiniteExpFam:
    """All positive distributions on ``m`` points, with ``F_i = e_i`` (i < m) and ``F_m = 0``."""
    if m < 2:
        raise ValueError(f"categorical family needs m >= 2, got {m}")
    F = [[int(i == j) for j in range(m - 1)] for i in range(m)]
    return new_family([f"x{i + 1}" for i in range(m)], [0] * m, F, backend)


def binomial(n: int, backend: str = "rational") -> FiniteExpFam:
    """Binomial(n, q) in natural coordinates: ``C_k = ln(n choose k)``, ``F_k = k``."""
    if n < 1:
        raise ValueError(f"binomial family needs n >= 1, got {n}")
    C = [LogRational.ln(math.comb(n, k)) for k in range(n + 1)]
    return new_family([str(k) for k in range(n + 1)], C, [[k] for k in range(n + 1)], backend)


def family_to_dict(fam: FiniteExpFam) -> dict:
    """JSON form ``{"labels", "C", "F", "backend"}``; exact entries become strings."""
    if fam.exact:
        C = [str(c) for c in fam.C]
        F = [[str(v) for v in row] for row in fam.F]
    else:
        C = [float(c) for c in fam.C]
        F = [[float(v) for v in row] for row in fam.F]
    return {"labels": list(fam.labels), "C": C, "F": F, "backend": fam.backend}


def family_from_dict(data, backend: str | None = None) -> FiniteExpFam:
    """Inverse of :func:`family_to_dict`.

    The backend is ``backend`` if given, else the ``"backend"`` field, else
    rational when every entry is an int or a string and float otherwise.
    Malformed input raises FamilyParseError naming the offending field.
    """
    if not isinstance(data, dict):
        raise FamilyParseError("family definition must be a JSON object")
    for key in ("C", "F"):
        if key not in data:
            raise FamilyParseError(f"missing required field {key!r}")
    C, F = data["C"], data["F"]
    if not isinstance(C, list):
        raise FamilyParseError("field 'C' must be a list")
    if not isinstance(F, list) or not all(isinstance(r, list) for r in F):
        raise FamilyParseError("field 'F' must be a list of lists")
    labels = data.get("labels", [f"x{i + 1}" for i in range(len(F))])
    if not isinstance(labels, list):
        raise FamilyParseError("field 'labels' must be a list")
    if backend is None:
        backend = data.get("backend")
    if backend is None:
        entries = [*C, *(v for r in F for v in r)]
        backend = "rational" if all(isinstance(v, (int, str)) and not isinstance(v, bool)
                                    for v in entries) else "float"
    if backend not in BACKENDS:
        raise FamilyParseError(f"field 'backend': unknown value {backend!r}")
    for i, row in enumerate(F):
        for j, v in enumerate(row):
            try:
                if isinstance(v, str) and "ln" in v:
                    raise ValueError("ln(...) is only allowed in C")
                to_fraction(v)
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise FamilyParseError(f"field F[{i}][{j}] = {v!r}: {exc}") from None
    for i, c in enumerate(C):
        try:
            parse_log_rational(c)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise FamilyParseError(f"field C[{i}] = {c!r}: {exc}") from None
    return new_family(labels, C, F, backend)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _theta(fam: FiniteExpFam, theta) -> np.ndarray:
    t = np.asarray(theta, dtype=float).reshape(-1)
    if t.shape != (fam.n,):
        raise ValueError(f"theta must have length {fam.n}, got shape {np.shape(theta)}")
    return t


def _exponents(fam, theta) -> np.ndarray:
    return fam.C_array + fam.F_array @ _theta(fam, theta)


def log_partition(fam: FiniteExpFam, theta) -> float:
    """psi(theta) = ln sum_i exp(C_i + <theta, F_i>), evaluated with a max shift."""
    s = _exponents(fam, theta)
    top = s.max()
    return float(top + np.log(np.exp(s - top).sum()))


def _exact_prob(fam: FiniteExpFam, theta) -> list[Fraction]:
    if not fam.exact:
        raise ValueError("exact evaluation requires the rational backend")
    if len(theta) != fam.n:
        raise ValueError(f"theta must have length {fam.n}")
    th = [parse_log_rational(t) if isinstance(t, str) else LogRational.coerce(t) for t in theta]
    weights = []
    for c, row in zip(fam.C, fam.F):
        e = c
        for t, f in zip(th, row):
            e = e + t * f
        weights.append(e.exp())
    total = sum(weights)
    return [w / total for w in weights]


def prob_vector(fam: FiniteExpFam, theta, exact: bool = False):
    """Probabilities ``p(x_i; theta)``.

    With ``exact=True`` (rational backend only) the result is a list of
    Fractions; this works whenever every ``exp(C_i + <theta, F_i>)`` is rational,
    e.g. binomial families at ``theta = 0``.  Otherwise ValueError.
    """
    if exact:
        return _exact_prob(fam, theta)
    s = _exponents(fam, theta)
    w = np.exp(s - s.max())
    return w / w.sum()


def _prob_and_stats(fam, theta, exact):
    if exact:
        p = np.array(_exact_prob(fam, theta), dtype=object)
        F = np.array(fam.F, dtype=object)
    else:
        p = prob_vector(fam, theta)
        F = fam.F_array
    return p, F


def mean_params(fam: FiniteExpFam, theta, exact: bool = False) -> np.ndarray:
    """eta = E[F] = grad psi(theta)."""
    p, F = _prob_and_stats(fam, theta, exact)
    return p @ F


def expectation(fam: FiniteExpFam, theta, X, exact: bool = False):
    """``sum_i p_i X_i`` for a function ``X`` on the sample space."""
    if len(X) != fam.m:
        raise ValueError(f"X must have length m = {fam.m}, got {len(X)}")
    p, _ = _prob_and_stats(fam, theta, exact)
    if exact:
        return sum(pi * to_fraction(x) for pi, x in zip(p, X))
    return float(p @ np.asarray(X, dtype=float))


def _theta_record(fam, theta, exact):
    if exact:
        vals = [parse_log_rational(t) if isinstance(t, (str, LogRational)) else to_fraction(t)
                for t in theta]
        return np.array([v.rational if isinstance(v, LogRational) and v.is_rational else v
                         for v in vals], dtype=object)
    return _theta(fam, theta).copy()


def _check_positive(entries, exact):
    if exact:
        n = entries.shape[0]
        for k in range(1, n + 1):
            if scalars.det(entries[:k, :k].tolist()) <= 0:
                raise PositivityLost(f"leading minor {k} is not positive")
        return
    try:
        np.linalg.cholesky(entries)
    except np.linalg.LinAlgError as exc:
        raise PositivityLost("Fisher metric lost positive definiteness") from exc


def fisher(fam: FiniteExpFam, theta, exact: bool = False) -> MetricTensor:
    """Fisher metric as the Hessian of psi: ``sum p_i F_i F_i^T - eta eta^T``.

    Raises PositivityLost if the result is not positive definite.
    """
    p, F = _prob_and_stats(fam, theta, exact)
    eta = p @ F
    h = (F.T * p) @ F - np.outer(eta, eta)
    h = (h + h.T) / 2 if not exact else h
    _check_positive(h, exact)
    return MetricTensor(_theta_record(fam, theta, exact), h)


def fisher_def(fam: FiniteExpFam, theta, exact: bool = False) -> MetricTensor:
    """Fisher metric as the expected outer product of scores, summed outcome by outcome."""
    p, F = _prob_and_stats(fam, theta, exact)
    eta = sum((pi * Fi for pi, Fi in zip(p, F)), start=0 * F[0])
    h = np.zeros((fam.n, fam.n), dtype=object if exact else float)
    if exact:
        h[:] = Fraction(0)
    for pi, Fi in zip(p, F):
        score = Fi - eta  # d/dtheta_i ln p(x; theta)
        h = h + pi * np.outer(score, score)
    return MetricTensor(_theta_record(fam, theta, exact), h)


def christoffel_alpha(fam: FiniteExpFam, theta, alpha, exact: bool = False) -> ChristoffelArray:
    """Lowered alpha-connection coefficients by summation over the sample space.

    ``Gamma_{ij,k} = E[(d_i d_j l + (1 - alpha)/2 d_i l d_j l) d_k l]`` with
    ``l = ln p``.  For exponential families ``d_i d_j l = -d_i d_j psi`` does
    not depend on the outcome.
    """
    p, F = _prob_and_stats(fam, theta, exact)
    eta = p @ F
    hess_l = -((F.T * p) @ F - np.outer(eta, eta))
    half = (1 - (to_fraction(alpha) if exact else float(alpha))) / 2
    n = fam.n
    G = np.zeros((n, n, n), dtype=object if exact else float)
    if exact:
        G[:] = Fraction(0)
    for pi, Fi in zip(p, F):
        s = Fi - eta
        inner = hess_l + half * np.outer(s, s)
        G = G + pi * inner[:, :, None] * s[None, None, :]
    if not exact:
        G = (G + G.transpose(1, 0, 2)) / 2
    return ChristoffelArray(_theta_record(fam, theta, exact), alpha, G)


def raise_index(fam: FiniteExpFam, theta, lowered: np.ndarray) -> np.ndarray:
    """Christoffel symbols of the second kind, ``Gamma^k_{ij} = h^{kl} Gamma_{ij,l}``."""
    hinv = np.linalg.inv(fisher(fam, theta).entries)
    return np.einsum("kl,ijl->kij", hinv, np.asarray(lowered, dtype=float))


# ---------------------------------------------------------------------------
# linear independence of exponentials
# ---------------------------------------------------------------------------

def exp_sample_matrix(vectors, xis) -> np.ndarray:
    """``M[s, i] = exp(<xi_s, v_i>)``."""
    V = np.asarray(vectors, dtype=float)
    X = np.asarray(xis, dtype=float)
    return np.exp(X @ V.T)


def check_exp_independence(vectors, rng: np.random.Generator, scale: float = 1.0) -> dict:
    """Sample the functions ``exp(<x, v_i>)`` at random points and test nonsingularity.

    Two matrices are examined: one at ``m`` independent Gaussian points, and the
    Vandermonde matrix obtained along a generic line ``x = s * xi``, where the
    determinant is ``prod_{i<j} (z_j - z_i)`` with ``z_i = exp(<xi, v_i>)``.
    """
    V = np.asarray(vectors, dtype=float)
    m, n = V.shape
    if len({tuple(v) for v in V.tolist()}) != m:
        raise ValueError("vectors must be pairwise distinct")
    M = exp_sample_matrix(V, rng.normal(scale=scale, size=(m, n)))
    sv = np.linalg.svd(M, compute_uv=False)
    ratio = float(sv[-1] / sv[0])
    rank_random = int(np.linalg.matrix_rank(M))

    xi = rng.normal(size=n)
    z = np.exp(V @ xi / max(1.0, float(np.abs(V @ xi).max())))
    gaps = [abs(z[j] - z[i]) / max(z[i], z[j]) for i in range(m) for j in range(i + 1, m)]
    min_gap = min(gaps) if gaps else 1.0
    return {
        "m": m,
        "rank": rank_random,
        "singular_ratio": ratio,
        "vandermonde_min_relative_gap": float(min_gap),
        "passed": rank_random == m and min_gap > 0.0,
    }
