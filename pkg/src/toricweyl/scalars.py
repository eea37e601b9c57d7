"""Exact scalars: rationals, rational combinations of logarithms, and Fraction linear algebra.

Log-weights such as ``ln(n choose k)`` are kept exact as elements of the
Q-vector space spanned by ``1`` and ``ln(p)`` for primes ``p``.  These are
linearly independent over Q (Lindemann together with unique factorisation),
so equality of two such values is decidable by comparing coefficients.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Iterable, Sequence

Scalar = Fraction  # exact entries of F and of witness matrices


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, ``"p/q"`` strings or decimal literals to a Fraction.

    Floats are read through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@total_ordering
class LogRational:
    """``r + sum_p a_p ln(p)`` with rational ``r`` and ``a_p``, ``p`` prime."""

    __slots__ = ("rational", "logs")

    def __init__(self, rational=0, logs: dict[int, Fraction] | None = None):
        self.rational = to_fraction(rational)
        items = {} if logs is None else {int(p): Fraction(a) for p, a in logs.items() if a != 0}
        self.logs = tuple(sorted(items.items()))

    @classmethod
    def ln(cls, value) -> "LogRational":
        q = to_fraction(value)
        if q <= 0:
            raise ValueError(f"ln of non-positive value {q}")
        logs: dict[int, Fraction] = {}
        for p, e in _factor(q.numerator).items():
            logs[p] = logs.get(p, 0) + e
        for p, e in _factor(q.denominator).items():
            logs[p] = logs.get(p, 0) - e
        return cls(0, logs)

    @classmethod
    def coerce(cls, value) -> "LogRational":
        if isinstance(value, LogRational):
            return value
        return cls(to_fraction(value))

    @property
    def is_rational(self) -> bool:
        return not self.logs

    def components(self) -> dict:
        """Coordinates in the basis {1, ln 2, ln 3, ...}; key ``1`` is the rational part."""
        out = {1: self.rational} if self.rational else {}
        out.update(dict(self.logs))
        return out

    def exp(self) -> Fraction:
        """``exp`` of the value when it is a rational number, else ValueError."""
        if self.rational != 0 or any(a.denominator != 1 for _, a in self.logs):
            raise ValueError(f"exp({self}) is not rational")
        out = Fraction(1)
        for p, a in self.logs:
            out *= Fraction(p) ** int(a)
        return out

    def __float__(self) -> float:
        return float(self.rational) + sum(float(a) * math.log(p) for p, a in self.logs)

    def _binary(self, other, sign):
        other = LogRational.coerce(other)
        logs = dict(self.logs)
        for p, a in other.logs:
            logs[p] = logs.get(p, 0) + sign * a
        return LogRational(self.rational + sign * other.rational, logs)

    def __add__(self, other):
        if not isinstance(other, (LogRational, int, Fraction)):
            return NotImplemented
        return self._binary(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (LogRational, int, Fraction)):
            return NotImplemented
        return self._binary(other, -1)

    def __rsub__(self, other):
        return LogRational.coerce(other)._binary(self, -1)

    def __neg__(self):
        return LogRational(-self.rational, {p: -a for p, a in self.logs})

    def __mul__(self, other):
        if isinstance(other, LogRational):
            if other.is_rational:
                other = other.rational
            elif self.is_rational:
                return other * self.rational
            else:
                raise TypeError("product of two logarithmic values is not representable")
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        k = Fraction(other)
        return LogRational(self.rational * k, {p: a * k for p, a in self.logs})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LogRational) and other.is_rational:
            other = other.rational
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self * (1 / Fraction(other))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LogRational(other)
        if not isinstance(other, LogRational):
            return NotImplemented
        return self.rational == other.rational and self.logs == other.logs

    def __lt__(self, other):
        return float(self) < float(LogRational.coerce(other))

    def __hash__(self):
        if not self.logs:
            return hash(self.rational)
        return hash((self.rational, self.logs))

    def __repr__(self):
        return f"LogRational({str(self)!r})"

    def __str__(self):
        parts = []
        if self.rational != 0 or not self.logs:
            parts.append(str(self.rational))
        for p, a in self.logs:
            if a == 1:
                term = f"ln({p})"
            elif a == -1:
                term = f"-ln({p})"
            else:
                term = f"{a}*ln({p})"
            parts.append(term)
        text = "+".join(parts)
        return text.replace("+-", "-")


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:
           (?P<coef>\d+(?:/\d+)?|\d*\.\d+(?:[eE][+-]?\d+)?)\s*(?P<star>\*)?\s*
        )?
        (?:ln\(\s*(?P<arg>\d+(?:/\d+)?)\s*\))?\s*""",
    re.VERBOSE,
)


def parse_log_rational(text) -> LogRational:
    """Parse ``"0"``, ``"1/7"``, ``"ln(2)"``, ``"2*ln(3)-1/2"`` and friends."""
    if isinstance(text, LogRational):
        return text
    if not isinstance(text, str):
        return LogRational(to_fraction(text))
    s = text.strip()
    if not s:
        raise ValueError("empty scalar")
    pos = 0
    total = LogRational(0)
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        coef, arg = m.group("coef"), m.group("arg")
        if coef is None and arg is None:
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        if m.group("star") and arg is None:
            raise ValueError(f"dangling '*' in {text!r}")
        if coef is not None and arg is not None and not m.group("star"):
            raise ValueError(f"missing '*' between coefficient and ln in {text!r}")
        k = to_fraction(coef) if coef is not None else Fraction(1)
        if m.group("sign") == "-":
            k = -k
        term = LogRational.ln(arg) * k if arg is not None else LogRational(k)
        total = total + term
        pos = m.end()
        if pos < len(s) and s[pos] not in "+-":
            raise ValueError(f"cannot parse {text!r} at position {pos}")
    return total


def log_value_float(text) -> float:
    """Float value of a scalar literal accepted by :func:`parse_log_rational`."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    return float(parse_log_rational(text))


# ---------------------------------------------------------------------------
# Fraction linear algebra
# ---------------------------------------------------------------------------

Matrix = list[list[Fraction]]


def as_fraction_matrix(rows: Iterable[Iterable]) -> Matrix:
    return [[to_fraction(x) for x in row] for row in rows]


def row_echelon(rows: Sequence[Sequence[Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns, exact."""
    a = [list(r) for r in rows]
    if not a:
        return a, []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a, pivots


def rank(rows) -> int:
    return len(row_echelon(as_fraction_matrix(rows))[1])


def inverse(rows) -> Matrix:
    a = as_fraction_matrix(rows)
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("inverse of a non-square matrix")
    aug = [r + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    red, piv = row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in red]


def det(rows) -> Fraction:
    a = as_fraction_matrix(rows)
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            out = -out
        out *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return out


def matmul(a, b):
    """Product of nested-list matrices whose entries support + and *."""
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), start=0 * row[0]) for col in bt] for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def independent_rows(rows) -> list[int]:
    """Indices of a maximal set of linearly independent rows, greedy in index order."""
    a = as_fraction_matrix(rows)
    chosen: list[int] = []
    basis: Matrix = []
    for i, row in enumerate(a):
        trial = basis + [row]
        if len(row_echelon(trial)[1]) == len(trial):
            basis = trial
            chosen.append(i)
    return chosen
