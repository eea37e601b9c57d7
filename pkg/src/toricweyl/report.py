from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .scalars import LogRational


@dataclass
class CheckReport:
    """Outcome of a numerical verification: pass flag, worst residual, tolerance."""

    name: str
    passed: bool
    max_residual: float = 0.0
    tol: float = 0.0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return jsonable({
            "name": self.name,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "details": self.details,
        })

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: max residual {self.max_residual:.3e} (tol {self.tol:.1e})"


def jsonable(obj):
    """Convert numpy arrays, Fractions and LogRationals to JSON-friendly values.

    Exact scalars become strings (``"1/7"``, ``"ln(2)"``) so they survive a
    round trip; floats are kept as floats.
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (Fraction, LogRational)):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj
