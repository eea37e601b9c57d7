"""Exception types raised across the package."""


class ToricWeylError(Exception):
    """Base class for all package errors."""


class RankDeficient(ToricWeylError, ValueError):
    """The functions 1, F^1, ..., F^n are not linearly independent."""


class DuplicateLabel(ToricWeylError, ValueError):
    pass


class PositivityLost(ToricWeylError, ArithmeticError):
    """A Cholesky pivot of the Fisher metric was not positive."""


class OutsidePolytope(ToricWeylError, ValueError):
    """An expectation parameter is not strictly inside conv{F_i}."""


class NoConvergence(ToricWeylError, RuntimeError):
    pass


class NonAffineChange(ToricWeylError, ValueError):
    pass


class TooLarge(ToricWeylError, ValueError):
    """Exhaustive enumeration would exceed the configured size guard."""


class TooManyVertices(TooLarge):
    pass


class NotInSpan(ToricWeylError, ValueError):
    """A function on the sample space is not in span{1, F^1, ..., F^n}."""


class SingularBasis(ToricWeylError, ValueError):
    pass


class NonIntegral(ToricWeylError, ValueError):
    """The torus representation of a Weyl element is not in GL(n, Z)."""

    def __init__(self, message, matrix=None, offending=None):
        super().__init__(message)
        self.matrix = matrix
        self.offending = offending or []


class Mismatch(ToricWeylError, AssertionError):
    """The two Weyl group algorithms disagree."""

    def __init__(self, message, weyl_order=None, polytope_order=None, element=None, report=None):
        super().__init__(message)
        self.weyl_order = weyl_order
        self.polytope_order = polytope_order
        self.element = element
        self.report = report


class FamilyParseError(ToricWeylError, ValueError):
    pass
