"""Exception hierarchy shared across the package."""


class DqlabError(Exception):
    """Base class for all library errors."""


class MalformedIntervalError(DqlabError):
    """An interval with lo > hi was supplied; carries the offending index."""

    def __init__(self, index, lo, hi):
        self.index = index
        self.lo = lo
        self.hi = hi
        super().__init__(f"interval #{index} is malformed: lo={lo} > hi={hi}")


class UndefinedDensityError(DqlabError):
    """Density requested against a null reference set."""


class CannotSampleError(DqlabError):
    """Point sampling requested from a null set."""


class DomainError(DqlabError):
    """A point lies outside the function's domain."""


class AmbiguousDerivativeError(DqlabError):
    """Derivative requested at a non-C1 join; carries both one-sided slopes."""

    def __init__(self, x, left_slope, right_slope):
        self.x = x
        self.left_slope = left_slope
        self.right_slope = right_slope
        super().__init__(
            f"derivative at x={x} is ambiguous: left={left_slope}, right={right_slope}"
        )


class DiagonalError(DqlabError):
    """Difference quotient requested on the diagonal x1 == x2."""


class SplitRequiredError(DqlabError):
    """An image-measure request hit a piece whose slope changes sign inside
    the queried region; the caller must refine at the extremum."""


class DegenerateMapError(DqlabError):
    """Affine conjugation with a = 0."""


class PreconditionError(DqlabError):
    """A theorem pipeline's stated precondition failed."""


class SearchFailureError(DqlabError):
    """No density point found at the configured radii schedule."""

    def __init__(self, radii, message="no density point found"):
        self.radii = list(radii)
        super().__init__(f"{message} (radii tried: {self.radii})")


class DensityTooLowError(DqlabError):
    """A rotation-scan window misses the Lemma density threshold."""

    def __init__(self, achieved, required):
        self.achieved = achieved
        self.required = required
        super().__init__(f"window density {achieved} below required {required}")


class ThetaTooLargeError(DqlabError):
    """The rotation scan broke down at some angle; carries the largest
    admissible angle found by bisection."""

    def __init__(self, theta, admissible):
        self.theta = theta
        self.admissible = admissible
        super().__init__(
            f"scan failed at theta={theta}; largest admissible angle ~ {admissible}"
        )


class PairDegenerateError(DqlabError):
    """The chosen pair violates the secant-vs-derivative separation condition."""


class SchemaError(DqlabError):
    """A JSON spec file is malformed; carries the offending field name."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"field '{field}': {message}")
