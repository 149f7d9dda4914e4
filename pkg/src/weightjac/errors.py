"""Exception types shared across the package.

Input-level errors (bad forms, mismatched fields, parse failures) all derive
from WeightjacError so the CLI can map them to exit code 2 uniformly.
"""


class WeightjacError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(WeightjacError):
    """Malformed textual input (rational, element, form, lattice, hodge data)."""


class FieldMismatch(WeightjacError):
    """Operands live in different imaginary quadratic fields."""


class DivisionByZero(WeightjacError):
    """Division by the zero element."""


class RationalInput(WeightjacError):
    """A degree-2 operation was applied to a rational (degree-1) element."""


class InvalidForm(WeightjacError):
    """Not a primitive positive-definite binary quadratic form."""


class DiscriminantMismatch(WeightjacError):
    """Composition of forms with different discriminants."""


class InvalidDiscriminant(WeightjacError):
    """Discriminant is not a negative integer congruent to 0 or 1 mod 4."""


class DegenerateBasis(WeightjacError):
    """Proposed lattice generators do not span a rank-2 lattice."""


class NotCM(WeightjacError):
    """Lattice has no complex multiplication."""


class BadWeight(WeightjacError):
    """Cohomological weight outside 2 <= m <= n."""


class NotADivisor(WeightjacError):
    """Target conductor does not divide the source conductor."""


class OrderMismatch(WeightjacError):
    """Curve classes belong to different orders."""


class DimensionMismatch(WeightjacError):
    """Products of different dimensions compared."""


class DimensionTooSmall(WeightjacError):
    """Operation requires a higher-dimensional product."""


class PrimitivityViolation(WeightjacError):
    """Operation defined only for primitive (equal-order) surfaces."""


class WeightMismatch(WeightjacError):
    """Direct sum of Hodge structures with different weights."""


class MissingSummand(WeightjacError):
    """Blowup/projective-bundle data lacks a required weight."""


class NoJacobian(WeightjacError):
    """Hodge structure has positive Jacobian discrepancy."""


class LowerHalfPlane(WeightjacError):
    """j-invariant requested at a point with non-positive imaginary part."""


class PrecisionExhausted(WeightjacError):
    """Coefficient recognition failed even at the precision-escalation cap."""


class CorruptCache(WeightjacError):
    """Cache file could not be parsed."""
