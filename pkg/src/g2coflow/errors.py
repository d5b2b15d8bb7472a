"""Exception hierarchy shared across the library.

The CLI maps these onto distinct exit codes, so keep the split between
validation-type failures and runtime (integration) failures.
"""


class G2CoflowError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(G2CoflowError):
    """Operands live on spaces of different dimension or degree."""


class SingularMap(G2CoflowError):
    """A pullback was requested through a (numerically) singular matrix."""


class NotStable(G2CoflowError):
    """A form lies outside the open stable orbit (degenerate invariant)."""


class NotPositive(G2CoflowError):
    """An induced bilinear form failed positive definiteness."""


class NotNegative(G2CoflowError):
    """A 3-form in dimension six has lambda >= 0, so no complex structure."""


class NotCompatible(G2CoflowError):
    """psi ^ omega != 0: the couple is not of type (1,1)."""


class NotNormalized(G2CoflowError):
    """The couple fails 2 omega^3 = 3 psi ^ J*psi."""


class FrameNotAdapted(G2CoflowError):
    """e7 is not unit-length and orthogonal to the ideal in the given metric."""


class DegenerateOmega(G2CoflowError):
    """omega^3 = 0: the 2-form is degenerate."""


class NotNormal(G2CoflowError):
    """[A, A^dagger] != 0: the normal-form algorithm does not apply."""


class NotInSp(G2CoflowError):
    """A is not an infinitesimal symplectomorphism of omega."""


class OutOfDomain(G2CoflowError):
    """A closed-form solution was evaluated outside its existence interval."""


class BlowUpReached(G2CoflowError):
    """Integration hit a finite-time singularity.

    Attributes:
        bracket: (lo, hi) interval containing the singular time.
        trajectory: partial trajectory accumulated before the stop.
    """

    def __init__(self, message, bracket=None, trajectory=None):
        super().__init__(message)
        self.bracket = bracket
        self.trajectory = trajectory


class ToleranceFailure(G2CoflowError):
    """The step-size controller could not meet the error tolerance."""


class IdentityViolation(G2CoflowError):
    """A defining operator identity failed its numerical verification."""


class ParseError(G2CoflowError):
    """An input file could not be parsed into algebra/form data."""


class ValidationFailure(G2CoflowError):
    """Input data parsed but failed a structural validation."""
