"""Exception hierarchy.

Each class carries the CLI exit code it maps to: 3 for violated input
invariants, 4 for a tensor in the wrong stratum for the requested
operation, 5 for a certificate that failed its own verification.
"""


class SkewRankError(Exception):
    exit_code = 5


class InvariantError(SkewRankError, ValueError):
    exit_code = 3


class AmbientMismatch(InvariantError):
    pass


class ShapeMismatch(InvariantError):
    pass


class GradeMismatch(InvariantError):
    pass


class ZeroDim(InvariantError):
    pass


class ZeroTensor(InvariantError):
    pass


class OutOfRange(InvariantError):
    pass


class NotDecomposable(InvariantError):
    pass


class StratumError(SkewRankError):
    exit_code = 4


class WrongStratum(StratumError):
    pass


class NotSecant(StratumError):
    pass


class NotTangent(StratumError):
    pass


class SplitFailed(StratumError):
    pass


class IrrationalSplit(SplitFailed):
    """The pair of factor spaces exists only over a quadratic extension of Q."""

    def __init__(self, msg: str, discriminant=None):
        super().__init__(msg)
        self.discriminant = discriminant


class VerificationFailure(SkewRankError):
    """A certificate did not reproduce its input; always a bug."""

    exit_code = 5
