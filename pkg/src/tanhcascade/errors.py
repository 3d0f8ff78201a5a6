"""Exception hierarchy shared across the library.

Every error raised by the library derives from :class:`CascadeError`, so
callers can catch one base class at API boundaries (the CLI maps them to
exit codes).
"""


class CascadeError(Exception):
    """Base class for all library errors."""


class ContractiveRegime(CascadeError):
    """Raised when pivots or stationary points are requested for w <= 1."""


class NoConvergence(CascadeError):
    """Iteration budget exhausted before the step criterion was met.

    ``coordinate`` is the (0-based) neuron index when raised while settling
    a cascade, else None.
    """

    def __init__(self, message, coordinate=None, iterations=None):
        super().__init__(message)
        self.coordinate = coordinate
        self.iterations = iterations


class DimensionMismatch(CascadeError):
    """A vector argument has the wrong length for the network."""


class UnknownLetter(CascadeError):
    """A letter is not part of the alphabet in use."""


class UngroundedOutput(CascadeError):
    """A network output value falls in no declared output band."""


class CapExceeded(CascadeError):
    """Monoid closure grew past the configured element cap."""


class AlphabetMismatch(CascadeError):
    """Two automata being compared have different input alphabets."""


class NotRncPlus(CascadeError):
    """The network has non-positive recurrent weights.

    ``violations`` lists the offending 0-based neuron indices.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class OutOfBounds(CascadeError):
    """Grid coordinates outside the declared bounds."""


class WeakDrive(CascadeError):
    """Latch drive too weak to leave a single fixpoint on the commanded side."""


class UnknownFixture(CascadeError):
    """No fixture or oracle registered under the requested name."""
