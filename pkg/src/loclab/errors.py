"""Exception types shared across the package."""


class LocLabError(Exception):
    """Base class for package errors."""


class CapacityError(LocLabError):
    """Dense solve requested on a region above the site ceiling."""


class ContainmentError(LocLabError):
    """A region/box was required to be contained in another and is not."""


class ScaleError(LocLabError):
    """Scale parameters out of range (e.g. t > R for a shifted point)."""


class ConfigError(LocLabError):
    """Bad configuration value (unknown density, malformed profile, ...)."""


class DomainError(LocLabError):
    """Argument outside an analyticity domain (|z| >= 6, eps >= 1, ...)."""


class SingularEnergyError(LocLabError):
    """E is (numerically) in the spectrum; the resolvent does not exist.

    Distinct from numerical failure: callers that treat singular E as an
    automatic predicate failure catch this type.
    """


class LadderError(LocLabError):
    """A scale ladder is too short or violates its growth conditions."""


class MarginUndefinedError(LocLabError):
    """Perturbation-margin preconditions failed; names the inequality."""

    def __init__(self, inequality, message=""):
        self.inequality = inequality
        super().__init__(message or f"margin undefined: {inequality} violated")


class ThresholdError(LocLabError):
    """A quantitative hypothesis of a bound failed; names the inequality."""

    def __init__(self, inequality, message=""):
        self.inequality = inequality
        super().__init__(message or f"threshold violated: {inequality}")
