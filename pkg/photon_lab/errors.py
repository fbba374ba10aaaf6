"""Exceptions raised by :py:mod:`photon_lab`.

Every exception derives from a builtin so that callers which do not care
about the distinction can keep catching :py:class:`ValueError` &
co.

"""

from typing import Optional


class DomainError(ValueError):
    """An input lies outside the domain of a law or function."""


class NonConvergenceError(RuntimeError):
    """A numerical procedure did not reach its requested tolerance."""

    def __init__(
        self,
        msg: str,
        value: Optional[float] = None,
        error: Optional[float] = None,
        tolerance: Optional[float] = None,
    ) -> None:
        super().__init__(msg)
        self.value = value
        self.error = error
        self.tolerance = tolerance


class NoInteriorPeakError(ValueError):
    """The function (or spectral law) has no maximum inside the bracket."""


class NonIntegrableSpectrumError(ValueError):
    """The total energy density of the requested law diverges."""

    def __init__(self, law_name: str) -> None:
        super().__init__(
            f"the spectrum of '{law_name}' is not integrable over all "
            "frequencies"
        )
        self.law_name = law_name


class TruncationError(ValueError):
    """A truncated partition sum drops a tail above the allowed fraction."""

    def __init__(self, truncation: int, required: int) -> None:
        super().__init__(
            f"truncation at N={truncation} leaves a tail that is too large, "
            f"at least N={required} terms are required"
        )
        self.truncation = truncation
        self.required = required


class SupportExceedsGridError(ValueError):
    """A compact configuration has not decayed at the grid boundary."""


class UnsupportedOperationError(TypeError):
    """The operation is not defined for this kind of configuration."""


class UndefinedRatioError(ZeroDivisionError):
    """A ratio was requested whose denominator vanishes."""


class LoopGeometryError(ValueError):
    """A loop or surface comes too close to a singularity of the field."""
