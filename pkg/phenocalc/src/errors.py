from typing import Any, Dict, Optional


class PhenocalcError(Exception):
    """
    Base class for every error raised by phenocalc.

    Subclasses do not derive from ValueError, so they leave pydantic validators unwrapped and keep
    their own exit status.
    """

    exit_status = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        data = {"error": type(self).__name__, "message": self.message}
        data.update({key: _plain(value) for key, value in self.details.items()})
        return data


class ValidationFailure(PhenocalcError):
    """Malformed input: bad numbers, bad specs, bad arguments."""

    exit_status = 2


class DomainFailure(PhenocalcError):
    """Well-formed input the calculus cannot answer for."""

    exit_status = 3


class NotAProbability(ValidationFailure):
    pass


class NotUnitAtZero(ValidationFailure):
    pass


class NotCompletelyMonotone(ValidationFailure):

    def __init__(self, h: int, j: int, value: Any):
        super().__init__(f"Finite difference of order {j} at index {h} is negative ({value}).", h=h, j=j, value=value)
        self.h = h
        self.j = j


class MixedBackend(ValidationFailure):
    pass


class WeightsNotNormalized(ValidationFailure):
    pass


class AtomOutOfRange(ValidationFailure):
    pass


class InvalidUrnGeometry(ValidationFailure):
    pass


class IndexOutOfRange(ValidationFailure):
    pass


class SpecParseError(ValidationFailure):
    pass


class ConfigError(ValidationFailure):
    pass


class InvalidArgument(ValidationFailure):
    pass


class DepthExceeded(DomainFailure):

    def __init__(self, needed: int, available: Optional[int]):
        super().__init__(f"Operation needs moments up to order {needed}, only {available} available.",
                         needed=needed, available=available)
        self.needed = needed
        self.available = available


class ImpossibleEvidence(DomainFailure):

    def __init__(self, r: int, s: int):
        super().__init__(f"Evidence of {r} successes and {s} failures has probability zero.", r=r, s=s)
        self.r = r
        self.s = s


class NotAtomic(DomainFailure):
    pass


class PrecisionLost(DomainFailure):

    def __init__(self, order: int, bound: float):
        super().__init__(f"Float moments cannot resolve differences of order {order} "
                         f"(rounding error up to {bound:.3g}); use the exact backend.", order=order, bound=bound)
        self.order = order
        self.bound = bound


class HypothesisViolated(UserWarning):
    """No atom lies at or near the conditioning frequency; the limit statement does not apply."""


def _plain(value: Any) -> Any:
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)
