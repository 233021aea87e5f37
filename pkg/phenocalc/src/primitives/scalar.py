import math

from fractions import Fraction
from typing import Iterable, List, Literal, Optional, Union

from phenocalc.src.errors import MixedBackend, SpecParseError

Backend = Literal["exact", "float"]
Scalar = Union[Fraction, float]

EXACT: Backend = "exact"
FLOAT: Backend = "float"


def parse_scalar(text: Union[str, int, float, Fraction], backend: Backend = EXACT) -> Scalar:
    """
    Parses "num/den", integers and decimals. Decimals are read exactly ("0.1" is 1/10), then
    converted to float only on the float backend.
    """
    if isinstance(text, bool):
        raise SpecParseError(f"Expected a number, got {text!r}.")
    try:
        value = Fraction(text.strip()) if isinstance(text, str) else Fraction(text)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise SpecParseError(f"Could not read {text!r} as a number: {e}")
    return value if backend == EXACT else float(value)


def infer_backend(values: Iterable) -> Backend:
    kinds = set()
    for v in values:
        if isinstance(v, float):
            kinds.add(FLOAT)
        elif isinstance(v, (Fraction, int)):
            kinds.add(EXACT)
    if len(kinds) > 1:
        raise MixedBackend("Exact and float values cannot be combined.")
    return kinds.pop() if kinds else EXACT


def coerce(value, backend: Backend) -> Scalar:
    """Converts one input value to the backend's scalar type, rejecting cross-backend values."""
    if isinstance(value, str):
        return parse_scalar(value, backend)
    if isinstance(value, bool):
        raise SpecParseError(f"Expected a number, got {value!r}.")
    if backend == EXACT:
        if isinstance(value, float):
            raise MixedBackend(f"Float value {value!r} given to the exact backend.")
        if isinstance(value, (Fraction, int)):
            return Fraction(value)
    else:
        if isinstance(value, Fraction) and value.denominator != 1:
            raise MixedBackend(f"Rational value {value} given to the float backend.")
        if isinstance(value, (float, int, Fraction)):
            value = float(value)
            if not math.isfinite(value):
                raise SpecParseError(f"Non-finite value {value!r}.")
            return value
    raise SpecParseError(f"Expected a number, got {value!r}.")


def coerce_all(values: Iterable, backend: Optional[Backend] = None) -> List[Scalar]:
    values = list(values)
    if backend is None:
        backend = infer_backend(values)
    return [coerce(v, backend) for v in values]


def zero(backend: Backend) -> Scalar:
    return Fraction(0) if backend == EXACT else 0.0


def one(backend: Backend) -> Scalar:
    return Fraction(1) if backend == EXACT else 1.0


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient, 0 outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def to_json_value(value: Scalar):
    """Exact rationals as "num/den" strings, floats as JSON numbers."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return float(value)


def render_decimal(value: Scalar, precision: int) -> str:
    return f"{float(value):.{precision}f}"
