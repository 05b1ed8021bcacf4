"""
Max-plus scalars: the idempotent semifield R_max = (R ∪ {-inf}, max, +).

Bottom (the semiring zero, -inf) is a distinguished sentinel. Every operation
branches on it explicitly so no IEEE infinity ever reaches float arithmetic.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .errors import InvalidArgumentError, ParseError

BOTTOM_JSON = "-inf"


@dataclass(frozen=True)
class MaxPlusScalar:
    """Element of R_max. ``value is None`` encodes bottom."""

    value: Optional[float] = None

    def __post_init__(self):
        if self.value is not None:
            v = float(self.value)
            if math.isnan(v):
                raise InvalidArgumentError("NaN is not an element of R_max")
            if v == -math.inf:
                object.__setattr__(self, 'value', None)
            elif math.isinf(v):
                raise InvalidArgumentError("+inf is not an element of R_max")
            else:
                object.__setattr__(self, 'value', v)

    @property
    def is_bottom(self) -> bool:
        return self.value is None

    @classmethod
    def of(cls, x: Union['MaxPlusScalar', float, int, str, None]) -> 'MaxPlusScalar':
        """Coerce floats, ``-inf``, ``"-inf"`` and ``None`` to a scalar."""
        if isinstance(x, MaxPlusScalar):
            return x
        if x is None or (isinstance(x, str) and x.strip().lower() == BOTTOM_JSON):
            return BOTTOM
        if isinstance(x, str):
            raise ParseError(f"Expected a number or '{BOTTOM_JSON}', got '{x}'")
        return cls(float(x))

    def to_float(self) -> float:
        """Float view; bottom becomes -inf. For display and numpy interop only."""
        return -math.inf if self.value is None else self.value

    def to_json(self) -> Union[float, str]:
        return BOTTOM_JSON if self.value is None else self.value

    @classmethod
    def from_json(cls, data) -> 'MaxPlusScalar':
        if isinstance(data, bool):
            raise ParseError("Boolean is not a max-plus scalar")
        if isinstance(data, (int, float, str)) or data is None:
            return cls.of(data)
        raise ParseError(f"Cannot read max-plus scalar from {data!r}")

    def __repr__(self) -> str:
        return "MaxPlusScalar(-inf)" if self.value is None else f"MaxPlusScalar({self.value!r})"


BOTTOM = MaxPlusScalar(None)
ONE = MaxPlusScalar(0.0)

Scalar = Union[MaxPlusScalar, float, int]


def oplus(a: Scalar, b: Scalar) -> MaxPlusScalar:
    """Idempotent addition: max, with bottom as identity."""
    a, b = MaxPlusScalar.of(a), MaxPlusScalar.of(b)
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    return a if a.value >= b.value else b


def odot(a: Scalar, b: Scalar) -> MaxPlusScalar:
    """Multiplication: ordinary addition, with bottom absorbing."""
    a, b = MaxPlusScalar.of(a), MaxPlusScalar.of(b)
    if a.is_bottom or b.is_bottom:
        return BOTTOM
    return MaxPlusScalar(a.value + b.value)


def precedes(a: Scalar, b: Scalar) -> bool:
    """Natural order of the idempotent semiring: a ≺ b iff a ⊕ b = b."""
    return oplus(a, b) == MaxPlusScalar.of(b)


def oplus_all(values: Iterable[Scalar]) -> MaxPlusScalar:
    result = BOTTOM
    for v in values:
        result = oplus(result, v)
    return result


def odot_inverse(a: Scalar) -> MaxPlusScalar:
    """Semifield inverse. Bottom has none."""
    a = MaxPlusScalar.of(a)
    if a.is_bottom:
        raise InvalidArgumentError("Bottom has no multiplicative inverse")
    return MaxPlusScalar(-a.value)


def _check_h(h: float) -> float:
    h = float(h)
    if not h > 0 or math.isinf(h):
        raise InvalidArgumentError(f"Dequantization parameter h must be a positive real, got {h}")
    return h


def oplus_h(u: float, v: float, h: float) -> float:
    """
    Maslov-dequantized addition h·ln(e^{u/h} + e^{v/h}).

    Evaluated as m + h·ln(1 + e^{-|u-v|/h}) with m = max(u, v), which never
    overflows and tends to max(u, v) as h -> 0.
    """
    h = _check_h(h)
    u, v = float(u), float(v)
    if not (math.isfinite(u) and math.isfinite(v)):
        raise InvalidArgumentError("oplus_h needs finite arguments")
    m = max(u, v)
    return m + h * float(np.log1p(np.exp(-abs(u - v) / h)))


def oplus_h_all(values: Iterable[float], h: float) -> float:
    """Dequantized sum of several reals, h·logsumexp(values/h)."""
    h = _check_h(h)
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise InvalidArgumentError("oplus_h_all needs at least one value")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("oplus_h_all needs finite values")
    m = float(arr.max())
    return m + h * float(np.log(np.sum(np.exp((arr - m) / h))))
