"""Extended-precision real scalars used by the series summations.

The alternating series for the stimulated-emission probability cancels
catastrophically at moderate photon numbers (individual terms can exceed
e^50 while the sum stays below 1), so all coefficient and summation work
runs on radix-2 floats of configurable mantissa width.  The arithmetic is
backed by ``mpmath.libmp`` primitives, which are correctly rounded at an
explicit precision; this module wraps them in an immutable value type that
records the width used to produce every result.
"""

from __future__ import annotations

import math
from typing import Union

from mpmath import libmp
from mpmath.libmp import (
    fone,
    fzero,
    from_float,
    from_int,
    from_str,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_cos,
    mpf_div,
    mpf_exp,
    mpf_log,
    mpf_mul,
    mpf_neg,
    mpf_pos,
    mpf_shift,
    mpf_sin,
    mpf_sqrt,
    mpf_sub,
    round_nearest,
    to_float,
    to_str,
)

DEFAULT_BITS = 256

_RND = round_nearest

Number = Union["ExtendedReal", int, float]


class ExtendedReal:
    """Immutable radix-2 float with an explicit mantissa width in bits.

    Binary operations round correctly to the larger of the two operand
    widths; the width is carried on the result for diagnostics.  Values
    constructed from ``int`` or ``float`` are exact (binary floats embed
    losslessly), so re-rounding at a later, higher precision recovers the
    original value.
    """

    __slots__ = ("_raw", "bits")

    def __init__(self, value: Number = 0, bits: int = DEFAULT_BITS):
        if bits < 2:
            raise ValueError(f"mantissa width must be >= 2 bits, got {bits}")
        object.__setattr__(self, "bits", int(bits))
        if isinstance(value, ExtendedReal):
            raw = value._raw
        elif isinstance(value, int):
            raw = from_int(value)
        elif isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"non-finite value {value!r}")
            raw = from_float(value)
        else:
            raise TypeError(f"cannot build ExtendedReal from {type(value).__name__}")
        object.__setattr__(self, "_raw", raw)

    def __setattr__(self, name, value):
        raise AttributeError("ExtendedReal is immutable")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def _wrap(cls, raw, bits: int) -> "ExtendedReal":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_raw", raw)
        object.__setattr__(obj, "bits", bits)
        return obj

    @classmethod
    def from_string(cls, text: str, bits: int = DEFAULT_BITS) -> "ExtendedReal":
        """Parse a decimal string, rounding to ``bits``."""
        return cls._wrap(from_str(text, bits, _RND), bits)

    @classmethod
    def from_ratio(cls, num: int, den: int, bits: int = DEFAULT_BITS) -> "ExtendedReal":
        return cls._wrap(libmp.from_rational(num, den, bits, _RND), bits)

    def rounded_to(self, bits: int) -> "ExtendedReal":
        """Re-round this value to a (possibly different) mantissa width."""
        return ExtendedReal._wrap(mpf_pos(self._raw, bits, _RND), bits)

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other: Number):
        if isinstance(other, ExtendedReal):
            return other._raw, max(self.bits, other.bits)
        if isinstance(other, int):
            return from_int(other), self.bits
        if isinstance(other, float):
            return from_float(other), self.bits
        return None, 0

    def __add__(self, other: Number) -> "ExtendedReal":
        raw, bits = self._coerce(other)
        if raw is None:
            return NotImplemented
        return ExtendedReal._wrap(mpf_add(self._raw, raw, bits, _RND), bits)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "ExtendedReal":
        raw, bits = self._coerce(other)
        if raw is None:
            return NotImplemented
        return ExtendedReal._wrap(mpf_sub(self._raw, raw, bits, _RND), bits)

    def __rsub__(self, other: Number) -> "ExtendedReal":
        raw, bits = self._coerce(other)
        if raw is None:
            return NotImplemented
        return ExtendedReal._wrap(mpf_sub(raw, self._raw, bits, _RND), bits)

    def __mul__(self, other: Number) -> "ExtendedReal":
        raw, bits = self._coerce(other)
        if raw is None:
            return NotImplemented
        return ExtendedReal._wrap(mpf_mul(self._raw, raw, bits, _RND), bits)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "ExtendedReal":
        raw, bits = self._coerce(other)
        if raw is None:
            return NotImplemented
        return ExtendedReal._wrap(mpf_div(self._raw, raw, bits, _RND), bits)

    def __rtruediv__(self, other: Number) -> "ExtendedReal":
        raw, bits = self._coerce(other)
        if raw is None:
            return NotImplemented
        return ExtendedReal._wrap(mpf_div(raw, self._raw, bits, _RND), bits)

    def __neg__(self) -> "ExtendedReal":
        return ExtendedReal._wrap(mpf_neg(self._raw), self.bits)

    def __abs__(self) -> "ExtendedReal":
        return ExtendedReal._wrap(mpf_abs(self._raw), self.bits)

    def __pow__(self, exponent: int) -> "ExtendedReal":
        if not isinstance(exponent, int):
            return NotImplemented
        return ExtendedReal._wrap(
            libmp.mpf_pow_int(self._raw, exponent, self.bits, _RND), self.bits
        )

    def scaled_by_pow2(self, n: int) -> "ExtendedReal":
        """Exact multiplication by 2**n."""
        return ExtendedReal._wrap(mpf_shift(self._raw, n), self.bits)

    # -- comparisons ---------------------------------------------------------

    def _cmp(self, other: Number):
        raw, _ = self._coerce(other)
        if raw is None:
            return None
        return mpf_cmp(self._raw, raw)

    def __eq__(self, other) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __lt__(self, other) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        return hash((self._raw, "ExtendedReal"))

    # -- inspection ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self._raw == fzero

    @property
    def sign(self) -> int:
        if self._raw == fzero:
            return 0
        return -1 if self._raw[0] else 1

    def is_finite(self) -> bool:
        return self._raw not in (libmp.finf, libmp.fninf, libmp.fnan)

    def __float__(self) -> float:
        return to_float(self._raw)

    def to_decimal(self, digits: int = 30) -> str:
        return to_str(self._raw, digits)

    def __repr__(self) -> str:
        return f"ExtendedReal({self.to_decimal(25)}, bits={self.bits})"


ZERO = ExtendedReal._wrap(fzero, DEFAULT_BITS)
ONE = ExtendedReal._wrap(fone, DEFAULT_BITS)


def sqrt(x: Number, bits: int | None = None) -> ExtendedReal:
    x = x if isinstance(x, ExtendedReal) else ExtendedReal(x, bits or DEFAULT_BITS)
    b = bits or x.bits
    return ExtendedReal._wrap(mpf_sqrt(x._raw, b, _RND), b)


def exp(x: Number, bits: int | None = None) -> ExtendedReal:
    x = x if isinstance(x, ExtendedReal) else ExtendedReal(x, bits or DEFAULT_BITS)
    b = bits or x.bits
    return ExtendedReal._wrap(mpf_exp(x._raw, b, _RND), b)


def log(x: Number, bits: int | None = None) -> ExtendedReal:
    x = x if isinstance(x, ExtendedReal) else ExtendedReal(x, bits or DEFAULT_BITS)
    b = bits or x.bits
    return ExtendedReal._wrap(mpf_log(x._raw, b, _RND), b)


def sin(x: Number, bits: int | None = None) -> ExtendedReal:
    x = x if isinstance(x, ExtendedReal) else ExtendedReal(x, bits or DEFAULT_BITS)
    b = bits or x.bits
    return ExtendedReal._wrap(mpf_sin(x._raw, b, _RND), b)


def cos(x: Number, bits: int | None = None) -> ExtendedReal:
    x = x if isinstance(x, ExtendedReal) else ExtendedReal(x, bits or DEFAULT_BITS)
    b = bits or x.bits
    return ExtendedReal._wrap(mpf_cos(x._raw, b, _RND), b)


def factorial(n: int, bits: int = DEFAULT_BITS) -> ExtendedReal:
    """n! evaluated as an explicit product, rounded once at the end."""
    if n < 0:
        raise ValueError("factorial of a negative integer")
    acc = 1
    for k in range(2, n + 1):
        acc *= k
    return ExtendedReal._wrap(mpf_pos(from_int(acc), bits, _RND), bits)


def falling_product(n: int, p: int, bits: int = DEFAULT_BITS) -> ExtendedReal:
    """n (n-1) ... (n-p+1) as an exact integer product, then rounded."""
    if p < 0 or p > n:
        raise ValueError(f"falling product needs 0 <= p <= n, got n={n}, p={p}")
    acc = 1
    for j in range(n, n - p, -1):
        acc *= j
    return ExtendedReal._wrap(mpf_pos(from_int(acc), bits, _RND), bits)


def magnitude_exponent(x: ExtendedReal) -> int | None:
    """ceil(log2 |x|): the binary magnitude of x, or None for zero."""
    if x.is_zero:
        return None
    _, _, e, bc = x._raw
    return e + bc
