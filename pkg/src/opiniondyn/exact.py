"""Exact rational helpers: decimal parsing, formatting, and bitmask utilities.

All weights and beliefs are exact rationals. Weights must additionally be
decimal (denominator of the form 2^a * 5^b) so that scaling by a power of ten
turns them into integers; beliefs may be arbitrary rationals in [0, 1].
Floats are accepted for convenience and are read through their shortest
decimal repr, so 0.2 means exactly 2/10.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction

from .errors import SchemaError


def to_fraction(value) -> Fraction:
    """Convert int / str / Decimal / Fraction / float to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SchemaError(f"expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return Fraction(text)
            return Fraction(Decimal(text))
        except (ValueError, ArithmeticError) as exc:
            raise SchemaError(f"not a valid number: {value!r}") from exc
    raise SchemaError(f"expected a number, got {type(value).__name__}")


def decimal_precision(value: Fraction) -> int:
    """Number of decimal digits k such that value * 10^k is an integer.

    Raises SchemaError for rationals with no finite decimal expansion.
    """
    den = value.denominator
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise SchemaError(
            f"{value} has no finite decimal form (denominator {value.denominator})"
        )
    return max(twos, fives)


def is_decimal(value: Fraction) -> bool:
    den = value.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    return den == 1


def format_decimal(value: Fraction) -> str:
    """Render an exact decimal rational as a plain decimal string."""
    k = decimal_precision(value)
    scaled = value * 10**k
    digits = scaled.numerator  # scaled is integral by construction
    if k == 0:
        return str(digits)
    sign = "-" if digits < 0 else ""
    digits = abs(digits)
    text = str(digits).rjust(k + 1, "0")
    return f"{sign}{text[:-k]}.{text[-k:]}"


def format_rational(value: Fraction) -> str:
    """num/den string, the report format for exact quantities."""
    return f"{value.numerator}/{value.denominator}"


# -- bitmask profiles ---------------------------------------------------------
#
# A strategy profile over n players is an n-bit mask; bit i is player i's
# strategy in {0, 1}.

def bit(mask: int, i: int) -> int:
    return (mask >> i) & 1

def flip(mask: int, i: int) -> int:
    return mask ^ (1 << i)

def bits_tuple(mask: int, n: int) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(n))

def mask_from_bits(bits) -> int:
    mask = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise SchemaError(f"strategy must be 0 or 1, got {b!r}")
        mask |= b << i
    return mask
