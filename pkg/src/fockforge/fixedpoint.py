"""b-bit fixed-point arithmetic for on-the-fly interaction phases.

A :class:`FixedPointValue` stores an unsigned ``b``-bit mantissa and a
power-of-two ``scale``; it represents ``mantissa * 2**(scale - b)``. All
rounding is round-half-to-even and done on exact rationals, so results are
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from fockforge.lattice import LatticeSpec

# Seeds for 1/sqrt(m), m normalized to [1, 4), indexed by the two leading
# bits of m in units of 1/2: [1, 1.5), [1.5, 2), [2, 3), [3, 4).
_SEED_TABLE = (
    Fraction(7, 8),   # 1/sqrt(1.25) = 0.894
    Fraction(3, 4),   # 1/sqrt(1.75) = 0.756
    Fraction(5, 8),   # 1/sqrt(2.5)  = 0.632
    Fraction(17, 32),  # 1/sqrt(3.5) = 0.535
)
_GUARD_BITS = 6


@dataclass(frozen=True)
class FixedPointValue:
    bits: int
    mantissa: int
    scale: int

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("need at least one bit")
        if not 0 <= self.mantissa < (1 << self.bits):
            raise ValueError(f"mantissa {self.mantissa} does not fit in {self.bits} bits")

    @property
    def exact(self) -> Fraction:
        return Fraction(self.mantissa) * Fraction(2) ** (self.scale - self.bits)

    @property
    def value(self) -> float:
        return float(self.exact)

    @property
    def ulp(self) -> Fraction:
        return Fraction(2) ** (self.scale - self.bits)

    def __float__(self) -> float:
        return self.value


def _auto_scale(x: Fraction) -> int:
    # smallest s >= 0 with x < 2**s
    s = 0
    while x >= (1 << s):
        s += 1
    return s


def fp_quantize(x, bits: int, scale: int | None = None) -> FixedPointValue:
    """Round ``x >= 0`` to the nearest ``bits``-bit value on the grid ``2**(scale-bits)``.

    With ``scale=None`` the smallest non-negative scale that holds ``x`` is
    used, so values below one keep all ``bits`` as fraction bits. Ties go
    to the even mantissa. Raises ``OverflowError`` if an explicit scale is
    too small.
    """
    if bits < 1:
        raise ValueError("need at least one bit")
    x = Fraction(x)
    if x < 0:
        raise ValueError("fixed-point values are unsigned")
    auto = scale is None
    if auto:
        scale = _auto_scale(x)
    mantissa = round(x * Fraction(2) ** (bits - scale))  # Fraction.__round__ is half-even
    if mantissa >= (1 << bits):
        if auto:
            # rounded up onto 2**scale, which one more integer bit holds exactly
            return fp_quantize(x, bits, scale + 1)
        raise OverflowError(f"{float(x)} does not fit at scale {scale}")
    return FixedPointValue(bits, mantissa, scale)


def _normalize(x: Fraction) -> tuple[Fraction, int]:
    """Write ``x = m * 4**e`` with ``m`` in ``[1, 4)``."""
    e = 0
    while x >= 4:
        x /= 4
        e += 1
    while x < 1:
        x *= 4
        e -= 1
    return x, e


def _seed(m: Fraction) -> Fraction:
    if m < Fraction(3, 2):
        return _SEED_TABLE[0]
    if m < 2:
        return _SEED_TABLE[1]
    if m < 3:
        return _SEED_TABLE[2]
    return _SEED_TABLE[3]


@dataclass(frozen=True)
class NewtonTrace:
    result: FixedPointValue
    iterations: int


def fp_inv_sqrt_trace(x, bits: int) -> NewtonTrace:
    """Newton-Raphson ``1/sqrt(x)`` in integer arithmetic, with its iteration count.

    The operand is normalized to ``m * 4**e`` with ``m`` in ``[1, 4)`` and a
    seed for ``1/sqrt(m)`` is read from a four-entry table on its leading
    bits. The iteration ``y <- y (3 - m y^2) / 2`` then runs on integers
    with ``bits + 6`` fraction bits until two successive iterates differ by
    less than one unit in the ``bits``-th place. The result is rounded to a
    ``bits``-bit mantissa with ``2**(bits-1) <= mantissa < 2**bits``.
    """
    if bits < 1:
        raise ValueError("need at least one bit")
    x = Fraction(x)
    if x <= 0:
        raise ValueError("inverse square root needs a positive operand")
    m, e = _normalize(x)
    w = bits + _GUARD_BITS
    one = 1 << w
    m_fix = round(m * one)
    y = round(_seed(m) * one)
    tol = 1 << (w - bits)
    iterations = 0
    max_iter = math.ceil(math.log2(bits)) + 2 if bits > 1 else 2
    while True:
        y2 = (y * y) >> w
        my2 = (m_fix * y2) >> w
        y_next = (y * (3 * one - my2)) >> (w + 1)
        iterations += 1
        converged = abs(y_next - y) < tol
        y = y_next
        if converged or iterations >= max_iter:
            break
    # 1/sqrt(x) = y * 2**-e, y in (1/2, 1]
    value = Fraction(y, one) / Fraction(2) ** e
    scale = math.floor(math.log2(value)) + 1 if value > 0 else 0
    while value >= Fraction(2) ** scale:
        scale += 1
    while value < Fraction(2) ** (scale - 1):
        scale -= 1
    mantissa = round(value * Fraction(2) ** (bits - scale))
    if mantissa == 1 << bits:
        scale += 1
        mantissa = round(value * Fraction(2) ** (bits - scale))
    return NewtonTrace(FixedPointValue(bits, mantissa, scale), iterations)


def fp_inv_sqrt(x, bits: int) -> FixedPointValue:
    """``1/sqrt(x)`` to ``bits`` significant bits by Newton-Raphson."""
    return fp_inv_sqrt_trace(x, bits).result


@lru_cache(maxsize=4096)
def inv_distance_fp(spec: LatticeSpec, p: int, q: int, bits: int,
                    newton: bool = False) -> FixedPointValue:
    """``bits``-bit approximation of ``1/distance(p, q)``.

    The default path quantizes the exact reciprocal, which on a 1D lattice
    needs no square root. ``newton=True`` instead feeds the squared
    distance through :func:`fp_inv_sqrt`, the route a higher-dimensional
    lattice would need.
    """
    if p == q:
        raise ValueError("inverse distance of a site to itself")
    d = Fraction(spec.separation(p, q)) * Fraction(spec.spacing)
    if newton:
        return fp_inv_sqrt(d * d, bits)
    return fp_quantize(1 / d, bits)
