"""Exact rational exponents for the DkSHP and SUKP approximation ratios.

Everything here is :class:`fractions.Fraction`; no floats are produced.
"""

from dataclasses import dataclass
from fractions import Fraction

HALF = Fraction(1, 2)


def theta(m: int) -> Fraction:
    """DkSHP ratio exponent with a quarter-exponent DkSP base: m/2 - 1/2 - 1/(2m)."""
    if m < 2:
        raise ValueError(f"theta is defined for m >= 2, got {m}")
    return Fraction(m, 2) - HALF - Fraction(1, 2 * m)


def theta_bound(m: int, alpha_base) -> Fraction:
    # Unchecked form of theta_general; used for reporting guarantees of
    # bases (exact, greedy) whose exponent sits on the boundary of (0, 1).
    return Fraction(m, 2) - HALF + (2 * Fraction(alpha_base) - 1) / m


def theta_general(m: int, alpha_base) -> Fraction:
    """DkSHP exponent obtained from a DkSP base with exponent ``alpha_base``."""
    if m < 2:
        raise ValueError(f"theta_general is defined for m >= 2, got {m}")
    a = Fraction(alpha_base)
    if not 0 < a < 1:
        raise ValueError(f"alpha_base must lie in (0, 1), got {a}")
    return theta_bound(m, a)


def alpha(m: int) -> Fraction:
    """SUKP ratio exponent (2/3)[m - 1 - (2m-2)/(m^2+m-1)]; alpha(1) == 0."""
    if m < 1:
        raise ValueError(f"alpha is defined for m >= 1, got {m}")
    return Fraction(2, 3) * (m - 1 - Fraction(2 * m - 2, m * m + m - 1))


def gamma(r: int) -> Fraction:
    if r < 2:
        raise ValueError(f"gamma is defined for r >= 2, got {r}")
    return 1 + alpha(r - 1) - alpha(r)


def verify_identities(m_max: int) -> list[tuple[int, str, bool]]:
    """Check the theta and alpha recurrences exactly for r = 3..m_max.

    ``Eq17``:  1 + theta(r-1) - theta(r)/(r-1) == theta(r)
    ``Eq29``:  (2 + alpha(r-1) - alpha(r)) * theta(r) == alpha(r)
    """
    out = []
    for r in range(3, m_max + 1):
        lhs17 = 1 + theta(r - 1) - theta(r) / (r - 1)
        out.append((r, "Eq17", lhs17 == theta(r)))
        lhs29 = (2 + alpha(r - 1) - alpha(r)) * theta(r)
        out.append((r, "Eq29", lhs29 == alpha(r)))
    return out


@dataclass(frozen=True)
class ExponentTable:
    m: int
    theta: Fraction
    alpha: Fraction
    gamma: Fraction | None

    @classmethod
    def row(cls, m: int) -> "ExponentTable":
        return cls(m, theta(m), alpha(m), gamma(m) if m >= 3 else None)


def exponent_table(m_max: int) -> list[ExponentTable]:
    if m_max < 2:
        raise ValueError(f"m_max must be >= 2, got {m_max}")
    return [ExponentTable.row(m) for m in range(2, m_max + 1)]
