"""Exact closed forms for the section-volume function.

These are the analytically known values: the two-equal-coordinates
direction, the general two-coordinate direction, and the large-dimension
limit along the main diagonal.
"""

from __future__ import annotations

from .direction import NORM_TOL, is_inf, validate_exponent
from .specfun import gamma


def a2_closed_form(p: float) -> float:
    """Section volume at the two-equal-coordinates direction: 2^(1-2/p)."""
    p = validate_exponent(p)
    if is_inf(p):
        return 2.0
    return 2.0 ** (1.0 - 2.0 / p)


def a2_general(p: float, b1: float, b2: float) -> float:
    """Section volume for a two-coordinate direction (b1, b2):
    the inverse squared p-norm of (b1, b2)."""
    p = validate_exponent(p)
    if b1 < 0.0 or b2 < 0.0:
        raise ValueError("coordinates must be nonnegative")
    if abs(b1 * b1 + b2 * b2 - 1.0) > NORM_TOL:
        raise ValueError(f"(b1, b2) must be unit: got |b|^2 = {b1 * b1 + b2 * b2!r}")
    if b1 == b2:
        # equal coordinates reduce to 2^(1-2/p) exactly; evaluating the
        # p-norm form would round the last ulp
        return a2_closed_form(p)
    if is_inf(p):
        return max(b1, b2) ** -2.0
    return (b1 ** p + b2 ** p) ** (-2.0 / p)


def limit_diagonal(p: float) -> float:
    """Large-n limit of the diagonal section volume:
    2 Gamma(1+2/p)^2 / Gamma(1+4/p)."""
    p = validate_exponent(p)
    if p <= 1.0 and not is_inf(p):
        raise ValueError(f"diagonal limit requires p > 1, got {p}")
    if is_inf(p):
        return 2.0
    return 2.0 * gamma(1.0 + 2.0 / p) ** 2 / gamma(1.0 + 4.0 / p)
