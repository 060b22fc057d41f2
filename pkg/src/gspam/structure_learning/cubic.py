"""Real roots of cubics with three real roots, in trigonometric form."""

import math

from ..exceptions import PlanError


class DiscriminantError(PlanError):
    """The cubic does not have three distinct real roots."""


def cubic_roots_trig(p, q, polish=True):
    """Roots of ``y^3 + p y + q`` in descending order.

    Requires ``p < 0`` and ``q^2/4 + p^3/27 < 0``.  Roots are
    ``2 sqrt(-p/3) cos((phi + 2 j pi)/3)`` with
    ``phi = arccos(-q / (2 sqrt(-p^3/27)))``, followed by up to two guarded
    Newton steps to clean up rounding near the boundary of the region.
    """
    p, q = float(p), float(q)
    if not p < 0 or q * q / 4 + p**3 / 27 >= 0:
        raise DiscriminantError(
            f"y^3 + ({p:g}) y + ({q:g}) has fewer than three distinct real roots")
    amp = 2.0 * math.sqrt(-p / 3.0)
    arg = max(-1.0, min(1.0, -q / (2.0 * math.sqrt(-p**3 / 27.0))))
    phi = math.acos(arg)
    roots = [amp * math.cos((phi + 2.0 * j * math.pi) / 3.0) for j in range(3)]
    if polish:
        roots = [_newton(r, p, q) for r in roots]
    return tuple(sorted(roots, reverse=True))


def _newton(y, p, q, steps=2):
    f = y**3 + p * y + q
    for _ in range(steps):
        df = 3 * y * y + p
        if df == 0:
            break
        cand = y - f / df
        fc = cand**3 + p * cand + q
        if abs(fc) >= abs(f):
            break
        y, f = cand, fc
    return y


def depressed(a1, a2, a3):
    """Shift ``x^3 + a1 x^2 + a2 x + a3`` to ``y^3 + p y + q`` with ``x = y - a1/3``."""
    p = a2 - a1 * a1 / 3.0
    q = 2.0 * a1**3 / 27.0 - a1 * a2 / 3.0 + a3
    return p, q


def cubic_roots_general(a1, a2, a3):
    """Descending real roots of the monic cubic ``x^3 + a1 x^2 + a2 x + a3``."""
    p, q = depressed(a1, a2, a3)
    return tuple(y - a1 / 3.0 for y in cubic_roots_trig(p, q))
