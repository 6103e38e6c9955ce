"""One-dimensional search helpers for unimodal objectives."""

from __future__ import annotations

import math
from typing import Callable

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_section_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    iterations: int = 80,
) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]`` by golden-section search.

    Returns ``(x_best, f_best)`` over every evaluated point, which includes
    both endpoints, so boundary maxima of monotone objectives are returned
    exactly.  80 iterations shrink the bracket below ``1e-12 * (b - a)``.
    """
    if b < a:
        a, b = b, a
    best_x, best_f = a, f(a)
    fb = f(b)
    if fb > best_f:
        best_x, best_f = b, fb
    if b == a:
        return best_x, best_f

    h = b - a
    c = a + _INV_PHI_SQ * h
    d = a + _INV_PHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(iterations):
        if yc > yd:
            b, d, yd = d, c, yc
            h = _INV_PHI * h
            c = a + _INV_PHI_SQ * h
            yc = f(c)
            x, y = c, yc
        else:
            a, c, yc = c, d, yd
            h = _INV_PHI * h
            d = a + _INV_PHI * h
            yd = f(d)
            x, y = d, yd
        if y > best_f:
            best_x, best_f = x, y
    return best_x, best_f
