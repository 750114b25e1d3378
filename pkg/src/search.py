"""
One-dimensional maximization of concave objectives in rho.

Used by the sphere-packing, random-coding and expurgation bounds: all of
them are sup over rho of a concave function, bracketed on a doubling grid
and then refined by golden-section search.
"""

import logging
import math
from typing import Callable, List, NamedTuple

from .errors import NonConvergence, RhoCapExceeded

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Maximum(NamedTuple):
    argmax: float
    value: float
    evaluations: int


def doubling_grid(start: float, cap: float) -> List[float]:
    """start, then 1, 2, 4, ... up to and including cap."""
    points = [start]
    p = 1.0
    while p <= start:
        p *= 2.0
    while p < cap:
        points.append(p)
        p *= 2.0
    if points[-1] < cap:
        points.append(float(cap))
    return points


def bracket_maximum(
    f: Callable[[float], float],
    start: float,
    cap: float,
    rate: float = float("nan"),
) -> tuple:
    """
    Walk the doubling grid until the concave objective stops increasing.

    Returns:
        (lo, hi) containing the maximizer.

    Raises:
        RhoCapExceeded: f still increasing at cap.
    """
    points = doubling_grid(start, cap)
    values = [f(points[0])]
    for k in range(1, len(points)):
        values.append(f(points[k]))
        if values[k] <= values[k - 1]:
            lo = points[k - 2] if k >= 2 else points[0]
            logger.debug("bracket [%g, %g] after %d evaluations", lo, points[k], k + 1)
            return lo, points[k]
    raise RhoCapExceeded(rate, cap)


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tolerance: float = 1e-9,
    max_iter: int = 200,
) -> Maximum:
    """
    Golden-section search for the maximum of a concave f on [lo, hi].

    The endpoints are evaluated too, so a maximizer on the boundary is
    returned exactly rather than approached.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evaluations = 2

    for _ in range(max_iter):
        if b - a <= tolerance * (1.0 + abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        evaluations += 1
    else:
        raise NonConvergence(
            f"golden-section search on [{lo:g}, {hi:g}] did not converge in {max_iter} steps"
        )

    candidates = [(c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))]
    evaluations += 2
    x, fx = max(candidates, key=lambda item: item[1])
    return Maximum(argmax=x, value=fx, evaluations=evaluations)
