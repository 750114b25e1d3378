"""
Monotone approximation sequences for R_inf and C0_FB.

Smoothing the 0/1 support game with N W / (1 + N W) gives games whose
values increase to Psi_inf, so the rates F_N = log2(1 / Phi_N) decrease to
R_inf from above. The feedback side multiplies the transposed game's rate
by a confusability prefactor that is exactly 1 when C0 > 0 and decays
geometrically otherwise.

Only from-above sequences exist here: a sequence increasing to R_inf
cannot be computed, so none is offered.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

from .channel import Channel, bhattacharyya
from .errors import DegenerateGame
from .game import ExactLogRate, c0_fb, psi_inf, solve_game, solve_min_max

logger = logging.getLogger(__name__)

TARGET_SLACK = 1e-12


class Quantity(Enum):
    R_INF = "R_inf"
    C0_FB = "C0_fb"


class PrefactorReading(Enum):
    """Where the exponent N sits in the V_N confusability prefactor."""
    OUTSIDE = "outside"  # (1 - prod g)^N
    INSIDE = "inside"    # 1 - prod g^N, diagnostic only


class Verdict(Enum):
    ACCEPTED = "accepted"
    UNDETERMINED = "undetermined"


# =============================================================================
# SEQUENCES
# =============================================================================

def smoothed_matrix(w: Channel, n: int) -> List[List[Fraction]]:
    """B_N[y][x] = N W(y|x) / (1 + N W(y|x))."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return [
        [n * w.rows[x][y] / (1 + n * w.rows[x][y]) for x in range(w.input_size)]
        for y in range(w.output_size)
    ]


def phi_n(w: Channel, n: int) -> Fraction:
    """Phi_N(W): exact value of the smoothed game, maximizer on Y."""
    return solve_game(smoothed_matrix(w, n)).value


def _log_rate(psi: Fraction) -> float:
    if psi <= 0:
        raise DegenerateGame(f"smoothed game has value {psi}")
    return ExactLogRate(psi).rate


def f_n(w: Channel, n: int) -> float:
    """F_N(W) = log2(1 / Phi_N(W)), nonincreasing in N, >= R_inf(W)."""
    return _log_rate(phi_n(w, n))


def phi_error_bound(w: Channel, n: int) -> Fraction:
    """Guaranteed 0 <= Psi_inf - Phi_N <= 1 / (1 + N m), m the smallest positive W(y|x)."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return 1 / (1 + n * w.min_positive_entry())


def psi_fb_n(w: Channel, n: int) -> Fraction:
    """min over P on X of max over y of sum_x B_N[y][x] P(x)."""
    return solve_min_max(smoothed_matrix(w, n)).value


def u_n(w: Channel, n: int) -> float:
    """U_N(W) = log2(1 / smoothed feedback game value)."""
    return _log_rate(psi_fb_n(w, n))


def confusability_prefactor(
    w: Channel, n: int, reading: PrefactorReading = PrefactorReading.OUTSIDE
) -> float:
    """
    Prefactor of V_N over all ordered input pairs.

    Exactly 1 when some pair has disjoint supports (decided on the exact
    zero bit); otherwise (1 - prod g)^N, or 1 - prod g^N for INSIDE.
    """
    pairs = list(product(range(w.input_size), repeat=2))
    coefficients = [bhattacharyya(w, x, x2) for x, x2 in pairs]
    if any(c.is_zero for c in coefficients):
        return 1.0
    log_prod = math.fsum(math.log(c.value) for c in coefficients)
    if reading is PrefactorReading.INSIDE:
        return -math.expm1(n * log_prod)
    return math.exp(n * math.log1p(-math.exp(log_prod)))


def v_n(w: Channel, n: int, reading: PrefactorReading = PrefactorReading.OUTSIDE) -> float:
    """V_N(W) = prefactor * U_N(W); decreases to C0_FB(W)."""
    return confusability_prefactor(w, n, reading) * u_n(w, n)


def sequence_for(quantity: Quantity) -> Callable[[Channel, int], float]:
    return f_n if quantity is Quantity.R_INF else v_n


def target_for(w: Channel, quantity: Quantity) -> ExactLogRate:
    return psi_inf(w) if quantity is Quantity.R_INF else c0_fb(w)


# =============================================================================
# TRACES
# =============================================================================

@dataclass
class ApproxTrace:
    """{(N, value)} for one quantity, with the exact limit it approaches."""
    quantity: Quantity
    target: ExactLogRate
    entries: List[Tuple[int, float]] = field(default_factory=list)
    bounds: List[Tuple[int, Fraction]] = field(default_factory=list)

    def is_monotone(self) -> bool:
        values = [v for _, v in self.entries]
        return all(a >= b for a, b in zip(values, values[1:]))

    def dominates_target(self) -> bool:
        return all(v >= self.target.rate - TARGET_SLACK for _, v in self.entries)

    def to_csv(self, path: Optional[Union[str, Path]] = None) -> str:
        """Columns N, value, error_bound, target; error_bound is empty where none applies."""
        bound_at = dict(self.bounds)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["N", "value", "error_bound", "target"])
        for n, value in self.entries:
            bound = bound_at.get(n)
            writer.writerow([
                n,
                repr(value),
                "" if bound is None else repr(float(bound)),
                repr(self.target.rate),
            ])
        text = buffer.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


def approx_trace(
    w: Channel,
    quantity: Quantity,
    n_max: int,
    reading: PrefactorReading = PrefactorReading.OUTSIDE,
) -> ApproxTrace:
    if n_max < 1:
        raise ValueError(f"N_max must be >= 1, got {n_max}")
    trace = ApproxTrace(quantity=quantity, target=target_for(w, quantity))
    for n in range(1, n_max + 1):
        if quantity is Quantity.R_INF:
            trace.entries.append((n, f_n(w, n)))
            trace.bounds.append((n, phi_error_bound(w, n)))
        else:
            trace.entries.append((n, v_n(w, n, reading)))
    return trace


# =============================================================================
# SEMI-DECISION
# =============================================================================

@dataclass(frozen=True)
class SemiDecision:
    verdict: Verdict
    threshold: float
    quantity: Quantity
    budget: int
    at_n: Optional[int] = None
    value: Optional[float] = None  # sequence value at at_n

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPTED


def semi_decide_below(
    w: Channel, threshold: float, quantity: Quantity = Quantity.R_INF, budget: int = 500
) -> SemiDecision:
    """
    Accept at the first N <= budget whose sequence value is below threshold.

    The sequence is nonincreasing, so N = budget is tested first and the
    first accepting N is located by galloping then bisection; the answer is
    the one a plain N = 1..budget scan would give.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")

    sequence = sequence_for(quantity)
    values = {}

    def below(n: int) -> bool:
        if n not in values:
            values[n] = sequence(w, n)
        return values[n] < threshold

    if not below(budget):
        logger.debug("undetermined: %s_%d = %.6g >= %g", quantity.value, budget, values[budget], threshold)
        return SemiDecision(Verdict.UNDETERMINED, threshold, quantity, budget)

    lo, hi = 0, 1
    while hi < budget and not below(hi):
        lo, hi = hi, min(2 * hi, budget)
    # first accepting N lies in (lo, hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below(mid):
            hi = mid
        else:
            lo = mid

    logger.debug("accepted at N=%d after %d evaluations", hi, len(values))
    return SemiDecision(Verdict.ACCEPTED, threshold, quantity, budget, at_n=hi, value=values[hi])
