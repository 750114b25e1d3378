"""
Gallager's E0, channel capacity, and the random-coding / sphere-packing bounds.

All logarithms are base 2. Quantities here are continuous in W, so they are
computed in floating point; the only discontinuous decision (whether E_sp is
finite) is delegated to the exact game solver.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp, rel_entr

from .channel import Channel
from .errors import DegenerateChannel, NonConvergence
from .game import ExactLogRate, psi_inf
from .search import bracket_maximum, golden_section_max

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

# Step for the central difference that locates R_crit.
R_CRIT_STEP = 1e-5
# Slope error is about tolerance / step; the certificate cannot go much lower.
R_CRIT_E0_TOLERANCE = 1e-11

# Relative change in log F that rounding can produce.
F_RESOLUTION = 64 * float(np.finfo(float).eps)
MIN_STEP = 1e-12


class BoundKind(Enum):
    """Finite exponent or certified divergence."""
    FINITE = "finite"
    POSITIVE_INFINITY = "inf"


@dataclass(frozen=True)
class BoundValue:
    """
    Extended-real exponent value.

    A POSITIVE_INFINITY value always carries the exact rate whose gate
    (R <= rate) declared it infinite; numerics never produce it.
    """
    kind: BoundKind
    value: float
    rho: Optional[float] = None
    distribution: Optional[Tuple[float, ...]] = None
    certificate: Optional[ExactLogRate] = None

    @classmethod
    def finite(cls, value: float, rho: Optional[float] = None,
               distribution: Optional[Tuple[float, ...]] = None) -> "BoundValue":
        if value < 0:
            raise ValueError(f"finite bound must be >= 0, got {value}")
        return cls(BoundKind.FINITE, value, rho, distribution)

    @classmethod
    def infinite(cls, certificate: ExactLogRate) -> "BoundValue":
        return cls(BoundKind.POSITIVE_INFINITY, math.inf, certificate=certificate)

    @property
    def is_finite(self) -> bool:
        return self.kind is BoundKind.FINITE

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class RhoSearchConfig:
    """How the sup over rho is searched."""
    rho_cap: float = 64.0
    tolerance: float = 1e-9
    max_iter: int = 200
    e0_tolerance: float = 1e-9
    e0_max_iter: int = 10000

    def __post_init__(self):
        if self.rho_cap <= 1:
            raise ValueError(f"rho_cap must be > 1, got {self.rho_cap}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")

    @classmethod
    def from_config(cls, config) -> "RhoSearchConfig":
        return cls(
            rho_cap=config.rho_cap,
            tolerance=config.rho_tolerance,
            max_iter=config.rho_max_iter,
            e0_tolerance=config.e0_tolerance,
            e0_max_iter=config.e0_max_iter,
        )


DEFAULT_SEARCH = RhoSearchConfig()


@dataclass(frozen=True)
class E0Maximum:
    value: float
    distribution: Tuple[float, ...]
    iterations: int


@dataclass(frozen=True)
class CapacityResult:
    value: float
    distribution: Tuple[float, ...]
    iterations: int
    certified: bool


# =============================================================================
# GALLAGER FUNCTION
# =============================================================================

def _log_powered(w: Channel, rho: float) -> np.ndarray:
    """log W(y|x)^{1/(1+rho)}, with -inf where W(y|x) = 0."""
    arr = w.as_array()
    with np.errstate(divide="ignore"):
        return np.log(arr) / (1.0 + rho)


def _log_inner(log_a: np.ndarray, log_p: np.ndarray) -> np.ndarray:
    """log alpha_y with alpha_y = sum_x P(x) W(y|x)^{1/(1+rho)}."""
    return logsumexp(log_a + log_p[:, None], axis=0)


def e0(w: Channel, rho: float, p) -> float:
    """
    -log2 sum_y (sum_x P(x) W(y|x)^{1/(1+rho)})^{1+rho}.

    Args:
        w: channel
        rho: >= 0
        p: input distribution, length |X|
    """
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        log_p = np.log(p)
    log_alpha = _log_inner(_log_powered(w, rho), log_p)
    log_total = logsumexp((1.0 + rho) * log_alpha)
    return float(-log_total / LN2)


def _certificate(log_a: np.ndarray, rho: float, log_alpha: np.ndarray,
                 log_f: float) -> Tuple[np.ndarray, float]:
    """log(g_x / F) and the linearization gap (1+rho)(1 - min_x g_x / F)."""
    log_g = logsumexp(log_a + rho * log_alpha[None, :], axis=1)
    log_ratio = log_g - log_f
    return log_ratio, (1.0 + rho) * -math.expm1(float(np.min(log_ratio)))


def _ascend(log_a: np.ndarray, rho: float, log_p: np.ndarray,
            tolerance: float, max_iter: int) -> Tuple[np.ndarray, float, int, bool]:
    """
    Multiplicative ascent on E0(rho, P) from the start log_p.

    Minimizes F(P) = sum_y alpha_y^{1+rho}. With g_x = sum_y a_xy alpha_y^rho,
    sum_x P(x) g_x = F and convexity gives F - F* <= (1+rho)(F - min_x g_x),
    which is the stopping certificate.

    A step is accepted when it lowers log F by more than rounding, or, once
    log F no longer resolves the two points, when it lowers the gap.
    """
    # (1+rho)(1 - g_min/F) <= 1 - 2^-tol  =>  value within tol of optimum
    target = -math.expm1(-tolerance * LN2)
    step = 1.0

    log_alpha = _log_inner(log_a, log_p)
    log_f = logsumexp((1.0 + rho) * log_alpha)
    log_ratio, gap = _certificate(log_a, rho, log_alpha, log_f)

    for it in range(1, max_iter + 1):
        if gap <= target:
            return log_p, log_f, it, True

        # backtracking from earlier iterations must not pin the step
        step = min(1.0, 2.0 * step)
        resolution = F_RESOLUTION * max(1.0, abs(log_f))
        while True:
            candidate = log_p - (step / rho) * log_ratio
            candidate -= logsumexp(candidate)
            cand_alpha = _log_inner(log_a, candidate)
            cand_f = logsumexp((1.0 + rho) * cand_alpha)
            cand_ratio, cand_gap = _certificate(log_a, rho, cand_alpha, cand_f)
            if cand_f < log_f - resolution:
                break
            if cand_f <= log_f + resolution and cand_gap < gap:
                break
            step *= 0.5
            if step < MIN_STEP:
                logger.debug("E0 ascent stalled at rho=%g with gap %.3g", rho, gap)
                return log_p, log_f, it, False

        log_p, log_alpha, log_f = candidate, cand_alpha, cand_f
        log_ratio, gap = cand_ratio, cand_gap

    return log_p, log_f, max_iter, gap <= target


def e0_max(w: Channel, rho: float, tolerance: float = 1e-9, max_iter: int = 10000) -> E0Maximum:
    """
    max over P of e0(W, rho, P).

    Starts from the uniform distribution; only when that start cannot be
    certified are vertex-perturbed restarts tried.

    Raises:
        NonConvergence: no start certified within max_iter.
    """
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    n = w.input_size
    uniform = np.full(n, 1.0 / n)
    if rho == 0:
        return E0Maximum(0.0, tuple(uniform), 0)

    log_a = _log_powered(w, rho)
    starts = [uniform]
    best = None
    total_iterations = 0

    for idx in range(n + 1):
        if idx == 1:
            logger.debug("uniform start uncertified at rho=%g, trying %d restarts", rho, n)
            starts.extend(0.5 * uniform + 0.5 * np.eye(n)[x] for x in range(n))
        if idx >= len(starts):
            break
        log_p, log_f, iterations, certified = _ascend(
            log_a, rho, np.log(starts[idx]), tolerance, max_iter
        )
        total_iterations += iterations
        if best is None or log_f < best[1]:
            best = (log_p, log_f, certified)
        if certified:
            break

    log_p, log_f, certified = best
    if not certified:
        raise NonConvergence(
            f"E0 maximization at rho={rho:g} not certified after {total_iterations} iterations"
        )
    return E0Maximum(
        value=float(-log_f / LN2),
        distribution=tuple(np.exp(log_p)),
        iterations=total_iterations,
    )


# =============================================================================
# CAPACITY
# =============================================================================

@lru_cache(maxsize=256)
def capacity_achieving(w: Channel, tolerance: float = 1e-10, max_iter: int = 100000) -> CapacityResult:
    """
    Blahut-Arimoto alternating maximization.

    Each iterate P brackets the capacity:
        I(P) <= C <= max_x D(W(.|x) || PW)
    and the loop stops once the bracket is narrower than tolerance.
    """
    arr = w.as_array()
    n = w.input_size
    p = np.full(n, 1.0 / n)
    lower = 0.0
    for it in range(1, max_iter + 1):
        q = p @ arr
        divergence = rel_entr(arr, q[None, :]).sum(axis=1) / LN2
        lower = float(p @ divergence)
        upper = float(divergence.max())
        if upper - lower < tolerance:
            return CapacityResult(max(lower, 0.0), tuple(p), it, True)
        p = p * np.exp2(divergence - upper)
        p /= p.sum()

    logger.warning("capacity iteration not certified after %d steps (gap %.3g)",
                   max_iter, upper - lower)
    return CapacityResult(max(lower, 0.0), tuple(p), max_iter, False)


def capacity(w: Channel, tolerance: float = 1e-10, max_iter: int = 100000) -> float:
    """C(W) in bits."""
    return capacity_achieving(w, tolerance, max_iter).value


# =============================================================================
# EXPONENT BOUNDS
# =============================================================================

def e_r(w: Channel, rate: float, config: RhoSearchConfig = DEFAULT_SEARCH) -> float:
    """Random-coding exponent: max over rho in [0, 1] of E0(rho) - rho R."""
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")

    def objective(rho: float) -> float:
        return e0_max(w, rho, config.e0_tolerance, config.e0_max_iter).value - rho * rate

    best = golden_section_max(objective, 0.0, 1.0, config.tolerance, config.max_iter)
    return max(best.value, 0.0)


def e_sp(w: Channel, rate: float, config: RhoSearchConfig = DEFAULT_SEARCH) -> BoundValue:
    """
    Sphere-packing exponent sup over rho > 0 of E0(rho) - rho R.

    +inf exactly when R <= R_inf(W); 0 by convention for R >= C(W).

    Raises:
        RhoCapExceeded: the sup is still increasing at config.rho_cap.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    r_inf = psi_inf(w)
    if rate <= r_inf.rate:
        return BoundValue.infinite(r_inf)
    if rate >= capacity(w):
        return BoundValue.finite(0.0, rho=0.0)

    def objective(rho: float) -> float:
        return e0_max(w, rho, config.e0_tolerance, config.e0_max_iter).value - rho * rate

    lo, hi = bracket_maximum(objective, 0.0, config.rho_cap, rate=rate)
    best = golden_section_max(objective, lo, hi, config.tolerance, config.max_iter)
    rho_star = best.argmax
    p_star = e0_max(w, rho_star, config.e0_tolerance, config.e0_max_iter).distribution
    return BoundValue.finite(max(best.value, 0.0), rho=rho_star, distribution=p_star)


def r_crit(w: Channel, step: float = R_CRIT_STEP) -> float:
    """
    Critical rate: d/drho max_P E0(rho, P) at rho = 1, clamped to [R_inf, C].

    Raises:
        DegenerateChannel: C(W) = 0.
    """
    if w.has_identical_rows():
        raise DegenerateChannel("R_crit is undefined for a channel with C = 0")
    upper = e0_max(w, 1.0 + step, R_CRIT_E0_TOLERANCE).value
    lower = e0_max(w, 1.0 - step, R_CRIT_E0_TOLERANCE).value
    slope = (upper - lower) / (2.0 * step)
    return min(max(slope, psi_inf(w).rate), capacity(w))
