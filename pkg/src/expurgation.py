"""
k-letter expurgation bound.

    Q^k(rho, P) = sum_{x, x'} P(x) P(x') g_k(x, x')^{1/rho}
    E_x(rho, k) = -(rho / k) log2 min_P Q^k(rho, P)
    E_ex(R, k)  = sup_{rho >= 1} E_x(rho, k) - rho R

g_k factorizes over coordinates, so the k-letter Gram matrix is the k-fold
Kronecker power of the single-letter one. The finiteness threshold R_k^ex is
taken from the confusability graph of W^k, never from a numeric limit.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from itertools import combinations
from typing import Tuple

import numpy as np

from .channel import DEFAULT_SIZE_CAP, Channel, bhattacharyya
from .errors import NonConvergence, SizeOverflow
from .gallager import DEFAULT_SEARCH, BoundValue, RhoSearchConfig
from .game import ExactLogRate
from .search import bracket_maximum, golden_section_max
from .zero_error import (
    DEFAULT_VERTEX_CAP,
    confusability_graph,
    maximum_independent_set,
    strong_power,
    zero_error_rate,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_SUPPORT_MAX = 12
QK_TOLERANCE = 1e-8
QK_MAX_ITER = 20000
RESIDUAL_TOLERANCE = 1e-9


class QuadraticMode(Enum):
    AUTO = "auto"
    EXHAUSTIVE = "exhaustive"
    MULTISTART = "multistart"


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """g_k over X^k: unit diagonal, entries in [0, 1], exact zero pattern."""
    values: np.ndarray
    zero_pattern: np.ndarray
    k: int = 1

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def powered(self, rho: float) -> np.ndarray:
        """Elementwise g^{1/rho} with 0^{1/rho} = 0; rho = inf gives the support indicator."""
        if math.isinf(rho):
            return np.where(self.zero_pattern, 0.0, 1.0)
        with np.errstate(divide="ignore"):
            return np.where(self.zero_pattern, 0.0, np.power(self.values, 1.0 / rho))


@dataclass(frozen=True)
class QuadraticMinimum:
    value: float
    distribution: Tuple[float, ...]
    exhaustive: bool  # False: multistart result, an upper estimate of the minimum


@dataclass(frozen=True)
class ExpurgationResult:
    value: BoundValue
    rho_star: float  # math.inf when the exact gate fired
    p_star: Tuple[float, ...]
    k: int = 1


def gram(w: Channel, k: int = 1, size_cap: int = DEFAULT_SIZE_CAP) -> GramMatrix:
    """Bhattacharyya Gram matrix of W^k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = w.input_size
    if n ** k > size_cap:
        raise SizeOverflow(f"gram(W, {k}) has {n ** k} rows, cap is {size_cap}")

    values = np.ones((n, n))
    positive = np.ones((n, n), dtype=int)
    for x, x2 in combinations(range(n), 2):
        coef = bhattacharyya(w, x, x2)
        values[x, x2] = values[x2, x] = coef.value
        positive[x, x2] = positive[x2, x] = 0 if coef.is_zero else 1

    if k > 1:
        values = reduce(np.kron, [values] * k)
        positive = reduce(np.kron, [positive] * k)
    return GramMatrix(values=values, zero_pattern=positive == 0, k=k)


# =============================================================================
# QUADRATIC FORM OVER THE SIMPLEX
# =============================================================================

def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of v onto the probability simplex."""
    v = np.atleast_2d(v)
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    ind = np.arange(1, n + 1)
    count = np.sum(u - css / ind > 0, axis=1)
    theta = css[np.arange(v.shape[0]), count - 1] / count
    return np.maximum(v - theta[:, None], 0.0)


def exhaustive_quadratic_minimum(m: np.ndarray) -> QuadraticMinimum:
    """
    min P^T M P over the simplex by enumerating supports.

    On the optimal support S the KKT conditions read M_S x = 1 with x >= 0,
    and the minimum is 1 / sum(x). Singular M_S are handled by least squares;
    along a null direction the value is constant, so some smaller support
    reaches the same minimum.
    """
    n = m.shape[0]
    best_value = math.inf
    best_p = None
    for size in range(1, n + 1):
        for support in combinations(range(n), size):
            idx = list(support)
            sub = m[np.ix_(idx, idx)]
            x, *_ = np.linalg.lstsq(sub, np.ones(size), rcond=None)
            if np.max(np.abs(sub @ x - 1.0)) > RESIDUAL_TOLERANCE:
                continue
            if np.min(x) < -RESIDUAL_TOLERANCE or x.sum() <= 0:
                continue
            p = np.zeros(n)
            p[idx] = np.maximum(x, 0.0) / x.sum()
            value = float(p @ m @ p)
            if value < best_value:
                best_value, best_p = value, p
    return QuadraticMinimum(best_value, tuple(best_p), exhaustive=True)


def _multistart_seeds(n: int) -> np.ndarray:
    seeds = [np.full(n, 1.0 / n)]
    seeds.extend(np.eye(n))
    for i, j in combinations(range(n), 2):
        pair = np.zeros(n)
        pair[[i, j]] = 0.5
        seeds.append(pair)
    return np.array(seeds)


def multistart_quadratic_minimum(
    m: np.ndarray, tolerance: float = QK_TOLERANCE, max_iter: int = QK_MAX_ITER
) -> QuadraticMinimum:
    """
    Projected gradient descent from the uniform point, every vertex and
    every uniform pair, all starts advanced together.

    Raises:
        NonConvergence: no start became stationary within max_iter.
    """
    n = m.shape[0]
    lipschitz = 2.0 * float(np.max(np.abs(np.linalg.eigvalsh(m))))
    step = 1.0 / lipschitz
    p = _multistart_seeds(n)
    converged = np.zeros(p.shape[0], dtype=bool)

    for _ in range(max_iter):
        nxt = project_to_simplex(p - step * 2.0 * (p @ m))
        converged = np.max(np.abs(nxt - p), axis=1) <= tolerance
        p = nxt
        if converged.all():
            break

    if not converged.any():
        raise NonConvergence(f"no projected-gradient start converged in {max_iter} steps")
    if not converged.all():
        logger.debug("%d of %d starts did not converge", int((~converged).sum()), len(converged))

    values = np.einsum("si,ij,sj->s", p, m, p)
    values[~converged] = np.inf
    best = int(np.argmin(values))
    return QuadraticMinimum(float(values[best]), tuple(p[best]), exhaustive=False)


def quadratic_minimum(
    m: np.ndarray,
    mode: QuadraticMode = QuadraticMode.AUTO,
    tolerance: float = QK_TOLERANCE,
    max_iter: int = QK_MAX_ITER,
    exhaustive_max: int = EXHAUSTIVE_SUPPORT_MAX,
) -> QuadraticMinimum:
    if mode is QuadraticMode.AUTO:
        mode = QuadraticMode.EXHAUSTIVE if m.shape[0] <= exhaustive_max else QuadraticMode.MULTISTART
    if mode is QuadraticMode.EXHAUSTIVE:
        return exhaustive_quadratic_minimum(m)
    return multistart_quadratic_minimum(m, tolerance, max_iter)


def qk_min(
    w: Channel,
    rho: float,
    k: int = 1,
    mode: QuadraticMode = QuadraticMode.AUTO,
    tolerance: float = QK_TOLERANCE,
    max_iter: int = QK_MAX_ITER,
    size_cap: int = DEFAULT_SIZE_CAP,
    exhaustive_max: int = EXHAUSTIVE_SUPPORT_MAX,
) -> QuadraticMinimum:
    """min over P on X^k of Q^k(rho, P)."""
    if rho < 1:
        raise ValueError(f"rho must be >= 1, got {rho}")
    m = gram(w, k, size_cap).powered(rho)
    return quadratic_minimum(m, mode, tolerance, max_iter, exhaustive_max)


def e_x(w: Channel, rho: float, k: int = 1, **qk_options) -> float:
    """E_x(rho, k) = -(rho/k) log2 min_P Q^k(rho, P)."""
    minimum = qk_min(w, rho, k, **qk_options)
    return -(rho / k) * math.log2(minimum.value)


# =============================================================================
# EXPURGATION BOUND
# =============================================================================

def r_ex(
    w: Channel, k: int = 1, size_cap: int = DEFAULT_SIZE_CAP, vertex_cap: int = DEFAULT_VERTEX_CAP
) -> ExactLogRate:
    """
    R_k^ex(W) = (1/k) log2 alpha(G_k), G_k the confusability graph of W^k.

    As rho grows, g_k^{1/rho} tends to the indicator of g_k > 0 and the
    limiting quadratic minimum is 1/alpha(G_k).
    """
    return zero_error_rate(w, k, size_cap, vertex_cap)


def e_ex(
    w: Channel,
    rate: float,
    k: int = 1,
    config: RhoSearchConfig = DEFAULT_SEARCH,
    size_cap: int = DEFAULT_SIZE_CAP,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    mode: QuadraticMode = QuadraticMode.AUTO,
    qk_tolerance: float = QK_TOLERANCE,
    qk_max_iter: int = QK_MAX_ITER,
    exhaustive_max: int = EXHAUSTIVE_SUPPORT_MAX,
) -> ExpurgationResult:
    """
    sup over rho >= 1 of E_x(rho, k) - rho R, clamped at 0.

    +inf exactly when R <= R_k^ex(W); the witness distribution is then
    uniform over a maximum independent set of G_k.

    Raises:
        RhoCapExceeded: still increasing at config.rho_cap.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    threshold = r_ex(w, k, size_cap, vertex_cap)
    if rate <= threshold.rate:
        graph = strong_power(confusability_graph(w), k, size_cap)
        code = maximum_independent_set(graph, vertex_cap)
        p_star = np.zeros(graph.vertex_count)
        p_star[list(code)] = 1.0 / len(code)
        return ExpurgationResult(BoundValue.infinite(threshold), math.inf, tuple(p_star), k)

    gram_k = gram(w, k, size_cap)
    cache = {}

    def minimum_at(rho: float) -> QuadraticMinimum:
        if rho not in cache:
            cache[rho] = quadratic_minimum(
                gram_k.powered(rho), mode, qk_tolerance, qk_max_iter, exhaustive_max
            )
        return cache[rho]

    def objective(rho: float) -> float:
        return -(rho / k) * math.log2(minimum_at(rho).value) - rho * rate

    lo, hi = bracket_maximum(objective, 1.0, config.rho_cap, rate=rate)
    best = golden_section_max(objective, lo, hi, config.tolerance, config.max_iter)
    if best.value <= 0:
        return ExpurgationResult(BoundValue.finite(0.0, rho=1.0), 1.0, minimum_at(1.0).distribution, k)
    p_star = minimum_at(best.argmax).distribution
    return ExpurgationResult(
        BoundValue.finite(best.value, rho=best.argmax, distribution=p_star),
        best.argmax,
        p_star,
        k,
    )


def e_ex_rho_limit(w: Channel, k: int = 1, rho: float = 1e3, size_cap: int = DEFAULT_SIZE_CAP) -> float:
    """Exhaustive-support quadratic minimum at large rho; tends to 1/alpha(G_k)."""
    return exhaustive_quadratic_minimum(gram(w, k, size_cap).powered(rho)).value

