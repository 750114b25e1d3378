"""
Exact zero-sum matrix games over probability simplices.

The row player (the maximizer) picks v over the rows, the column player
(the minimizer) picks u over the columns, and the payoff is F(v, u) = v^T A u.
For a channel the rows are outputs and the columns are inputs, so
solve_game(A(W)) yields Psi_inf(W) directly.

The primary solver is a rational tableau simplex with Bland's rule; nothing
here rounds. Fictitious play and a HiGHS linear program are kept as float
oracles for cross-checking.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from .channel import Channel, SupportMatrix, bhattacharyya, support_matrix
from .errors import DegenerateGame, DegenerateMatrix

logger = logging.getLogger(__name__)

Matrix = Sequence[Sequence[Union[Fraction, int]]]

# Fictitious-play polish: bracket width that counts as closed, how far a
# kernel solution may dip below zero, and how many kernels to try.
POLISH_TOLERANCE = 1e-9
KERNEL_SLACK = 1e-12
MAX_KERNELS = 20000


@dataclass(frozen=True)
class GameSolution:
    """
    Exact value of a matrix game plus optimal mixed strategies.

    Certificate:
        row_guarantee[j] = (v^T A)_j for every pure column reply j
        column_guarantee[i] = (A u)_i for every pure row reply i
    An optimal pair satisfies min(row_guarantee) == value == max(column_guarantee).
    """
    value: Fraction
    maximizer_strategy: Tuple[Fraction, ...]
    minimizer_strategy: Tuple[Fraction, ...]
    row_guarantee: Tuple[Fraction, ...]
    column_guarantee: Tuple[Fraction, ...]
    pivots: int = 0

    def is_certified(self) -> bool:
        return (
            min(self.row_guarantee) == self.value == max(self.column_guarantee)
            and sum(self.maximizer_strategy) == 1
            and sum(self.minimizer_strategy) == 1
            and all(p >= 0 for p in self.maximizer_strategy)
            and all(p >= 0 for p in self.minimizer_strategy)
        )


@dataclass(frozen=True)
class ExactLogRate:
    """
    A rate log2(1/psi) / blocklength carried by its exact argument psi.

    blocklength > 1 is used for graph-exact rates such as (1/k) log2 alpha,
    stored as psi = 1/alpha.
    """
    psi: Fraction
    blocklength: int = 1

    def __post_init__(self):
        if self.psi <= 0:
            raise DegenerateGame(f"log-rate needs psi > 0, got {self.psi}")
        if self.blocklength < 1:
            raise ValueError(f"blocklength must be >= 1, got {self.blocklength}")

    @property
    def rate(self) -> float:
        # log of numerator and denominator separately keeps huge Fractions finite
        return (
            math.log2(self.psi.denominator) - math.log2(self.psi.numerator)
        ) / self.blocklength

    @property
    def is_zero(self) -> bool:
        return self.psi == 1

    @classmethod
    def zero(cls) -> "ExactLogRate":
        return cls(Fraction(1))

    def __float__(self) -> float:
        return self.rate


# =============================================================================
# EXACT SIMPLEX
# =============================================================================

def _as_fractions(matrix: Union[Matrix, SupportMatrix]) -> List[List[Fraction]]:
    if isinstance(matrix, SupportMatrix):
        return matrix.as_fractions()
    rows = [[Fraction(v) for v in row] for row in matrix]
    if not rows or not rows[0]:
        raise DegenerateMatrix("game matrix is empty")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise DegenerateMatrix("game matrix rows have different lengths")
    return rows


def _simplex_solve(a: List[List[Fraction]]) -> GameSolution:
    """
    Solve the game on an arbitrary rational matrix.

    Shifts the payoffs to be >= 1, then solves
        maximize 1^T w  subject to  A' w <= 1, w >= 0
    whose optimum is 1/value'. The minimizer is u = w * value' and the
    maximizer is read from the slack reduced costs (the LP dual).
    """
    m = len(a)
    n = len(a[0])
    offset = 1 - min(min(row) for row in a)
    shifted = [[v + offset for v in row] for row in a]

    # tableau rows: n structural columns, m slack columns, rhs
    width = n + m
    tableau = []
    for i in range(m):
        row = shifted[i] + [Fraction(0)] * m + [Fraction(1)]
        row[n + i] = Fraction(1)
        tableau.append(row)
    objective = [Fraction(1)] * n + [Fraction(0)] * m + [Fraction(0)]
    basis = [n + i for i in range(m)]

    pivots = 0
    while True:
        entering = next((j for j in range(width) if objective[j] > 0), None)
        if entering is None:
            break

        leaving = None
        best = None
        for i in range(m):
            coef = tableau[i][entering]
            if coef > 0:
                key = (tableau[i][-1] / coef, basis[i])
                if best is None or key < best:
                    best = key
                    leaving = i
        if leaving is None:
            # cannot happen with a strictly positive shifted matrix
            raise DegenerateMatrix("game LP is unbounded")

        pivot_row = tableau[leaving]
        pivot = pivot_row[entering]
        pivot_row = [v / pivot for v in pivot_row]
        tableau[leaving] = pivot_row
        for i in range(m):
            if i != leaving:
                factor = tableau[i][entering]
                if factor:
                    tableau[i] = [v - factor * p for v, p in zip(tableau[i], pivot_row)]
        factor = objective[entering]
        objective = [v - factor * p for v, p in zip(objective, pivot_row)]
        basis[leaving] = entering
        pivots += 1

    optimum = -objective[-1]
    shifted_value = 1 / optimum

    w = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            w[var] = tableau[i][-1]
    u = tuple(x * shifted_value for x in w)
    v = tuple(-objective[n + i] * shifted_value for i in range(m))

    value = shifted_value - offset
    row_guarantee = tuple(sum((v[i] * a[i][j] for i in range(m)), Fraction(0)) for j in range(n))
    column_guarantee = tuple(sum((a[i][j] * u[j] for j in range(n)), Fraction(0)) for i in range(m))

    logger.debug("simplex %dx%d solved in %d pivots, value %s", m, n, pivots, value)
    return GameSolution(
        value=value,
        maximizer_strategy=v,
        minimizer_strategy=u,
        row_guarantee=row_guarantee,
        column_guarantee=column_guarantee,
        pivots=pivots,
    )


def solve_game(matrix: Union[Matrix, SupportMatrix]) -> GameSolution:
    """
    Exact value and optimal strategies of a zero-sum game.

    Args:
        matrix: |rows| x |cols| rational payoffs; rows belong to the maximizer.

    Raises:
        DegenerateMatrix: empty matrix or an all-zero column.
    """
    a = _as_fractions(matrix)
    for j in range(len(a[0])):
        if all(row[j] == 0 for row in a):
            raise DegenerateMatrix(f"column {j} of the game matrix is all zero")
    return _simplex_solve(a)


def transpose_negated(matrix: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """-A^T: swaps the roles of the two players."""
    return [[-matrix[i][j] for i in range(len(matrix))] for j in range(len(matrix[0]))]


def solve_min_max(matrix: Matrix) -> GameSolution:
    """
    min over columns-mixtures of max over rows, solved from the column side.

    Runs the simplex on -A^T, so the value comes from a different tableau
    than solve_game(A). The returned solution is expressed for A itself.
    """
    a = _as_fractions(matrix)
    dual = _simplex_solve(transpose_negated(a))
    return GameSolution(
        value=-dual.value,
        maximizer_strategy=dual.minimizer_strategy,
        minimizer_strategy=dual.maximizer_strategy,
        row_guarantee=tuple(-g for g in dual.column_guarantee),
        column_guarantee=tuple(-g for g in dual.row_guarantee),
        pivots=dual.pivots,
    )


# =============================================================================
# CHANNEL QUANTITIES
# =============================================================================

@lru_cache(maxsize=256)
def psi_inf(w: Channel) -> ExactLogRate:
    """Psi_inf(W) = max_Q min_x sum_{y: W(y|x)>0} Q(y); rate is R_inf(W)."""
    solution = solve_game(support_matrix(w))
    return ExactLogRate(solution.value)


def psi_fb(w: Channel) -> ExactLogRate:
    """Psi_FB(W) = min_P max_y sum_{x: W(y|x)>0} P(x); rate is G(W)."""
    solution = solve_min_max(support_matrix(w).entries)
    return ExactLogRate(solution.value)


def has_nonconfusable_pair(w: Channel) -> bool:
    return any(
        bhattacharyya(w, x, x2).is_zero
        for x, x2 in combinations(range(w.input_size), 2)
    )


def c0_fb(w: Channel) -> ExactLogRate:
    """
    Zero-error feedback capacity by Shannon's formula.

    0 (psi = 1) when every pair of inputs is confusable, otherwise log2(1/Psi_FB).
    """
    if not has_nonconfusable_pair(w):
        return ExactLogRate.zero()
    return psi_fb(w)


# =============================================================================
# FLOAT ORACLES
# =============================================================================

@dataclass(frozen=True)
class FictitiousPlayResult:
    """
    Float bracket [lower, upper] on a game value.

    polished is set when a kernel solve on the supports fictitious play
    favoured closed the bracket to POLISH_TOLERANCE.
    """
    lower: float
    upper: float
    iterations: int
    polished: bool = False

    @property
    def estimate(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def _kernel_strategy(kernel: np.ndarray) -> Optional[np.ndarray]:
    """
    Mixture of the kernel's rows that equalizes its columns.

    Solves K^T v = t 1, sum v = 1. None when the system is singular or
    the solution leaves the simplex.
    """
    k = kernel.shape[0]
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = kernel.T
    system[:k, k] = -1.0
    system[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        solution = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        return None
    v = solution[:k]
    if not np.all(np.isfinite(v)) or v.min() < -KERNEL_SLACK:
        return None
    v = np.clip(v, 0.0, None)
    return v / v.sum()


def _polish(a: np.ndarray, row_counts: np.ndarray, col_counts: np.ndarray,
            lower: float, upper: float) -> Tuple[float, float, bool]:
    """
    Tighten a bracket with square kernels, most-played strategies first.

    Every matrix game has an optimal pair equalizing some nonsingular square
    submatrix of the payoffs shifted to be positive. Each kernel's mixtures
    are scored on the full matrix, so the bracket stays valid whatever the
    kernel order.
    """
    m, n = a.shape
    shifted = a - a.min() + 1.0
    rows = [int(i) for i in np.argsort(-row_counts, kind="stable")]
    cols = [int(j) for j in np.argsort(-col_counts, kind="stable")]
    tried = 0
    for size in range(1, min(m, n) + 1):
        for row_set in combinations(rows, size):
            for col_set in combinations(cols, size):
                tried += 1
                if tried > MAX_KERNELS:
                    logger.debug("kernel polish gave up after %d kernels", MAX_KERNELS)
                    return lower, upper, False
                kernel = shifted[np.ix_(row_set, col_set)]
                v = _kernel_strategy(kernel)
                if v is not None:
                    full = np.zeros(m)
                    full[list(row_set)] = v
                    lower = max(lower, float((full @ a).min()))
                u = _kernel_strategy(kernel.T)
                if u is not None:
                    full = np.zeros(n)
                    full[list(col_set)] = u
                    upper = min(upper, float((a @ full).max()))
                if upper - lower <= POLISH_TOLERANCE:
                    return lower, upper, True
    return lower, upper, False


def fictitious_play(matrix: Matrix, iterations: int = 20000, polish: bool = True) -> FictitiousPlayResult:
    """
    Brown-Robinson fictitious play.

    Both players best-respond to the other's empirical mixture. The
    empirical mixtures always bracket the value:
        min_j (v_bar^T A)_j <= value <= max_i (A u_bar)_i
    and the best bracket seen over all iterations is kept. With polish,
    the play counts then rank strategies for a kernel search that closes
    the bracket to float precision.
    """
    a = np.array([[float(x) for x in row] for row in matrix], dtype=float)
    m, n = a.shape
    row_counts = np.zeros(m)
    col_counts = np.zeros(n)
    row_payoff = np.zeros(n)   # sum over played rows of A[i, :]
    col_payoff = np.zeros(m)   # sum over played columns of A[:, j]

    i = 0
    lower, upper = -np.inf, np.inf
    for t in range(1, iterations + 1):
        row_counts[i] += 1
        row_payoff += a[i, :]
        j = int(np.argmin(row_payoff))
        col_counts[j] += 1
        col_payoff += a[:, j]
        i = int(np.argmax(col_payoff))

        lower = max(lower, float(row_payoff.min()) / t)
        upper = min(upper, float(col_payoff.max()) / t)

    polished = False
    if polish and upper - lower > POLISH_TOLERANCE:
        lower, upper, polished = _polish(a, row_counts, col_counts, lower, upper)
    return FictitiousPlayResult(lower=lower, upper=upper, iterations=iterations, polished=polished)


def lp_value(matrix: Matrix) -> float:
    """Game value by HiGHS: maximize t s.t. A^T v >= t, v on the simplex."""
    a = np.array([[float(x) for x in row] for row in matrix], dtype=float)
    m, n = a.shape
    c = np.zeros(m + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-a.T, np.ones((n, 1))])
    b_ub = np.zeros(n)
    a_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    b_eq = np.ones(1)
    bounds = [(0, None)] * m + [(None, None)]
    result = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if not result.success:
        raise DegenerateMatrix(f"linprog failed: {result.message}")
    return float(-result.fun)
