"""
Channel and product-channel reports.

Exact quantities are rendered as "num/den (≈ decimal)" so that downstream
consumers can recover the rational; decimals are for reading only.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Sequence

from .channel import DEFAULT_SIZE_CAP, Channel, kronecker, support_matrix
from .errors import BudgetExceeded, DegenerateChannel, NonConvergence, SizeOverflow
from .expurgation import r_ex
from .gallager import capacity, r_crit
from .game import ExactLogRate, FictitiousPlayResult, c0_fb, fictitious_play, psi_inf
from .zero_error import DEFAULT_VERTEX_CAP, confusability_graph

logger = logging.getLogger(__name__)

DECIMALS = 12


def render_rational(q: Fraction) -> str:
    """'2/3 (≈ 0.666666666667)'; integers print without a denominator."""
    return f"{q} (≈ {float(q):.{DECIMALS}g})"


def render_log_rate(r: ExactLogRate) -> str:
    """'log2(3/2) from psi 2/3 (≈ 0.584962500721)'; blocklength k adds a (1/k) factor."""
    if r.is_zero:
        return "0 from psi 1"
    inverse = 1 / r.psi
    scale = "" if r.blocklength == 1 else f"(1/{r.blocklength})"
    return f"{scale}log2({inverse}) from psi {r.psi} (≈ {r.rate:.{DECIMALS}g})"


def render_float(value: Optional[float]) -> str:
    if value is None:
        return "n/a"
    return f"{value:.{DECIMALS}g}"


def _rate_document(r: ExactLogRate) -> dict:
    return {
        "psi": str(r.psi),
        "blocklength": r.blocklength,
        "rate": r.rate,
    }


# =============================================================================
# SINGLE CHANNEL
# =============================================================================

@dataclass
class ChannelReport:
    """Everything the info command prints about one channel."""
    input_size: int
    output_size: int
    capacity: float
    r_inf: ExactLogRate
    c0_fb: ExactLogRate
    r_crit: Optional[float]
    r_ex: Dict[int, ExactLogRate] = field(default_factory=dict)
    c0_lower: Dict[int, ExactLogRate] = field(default_factory=dict)
    confusable_pairs: int = 0
    c0_positive: bool = False
    adjacency: str = ""
    oracle: Optional[FictitiousPlayResult] = None  # float bracket on Psi_inf

    def is_consistent(self) -> bool:
        """R_inf >= C0_FB and C >= R_crit >= 0 when defined."""
        ok = self.r_inf.psi <= self.c0_fb.psi
        if self.r_crit is not None:
            ok = ok and 0 <= self.r_crit <= self.capacity + 1e-9
        return ok

    def to_text(self) -> str:
        lines = [
            f"channel: {self.input_size} inputs x {self.output_size} outputs",
            f"capacity: {render_float(self.capacity)}",
            f"R_inf: {render_log_rate(self.r_inf)}",
            f"C0_fb: {render_log_rate(self.c0_fb)}",
            f"R_crit: {render_float(self.r_crit)}",
        ]
        for k, rate in sorted(self.r_ex.items()):
            lines.append(f"R_ex[k={k}]: {render_log_rate(rate)}")
        for n, rate in sorted(self.c0_lower.items()):
            lines.append(f"C0_lower[n={n}]: {render_log_rate(rate)}")
        if self.oracle is not None:
            lines.append(
                f"Psi_inf oracle: [{render_float(self.oracle.lower)}, {render_float(self.oracle.upper)}]"
                f" after {self.oracle.iterations} rounds"
                + (" and a kernel polish" if self.oracle.polished else "")
            )
        lines.append(
            f"confusability: {self.confusable_pairs} confusable pairs, "
            f"C0 {'> 0' if self.c0_positive else '= 0'}"
        )
        if self.adjacency:
            lines.append("adjacency:")
            lines.extend(f"  {row}" for row in self.adjacency.splitlines())
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "input": self.input_size,
            "output": self.output_size,
            "capacity": self.capacity,
            "R_inf": _rate_document(self.r_inf),
            "C0_fb": _rate_document(self.c0_fb),
            "R_crit": self.r_crit,
            "R_ex": {str(k): _rate_document(r) for k, r in sorted(self.r_ex.items())},
            "C0_lower": {str(n): _rate_document(r) for n, r in sorted(self.c0_lower.items())},
            "confusable_pairs": self.confusable_pairs,
            "C0_positive": self.c0_positive,
            "oracle": None if self.oracle is None else [self.oracle.lower, self.oracle.upper],
        }


def build_channel_report(
    w: Channel,
    blocklengths: Sequence[int] = (1, 2),
    size_cap: int = DEFAULT_SIZE_CAP,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    capacity_tolerance: float = 1e-10,
    capacity_max_iter: int = 100000,
    oracle_iterations: Optional[int] = None,
) -> ChannelReport:
    """
    Assemble a ChannelReport.

    Blocklengths whose strong power exceeds the caps are skipped with a
    warning; the rest of the report is still produced.
    """
    try:
        critical = r_crit(w)
    except DegenerateChannel:
        critical = None
    except NonConvergence as e:
        logger.warning("R_crit skipped: %s", e)
        critical = None

    graph = confusability_graph(w)
    report = ChannelReport(
        input_size=w.input_size,
        output_size=w.output_size,
        capacity=capacity(w, capacity_tolerance, capacity_max_iter),
        r_inf=psi_inf(w),
        c0_fb=c0_fb(w),
        r_crit=critical,
        confusable_pairs=graph.edge_count,
        c0_positive=graph.has_non_edge(),
        adjacency=graph.adjacency_text(),
    )
    for k in blocklengths:
        try:
            rate = r_ex(w, k, size_cap, vertex_cap)
            report.r_ex[k] = rate
            report.c0_lower[k] = rate
        except (SizeOverflow, BudgetExceeded) as e:
            logger.warning("blocklength %d skipped: %s", k, e)
    if oracle_iterations:
        report.oracle = fictitious_play(support_matrix(w).entries, oracle_iterations)
    return report


# =============================================================================
# PRODUCT CHANNEL
# =============================================================================

class ProductVerdict(Enum):
    ADDITIVE = "ADDITIVE"
    SUPER_ADDITIVE = "SUPER-ADDITIVE"


@dataclass
class ProductReport:
    """R_inf and C0_FB of two factors and of their Kronecker product."""
    r_inf_first: ExactLogRate
    r_inf_second: ExactLogRate
    r_inf_product: ExactLogRate
    c0_fb_first: ExactLogRate
    c0_fb_second: ExactLogRate
    c0_fb_product: ExactLogRate

    @property
    def r_inf_additive(self) -> bool:
        return self.r_inf_product.psi == self.r_inf_first.psi * self.r_inf_second.psi

    @property
    def c0_fb_sum_psi(self) -> Fraction:
        return self.c0_fb_first.psi * self.c0_fb_second.psi

    @property
    def verdict(self) -> ProductVerdict:
        # log2(1/a) > log2(1/b) + log2(1/c)  <=>  a < b * c
        if self.c0_fb_product.psi < self.c0_fb_sum_psi:
            return ProductVerdict.SUPER_ADDITIVE
        return ProductVerdict.ADDITIVE

    @property
    def super_additivity_condition(self) -> bool:
        """min C0_FB = 0, max C0_FB > 0 and min R_inf > 0."""
        factors = (self.c0_fb_first, self.c0_fb_second)
        return (
            any(r.is_zero for r in factors)
            and any(not r.is_zero for r in factors)
            and not self.r_inf_first.is_zero
            and not self.r_inf_second.is_zero
        )

    def to_text(self) -> str:
        lines = [
            f"R_inf(W1): {render_log_rate(self.r_inf_first)}",
            f"R_inf(W2): {render_log_rate(self.r_inf_second)}",
            f"R_inf(W1 x W2): {render_log_rate(self.r_inf_product)}",
            f"R_inf sum: psi {render_rational(self.r_inf_first.psi * self.r_inf_second.psi)}"
            f" -> {'equal' if self.r_inf_additive else 'NOT equal'}",
            f"C0_fb(W1): {render_log_rate(self.c0_fb_first)}",
            f"C0_fb(W2): {render_log_rate(self.c0_fb_second)}",
            f"C0_fb(W1 x W2): {render_log_rate(self.c0_fb_product)}",
            f"C0_fb sum: psi {render_rational(self.c0_fb_sum_psi)}",
            f"super-additivity condition: {'holds' if self.super_additivity_condition else 'fails'}",
            f"verdict: {self.verdict.value}",
        ]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "R_inf": {
                "first": _rate_document(self.r_inf_first),
                "second": _rate_document(self.r_inf_second),
                "product": _rate_document(self.r_inf_product),
                "additive": self.r_inf_additive,
            },
            "C0_fb": {
                "first": _rate_document(self.c0_fb_first),
                "second": _rate_document(self.c0_fb_second),
                "product": _rate_document(self.c0_fb_product),
                "sum_psi": str(self.c0_fb_sum_psi),
            },
            "condition": self.super_additivity_condition,
            "verdict": self.verdict.value,
        }


def build_product_report(w1: Channel, w2: Channel, size_cap: int = DEFAULT_SIZE_CAP) -> ProductReport:
    joint = kronecker(w1, w2, size_cap=size_cap)
    return ProductReport(
        r_inf_first=psi_inf(w1),
        r_inf_second=psi_inf(w2),
        r_inf_product=psi_inf(joint),
        c0_fb_first=c0_fb(w1),
        c0_fb_second=c0_fb(w2),
        c0_fb_product=c0_fb(joint),
    )
