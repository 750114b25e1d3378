"""
Tests for channel/product reports and exact-value rendering.
"""

import math
import random
from fractions import Fraction as F
from itertools import product

import pytest

from src.channel import bsc, identity, new_channel, random_channel, typewriter, uniform_rows
from src.game import ExactLogRate
from src.report import (
    ProductVerdict,
    build_channel_report,
    build_product_report,
    render_float,
    render_log_rate,
    render_rational,
)

TW3 = typewriter(3, F(1, 4))
BINARY_ROW_SUPPORTS = [(0,), (1,), (0, 1)]


def make_binary_channel(supports, p=F(1, 3)):
    """2x2 channel with the given row supports; a two-letter row is (p, 1 - p)."""
    rows = []
    for support in supports:
        if len(support) == 2:
            rows.append([p, 1 - p])
        else:
            rows.append([1 if y in support else 0 for y in range(2)])
    return new_channel(rows)


class TestRendering:
    """Tests for the render helpers."""

    def test_rational(self):
        """Test rationals keep num/den with a decimal hint."""
        assert render_rational(F(2, 3)) == "2/3 (≈ 0.666666666667)"
        assert render_rational(F(1)) == "1 (≈ 1)"

    def test_log_rate(self):
        """Test log-rates print their exact argument."""
        text = render_log_rate(ExactLogRate(F(2, 3)))
        assert text.startswith("log2(3/2) from psi 2/3")

    def test_blocklength_prefix(self):
        """Test blocklength k renders a (1/k) factor."""
        text = render_log_rate(ExactLogRate(F(1, 5), blocklength=2))
        assert text.startswith("(1/2)log2(5) from psi 1/5")

    def test_zero_rate(self):
        """Test psi = 1 renders as 0."""
        assert render_log_rate(ExactLogRate.zero()) == "0 from psi 1"

    def test_float(self):
        """Test None renders as n/a."""
        assert render_float(None) == "n/a"
        assert render_float(0.5) == "0.5"


class TestChannelReport:
    """Tests for build_channel_report()."""

    def test_typewriter(self):
        """Test the TW3 report values."""
        report = build_channel_report(TW3)
        assert report.r_inf.psi == F(2, 3)
        assert report.c0_fb.is_zero
        assert not report.c0_positive
        assert report.confusable_pairs == 3
        assert report.r_ex[1].is_zero
        assert report.c0_lower[2].is_zero
        assert report.is_consistent()

    def test_text_sections(self):
        """Test the text report names every quantity."""
        text = build_channel_report(typewriter(5, F(1, 4))).to_text()
        for label in ("capacity:", "R_inf:", "C0_fb:", "R_crit:", "R_ex[k=1]:", "C0_lower[n=2]:",
                      "adjacency:"):
            assert label in text
        assert "(1/2)log2(5)" in text

    def test_degenerate_r_crit(self):
        """Test a useless channel reports R_crit as n/a."""
        report = build_channel_report(uniform_rows(2, 2))
        assert report.r_crit is None
        assert "R_crit: n/a" in report.to_text()

    def test_skips_large_blocklength(self):
        """Test blocklengths over the size cap are skipped, not fatal."""
        report = build_channel_report(typewriter(5, F(1, 4)), blocklengths=(1, 2, 3), size_cap=64)
        assert sorted(report.r_ex) == [1, 2]

    def test_oracle_bracket(self):
        """Test the optional fictitious-play bracket contains Psi_inf."""
        report = build_channel_report(TW3, blocklengths=(1,), oracle_iterations=2000)
        assert report.oracle.lower - 1e-12 <= 2 / 3 <= report.oracle.upper + 1e-12
        assert report.oracle.polished
        assert report.to_dict()["oracle"] == [report.oracle.lower, report.oracle.upper]

    def test_dict(self):
        """Test the JSON document keeps exact psi strings."""
        doc = build_channel_report(identity(2), blocklengths=(1,)).to_dict()
        assert doc["R_inf"]["psi"] == "1/2"
        assert doc["C0_fb"]["rate"] == pytest.approx(1.0)
        assert doc["C0_positive"] is True

    def test_random_consistency(self):
        """Test R_inf >= C0_FB and R_crit in range on random channels."""
        rng = random.Random(6)
        for _ in range(15):
            w = random_channel(rng, rng.randint(2, 3), rng.randint(2, 3))
            assert build_channel_report(w, blocklengths=(1,)).is_consistent()


class TestProductReport:
    """Tests for build_product_report()."""

    def test_super_additive_witness(self):
        """Test I2 x TW3 is super-additive with C0_FB psi 1/3."""
        report = build_product_report(identity(2), TW3)
        assert report.verdict is ProductVerdict.SUPER_ADDITIVE
        assert report.super_additivity_condition
        assert report.r_inf_additive
        assert report.c0_fb_product.psi == F(1, 3)
        assert report.c0_fb_product.rate == pytest.approx(1 + math.log2(1.5))
        assert "verdict: SUPER-ADDITIVE" in report.to_text()

    def test_additive_pair(self):
        """Test two channels with C0 > 0 are additive."""
        report = build_product_report(identity(2), typewriter(4, F(1, 4)))
        assert report.verdict is ProductVerdict.ADDITIVE
        assert not report.super_additivity_condition
        assert report.to_dict()["verdict"] == "ADDITIVE"

    def test_full_support_factor(self):
        """Test a factor with R_inf = 0 never makes the product super-additive."""
        report = build_product_report(identity(2), bsc(F(1, 10)))
        assert report.verdict is ProductVerdict.ADDITIVE
        assert not report.super_additivity_condition

    def test_dichotomy_on_random_pairs(self):
        """Test the verdict matches the exact condition on random pairs."""
        rng = random.Random(42)
        for _ in range(20):
            w1 = random_channel(rng, rng.randint(1, 4), rng.randint(1, 4))
            w2 = random_channel(rng, rng.randint(1, 4), rng.randint(1, 4))
            report = build_product_report(w1, w2)
            assert report.r_inf_additive
            assert (report.verdict is ProductVerdict.SUPER_ADDITIVE) == report.super_additivity_condition

    def test_binary_alphabets_always_additive(self):
        """Test C0_FB is additive for every pair of 2x2 support patterns and random 2x2 pairs."""
        patterns = list(product(BINARY_ROW_SUPPORTS, repeat=2))
        pairs = [(make_binary_channel(a), make_binary_channel(b)) for a in patterns for b in patterns]
        rng = random.Random(9)
        pairs += [(random_channel(rng, 2, 2, max_weight=5), random_channel(rng, 2, 2, max_weight=5))
                  for _ in range(30)]
        for w1, w2 in pairs:
            report = build_product_report(w1, w2)
            assert report.verdict is ProductVerdict.ADDITIVE
            assert report.c0_fb_product.psi == report.c0_fb_sum_psi
