"""
Tests for confusability graphs, strong products and independence numbers.
"""

import math
import random
from fractions import Fraction as F

import networkx as nx
import pytest

from src.channel import bsc, identity, kronecker, random_channel, typewriter
from src.errors import BudgetExceeded, SizeOverflow
from src.gallager import capacity
from src.game import c0_fb, psi_inf
from src.zero_error import (
    ConfusabilityGraph,
    c0_lower,
    c0_positive,
    complete_graph,
    confusability_graph,
    cycle_graph,
    empty_graph,
    independence_number,
    maximum_independent_set,
    strong_power,
    strong_product,
    zero_error_rate,
)


def make_random_graph(rng: random.Random, n: int, density: float = 0.5) -> ConfusabilityGraph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < density]
    return ConfusabilityGraph.from_edges(n, edges)


def networkx_alpha(g: ConfusabilityGraph) -> int:
    """alpha(G) as the clique number of the complement."""
    _, weight = nx.max_weight_clique(nx.complement(g.to_networkx()), weight=None)
    return weight


class TestConfusabilityGraph:
    """Tests for graph construction."""

    def test_typewriter_is_cycle(self):
        """Test the TW5 confusability graph is the 5-cycle."""
        g = confusability_graph(typewriter(5, F(1, 4)))
        assert g == cycle_graph(5)

    def test_identity_has_no_edges(self):
        """Test noiseless inputs are never confusable."""
        assert confusability_graph(identity(4)).edge_count == 0

    def test_full_support_is_complete(self):
        """Test a full-support channel gives the complete graph."""
        assert confusability_graph(bsc(F(1, 10))) == complete_graph(2)

    def test_rejects_self_loop(self):
        """Test self-loops are rejected."""
        with pytest.raises(ValueError):
            ConfusabilityGraph(2, ((1, 0), (0, 0)))

    def test_rejects_asymmetric(self):
        """Test non-symmetric adjacency is rejected."""
        with pytest.raises(ValueError):
            ConfusabilityGraph(2, ((0, 1), (0, 0)))

    def test_adjacency_text(self):
        """Test the adjacency-list export names every vertex."""
        text = cycle_graph(4).adjacency_text()
        assert len(text.splitlines()) == 4
        assert text.splitlines()[0].split() == ["0", "1", "3"]


class TestStrongProduct:
    """Tests for strong_product() and strong_power()."""

    def test_matches_networkx(self):
        """Test edges agree with networkx.strong_product on random graphs."""
        rng = random.Random(3)
        for _ in range(10):
            g1 = make_random_graph(rng, rng.randint(1, 5))
            g2 = make_random_graph(rng, rng.randint(1, 5))
            ours = strong_product(g1, g2)
            theirs = nx.strong_product(g1.to_networkx(), g2.to_networkx())
            n2 = g2.vertex_count
            expected = {
                frozenset((a * n2 + b, c * n2 + d)) for (a, b), (c, d) in theirs.edges()
            }
            actual = {frozenset(e) for e in ours.to_networkx().edges()}
            assert actual == expected

    def test_kronecker_channel_graph(self):
        """Test the graph of W1 x W2 is the strong product of the factor graphs."""
        rng = random.Random(25)
        for _ in range(20):
            w1 = random_channel(rng, rng.randint(1, 4), rng.randint(1, 4))
            w2 = random_channel(rng, rng.randint(1, 4), rng.randint(1, 4))
            joint = confusability_graph(kronecker(w1, w2))
            assert joint == strong_product(confusability_graph(w1), confusability_graph(w2))

    def test_c5_power(self):
        """Test C5 x C5 has 25 vertices, each with 8 neighbours."""
        g = strong_power(cycle_graph(5), 2)
        assert g.vertex_count == 25
        assert all(g.degree(v) == 8 for v in range(25))

    def test_size_cap(self):
        """Test strong powers beyond the size cap raise SizeOverflow."""
        with pytest.raises(SizeOverflow):
            strong_power(cycle_graph(5), 3, size_cap=100)


class TestIndependenceNumber:
    """Tests for maximum_independent_set()."""

    def test_small_graphs(self):
        """Test alpha on empty, complete and cycle graphs."""
        assert independence_number(empty_graph(6)) == 6
        assert independence_number(complete_graph(6)) == 1
        assert independence_number(cycle_graph(5)) == 2
        assert independence_number(cycle_graph(6)) == 3

    def test_pentagon_square(self):
        """Test alpha(C5 x C5) = 5."""
        assert independence_number(strong_power(cycle_graph(5), 2)) == 5

    def test_witness_is_independent(self):
        """Test the returned set has no internal edges."""
        g = strong_power(cycle_graph(5), 2)
        code = maximum_independent_set(g)
        assert len(code) == 5
        assert all(not g.adjacent(u, v) for u in code for v in code if u != v)

    def test_matches_networkx(self):
        """Test alpha against the clique number of the complement."""
        rng = random.Random(11)
        for _ in range(25):
            g = make_random_graph(rng, rng.randint(1, 14), density=rng.choice([0.2, 0.5, 0.8]))
            assert independence_number(g) == networkx_alpha(g)

    def test_vertex_cap(self):
        """Test graphs above the vertex cap raise BudgetExceeded."""
        with pytest.raises(BudgetExceeded):
            independence_number(empty_graph(10), vertex_cap=8)


class TestZeroErrorRate:
    """Tests for zero_error_rate(), c0_lower() and c0_positive()."""

    def test_typewriter_four(self):
        """Test c0_lower(TW4, 1) = 1."""
        assert c0_lower(typewriter(4, F(1, 4)), 1) == pytest.approx(1.0)

    def test_typewriter_five(self):
        """Test TW5 reaches (1/2) log2 5 at blocklength 2."""
        w = typewriter(5, F(1, 4))
        assert c0_lower(w, 1) == pytest.approx(1.0)
        rate = zero_error_rate(w, 2)
        assert rate.psi == F(1, 5)
        assert rate.blocklength == 2
        assert rate.rate == pytest.approx(0.5 * math.log2(5))

    def test_full_support(self):
        """Test a full-support channel has no zero-error code beyond one word."""
        assert zero_error_rate(bsc(F(1, 10)), 2).is_zero

    def test_c0_positive(self):
        """Test c0_positive on both sides."""
        assert c0_positive(typewriter(4, F(1, 4)))
        assert not c0_positive(typewriter(3, F(1, 4)))
        assert not c0_positive(bsc(F(1, 10)))

    def test_lower_bound_monotone_in_blocklength_product(self):
        """Test alpha(G^2) >= alpha(G)^2 on random channels."""
        rng = random.Random(21)
        for _ in range(10):
            w = random_channel(rng, rng.randint(2, 5), rng.randint(2, 5))
            alpha1 = zero_error_rate(w, 1).psi.denominator
            alpha2 = zero_error_rate(w, 2).psi.denominator
            assert alpha2 >= alpha1 ** 2

    def test_bounded_by_r_inf(self):
        """Test c0_lower(W, n) <= R_inf(W) whenever C0(W) > 0."""
        rng = random.Random(22)
        for _ in range(30):
            w = random_channel(rng, rng.randint(2, 5), rng.randint(2, 5))
            if not c0_positive(w):
                continue
            for n in (1, 2):
                assert c0_lower(w, n) <= psi_inf(w).rate + 1e-12

    def test_bounded_by_capacity(self):
        """Test c0_lower(W, n) <= C(W) on test and random channels."""
        rng = random.Random(23)
        channels = [typewriter(4, F(1, 4)), typewriter(5, F(1, 2)), identity(3), bsc(F(1, 10))]
        channels += [random_channel(rng, rng.randint(2, 4), rng.randint(2, 4)) for _ in range(20)]
        for w in channels:
            for n in (1, 2):
                assert c0_lower(w, n) <= capacity(w) + 1e-6

    def test_c0_positive_matches_feedback(self):
        """Test C0 > 0 exactly when C0_FB > 0."""
        rng = random.Random(24)
        for _ in range(100):
            w = random_channel(rng, rng.randint(1, 5), rng.randint(1, 5))
            assert c0_positive(w) == (not c0_fb(w).is_zero)
