"""
Randomized check of the exact identities behind R_inf and C0_FB.

For random rational channels it verifies:
- minimax equality: Psi_inf(W) == Psi_FB(W)
- additivity: Psi_inf(W1 x W2) == Psi_inf(W1) * Psi_inf(W2)
- super-additivity dichotomy: C0_FB(W1 x W2) exceeds the sum exactly when
  one factor has C0_FB = 0, the other C0_FB > 0, and both R_inf > 0

All comparisons are exact rationals.

Usage:
    python scripts/verify_identities.py
    python scripts/verify_identities.py --count 500 --seed 7
"""

import argparse
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.channel import identity, kronecker, random_channel, typewriter
from src.game import psi_fb, psi_inf
from src.report import ProductVerdict, build_product_report


@dataclass
class CheckSummary:
    channels: int = 0
    pairs: int = 0
    minimax_failures: List[str] = field(default_factory=list)
    additivity_failures: List[str] = field(default_factory=list)
    dichotomy_failures: List[str] = field(default_factory=list)
    super_additive_pairs: int = 0

    @property
    def ok(self) -> bool:
        return not (self.minimax_failures or self.additivity_failures or self.dichotomy_failures)


def run_checks(count: int = 200, seed: int = 0, max_alphabet: int = 6) -> CheckSummary:
    """Run `count` single-channel checks and `count // 4` product checks."""
    rng = random.Random(seed)
    summary = CheckSummary()

    for i in range(count):
        w = random_channel(rng, rng.randint(1, max_alphabet), rng.randint(1, max_alphabet))
        summary.channels += 1
        if psi_inf(w).psi != psi_fb(w).psi:
            summary.minimax_failures.append(f"channel {i}: {w.rows}")

    # curated witness pair first, then random pairs with product size <= 36
    pairs = [(identity(2), typewriter(3, "1/4"))]
    for _ in range(count // 4):
        pairs.append((
            random_channel(rng, rng.randint(1, 6), rng.randint(1, 6)),
            random_channel(rng, rng.randint(1, 6), rng.randint(1, 6)),
        ))

    for i, (w1, w2) in enumerate(pairs):
        if w1.input_size * w2.input_size > 36 or w1.output_size * w2.output_size > 36:
            continue
        summary.pairs += 1
        report = build_product_report(w1, w2)
        if psi_inf(kronecker(w1, w2)).psi != psi_inf(w1).psi * psi_inf(w2).psi:
            summary.additivity_failures.append(f"pair {i}")
        super_additive = report.verdict is ProductVerdict.SUPER_ADDITIVE
        summary.super_additive_pairs += super_additive
        if super_additive != report.super_additivity_condition:
            summary.dichotomy_failures.append(f"pair {i}")

    return summary


def main():
    parser = argparse.ArgumentParser(description="Check exact R_inf / C0_FB identities")
    parser.add_argument("--count", type=int, default=200, help="Number of random channels")
    parser.add_argument("--seed", type=int, default=0, help="Random seed")
    args = parser.parse_args()

    summary = run_checks(args.count, args.seed)

    print(f"Channels checked:      {summary.channels}")
    print(f"Product pairs checked: {summary.pairs} ({summary.super_additive_pairs} super-additive)")
    print(f"Minimax failures:      {len(summary.minimax_failures)}")
    print(f"Additivity failures:   {len(summary.additivity_failures)}")
    print(f"Dichotomy failures:    {len(summary.dichotomy_failures)}")
    for line in summary.minimax_failures + summary.additivity_failures + summary.dichotomy_failures:
        print(f"  {line}")

    return 0 if summary.ok else 1


if __name__ == "__main__":
    sys.exit(main())
