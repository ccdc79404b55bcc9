"""Shared fixtures and independent oracles for the test suite.

The oracles here (permutation Shapley, direct inclusion-exclusion
dividends) deliberately avoid the library's lattice kernels so they can
serve as ground truth for them.
"""

from itertools import combinations, permutations
from pathlib import Path

import numpy as np
import pytest

from taylorpoda import BackgroundSet, MlpModel, PolynomialModel, build_table
from taylorpoda.oracle import MlpLayer

REPO = Path(__file__).resolve().parent.parent
DEMO = REPO / "demo"


@pytest.fixture(scope="session")
def demo_dir() -> Path:
    return DEMO


def permutation_shapley(table) -> np.ndarray:
    """Mean marginal contribution over all d! orderings (exact, brutal)."""
    d = table.d
    totals = np.zeros(d)
    count = 0
    for perm in permutations(range(d)):
        mask = 0
        for i in perm:
            before = table[mask]
            mask |= 1 << i
            totals[i] += table[mask] - before
        count += 1
    return totals / count


def brute_harsanyi(table, S: int) -> float:
    """Direct inclusion-exclusion over explicit subsets of S."""
    members = [i for i in range(table.d) if S >> i & 1]
    total = 0.0
    for k in range(len(members) + 1):
        for combo in combinations(members, k):
            sub = 0
            for i in combo:
                sub |= 1 << i
            total += (-1.0) ** (len(members) - k) * table[sub]
    return total


def random_poly(rng, d, with_interactions=True) -> PolynomialModel:
    monomials = []
    for i in range(d):
        monomials.append((float(rng.normal()), {i: int(rng.integers(1, 3))}))
    if with_interactions:
        for _ in range(int(rng.integers(1, 4))):
            size = int(rng.integers(2, d + 1))
            feats = rng.choice(d, size=size, replace=False)
            monomials.append(
                (float(rng.normal()), {int(f): int(rng.integers(1, 3)) for f in feats})
            )
    return PolynomialModel(monomials, input_dim=d)


def random_mlp(rng, d, hidden=8, activation="tanh") -> MlpModel:
    w1 = rng.normal(0.0, 1.0 / np.sqrt(d), (hidden, d))
    b1 = rng.normal(0.0, 0.1, hidden)
    w2 = rng.normal(0.0, 1.0 / np.sqrt(hidden), (1, hidden))
    b2 = rng.normal(0.0, 0.1, 1)
    return MlpModel(
        [MlpLayer(w1, b1, activation), MlpLayer(w2, b2, "identity")]
    )


def random_model(rng, d):
    if rng.integers(0, 2) == 0:
        return random_poly(rng, d)
    return random_mlp(rng, d)


def quick_table(model, x, bg_rows, sigma=None):
    return build_table(
        model, np.asarray(x, dtype=float), BackgroundSet(np.asarray(bg_rows, dtype=float)), sigma
    )


@pytest.fixture()
def poly_xy():
    """f = x1*x2, the minimal interaction model."""
    return PolynomialModel([(1.0, {0: 1, 1: 1})], input_dim=2)


@pytest.fixture()
def poly_xy_5x():
    """f = x1*x2 + 5*x1, the two-feature worked example."""
    return PolynomialModel([(1.0, {0: 1, 1: 1}), (5.0, {0: 1})], input_dim=2)
