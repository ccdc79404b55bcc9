"""Analytic expansion oracle for polynomial models.

Rewriting a polynomial in the shifted basis prod_i (x_i - beta_i)^{k_i}
yields its exact finite expansion around any baseline: terms touching one
feature are independent effects, terms touching two or more are interaction
effects. Because the expansion is exact, postulate satisfaction of an
attribution method becomes machine-checkable against these terms -- this
only works with a single-row background equal to the expansion baseline,
where masked outputs coincide with sub-polynomial evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional

import numpy as np

from .allocation import XiAllocation
from .attribution import Attribution, Method, WeightFamily
from .errors import BackgroundNotSingleRow, NotPolynomial
from .masking import BackgroundSet, CoalitionValueTable, mask_of
from .oracle import FeatureVector, PolynomialModel

CHECK_TOL = 1e-9


@dataclass(frozen=True)
class TaylorTerm:
    """One shifted-basis term: coefficient * prod (x_i - beta_i)^{k_i}."""

    exponents: dict  # feature index -> positive exponent
    coefficient: float
    value: float  # numeric contribution at (x, beta)

    @property
    def support(self) -> frozenset:
        return frozenset(self.exponents)

    @property
    def is_independent(self) -> bool:
        return len(self.exponents) == 1

    @property
    def is_interaction(self) -> bool:
        return len(self.exponents) >= 2


def taylor_terms(poly: PolynomialModel, x, beta) -> list:
    """Exact expansion of the polynomial around ``beta``, constant term dropped.

    The returned term values plus f(beta) sum to f(x) exactly (up to float
    summation error); the expansion is finite so there is no truncation
    remainder.
    """
    if not isinstance(poly, PolynomialModel):
        raise NotPolynomial(f"need a PolynomialModel, got {type(poly).__name__}")
    x = x.values if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64)
    beta = beta.values if isinstance(beta, FeatureVector) else np.asarray(beta, dtype=np.float64)
    if x.size != poly.input_dim or beta.size != poly.input_dim:
        raise NotPolynomial(
            f"x and beta must have dimension {poly.input_dim}"
        )
    coeffs: dict = {}
    for coef, exps in poly.monomials:
        feats = sorted(exps)
        ranges = [range(exps[i] + 1) for i in feats]
        for ks in product(*ranges):
            c = coef
            for i, k in zip(feats, ks):
                e = exps[i]
                c *= math.comb(e, k) * beta[i] ** (e - k)
            index = tuple((i, k) for i, k in zip(feats, ks) if k > 0)
            if index:
                coeffs[index] = coeffs.get(index, 0.0) + c
    u = x - beta
    terms = []
    for index in sorted(coeffs):
        c = coeffs[index]
        val = c
        for i, k in index:
            val *= u[i] ** k
        terms.append(TaylorTerm(exponents=dict(index), coefficient=c, value=val))
    return terms


def _as_support(S) -> frozenset:
    if isinstance(S, (int, np.integer)):
        out = set()
        m, i = int(S), 0
        while m:
            if m & 1:
                out.add(i)
            m >>= 1
            i += 1
        return frozenset(out)
    return frozenset(int(i) for i in S)


def independent_sum(terms, i: int) -> float:
    """Total independent effect of feature i: terms supported exactly on {i}."""
    return float(sum(t.value for t in terms if t.support == frozenset({int(i)})))


def interaction_sum(terms, S) -> float:
    """Total interaction effect of coalition S: terms supported exactly on S."""
    support = _as_support(S)
    return float(sum(t.value for t in terms if t.support == support))


@dataclass(frozen=True)
class GenericAllocation:
    """A method's declared term-routing weights.

    ``tau[i, j]`` is the share of feature j's independent effect credited to
    feature i; ``zeta(i, mask)`` the share of coalition ``mask``'s
    interaction effect credited to member i (0 for non-members).
    """

    d: int
    tau: np.ndarray
    zeta: Callable[[int, int], float]


def occ1_allocation(d: int) -> GenericAllocation:
    return GenericAllocation(d=d, tau=np.eye(d), zeta=lambda i, mask: 1.0)


def shap_allocation(d: int) -> GenericAllocation:
    def zeta(i, mask):
        return 1.0 / bin(mask).count("1")

    return GenericAllocation(d=d, tau=np.eye(d), zeta=zeta)


def taylorpoda_allocation(xi: XiAllocation) -> GenericAllocation:
    from .masking import members_of

    def zeta(i, mask):
        return float(xi[mask][members_of(mask).index(i)])

    return GenericAllocation(d=xi.d, tau=np.eye(xi.d), zeta=zeta)


def weighted_shap_allocation(family: WeightFamily) -> GenericAllocation:
    """Declared weights implied by the semivalue sum.

    Independent effects of i are scaled by tau = sum over S excluding i of
    w_|S|; the interaction effect of T (i in T) is credited to i with weight
    sum over S covering T minus i of w_|S|.
    """
    d = family.d
    w = family.weights
    tau = np.eye(d) * family.tau()

    def zeta(i, mask):
        t = bin(mask).count("1")
        return float(
            sum(
                math.comb(d - t, s - t + 1) * w[s]
                for s in range(t - 1, d)
            )
        )

    return GenericAllocation(d=d, tau=tau, zeta=zeta)


@dataclass(frozen=True)
class PostulateReport:
    """Machine-checked postulate satisfaction for one attribution."""

    method: str
    precision: bool
    federation: bool
    zero_discrepancy: bool
    adaptation: Optional[bool] = None
    residuals: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "precision": self.precision,
            "federation": self.federation,
            "zero_discrepancy": self.zero_discrepancy,
            "adaptation": self.adaptation,
            "residuals": self.residuals,
        }


def check_postulates(
    attr: Attribution,
    terms: list,
    table: CoalitionValueTable,
    alloc: GenericAllocation,
    background: BackgroundSet,
    tol: float = CHECK_TOL,
) -> PostulateReport:
    """Check precision / federation / zero-discrepancy against analytic terms.

    * precision: after removing the declared interaction shares, each a_i
      must equal feature i's own independent effect.
    * federation: the declared (tau, zeta) routing applied to the analytic
      terms must reproduce the computed attribution.
    * zero-discrepancy: f(beta) + sum(a) must equal f(x).
    """
    if background.size != 1:
        raise BackgroundNotSingleRow(
            f"postulate checks need a single-row background, got {background.size}"
        )
    d = table.d
    scores = np.asarray(attr.scores, dtype=np.float64)
    lam = np.array([independent_sum(terms, i) for i in range(d)])
    interaction_supports = sorted(
        {t.support for t in terms if t.is_interaction},
        key=lambda s: (len(s), sorted(s)),
    )
    mu = {S: interaction_sum(terms, S) for S in interaction_supports}

    shares = np.zeros(d)
    for S, mu_S in mu.items():
        mask = mask_of(S, d)
        for i in S:
            shares[i] += alloc.zeta(i, mask) * mu_S
    precision_residual = float(np.abs(scores - shares - lam).max()) if d else 0.0

    reconstructed = alloc.tau @ lam + shares
    federation_residual = float(np.abs(scores - reconstructed).max()) if d else 0.0

    disc = table.empty_value + float(scores.sum()) - table.full_value

    return PostulateReport(
        method=attr.method.value,
        precision=precision_residual <= tol,
        federation=federation_residual <= tol,
        zero_discrepancy=abs(disc) <= tol,
        adaptation=_adaptation_flag(attr.method),
        residuals={
            "precision": precision_residual,
            "federation": federation_residual,
            "discrepancy": disc,
        },
    )


def _adaptation_flag(method: Method) -> Optional[bool]:
    from .attribution import ADAPTATION

    return ADAPTATION[method]


def random_battery(seed: int = 0, n_cases: int = 12, dims=(3, 4, 5)) -> list:
    """Randomized polynomial cases with interactions and independent effects.

    Returns (model, x, beta) triples. Coefficients, baselines, and offsets
    are small positive half-integers, so every shifted-basis term is
    strictly positive: each case provably exposes occlusion over-allocation
    and semivalue precision loss instead of relying on generic position.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n_cases):
        d = int(rng.choice(dims))
        monomials = []
        for i in range(d):  # guaranteed independent effects
            monomials.append((float(rng.integers(1, 4)), {i: int(rng.integers(1, 3))}))
        n_inter = int(rng.integers(2, 4))
        for _ in range(n_inter):  # guaranteed interaction effects
            size = int(rng.integers(2, d + 1))
            feats = rng.choice(d, size=size, replace=False)
            exps = {int(f): int(rng.integers(1, 3)) for f in feats}
            monomials.append((float(rng.integers(1, 4)), exps))
        model = PolynomialModel(monomials, input_dim=d)
        beta = rng.integers(1, 3, size=d) / 2.0
        x = beta + rng.integers(1, 4, size=d) / 2.0
        cases.append((model, x.astype(np.float64), beta.astype(np.float64)))
    return cases
