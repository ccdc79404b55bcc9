"""Per-feature attribution methods over a shared coalition value table.

All methods consume the same masked-output estimates, so their scores are
directly comparable:

* ``occ1``            -- single-feature occlusion differences.
* ``shap_exact``      -- exact Shapley values over the FULL lattice.
* ``weighted_shap``   -- semivalues for candidate size-weight families,
                         AUP-selected.
* ``taylorpoda``      -- occlusion leading terms minus reallocated
                         interaction dividends, steered by a simplex
                         allocation per coalition.
* ``taylorpoda_capped`` -- dividend sum truncated at |S| <= sigma.
* ``lime``            -- weighted-ridge surrogate on binary presence masks
                         (not table-based; reported for comparison).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import metrics, oracle
from ._kernels import interaction_penalties, popcounts, semivalues
from .allocation import XiAllocation
from .dividends import DividendMap, harsanyi_all, interaction_masks
from .errors import (
    EmptyFamilyList,
    InvalidAllocation,
    MissingCoalition,
    ParseError,
    SingularFit,
)
from .masking import BackgroundSet, CoalitionValueTable, splice


class Method(str, Enum):
    OCC1 = "occ1"
    SHAP = "shap"
    WEIGHTED_SHAP = "weightedshap"
    TAYLOR_PODA = "taylorpoda"
    TAYLOR_PODA_C = "taylorpoda-c"
    LIME = "lime"


#: Whether the method's interaction allocation is tunable (None: not in the
#: postulate system at all).
ADAPTATION = {
    Method.OCC1: False,
    Method.SHAP: False,
    Method.WEIGHTED_SHAP: True,
    Method.TAYLOR_PODA: True,
    Method.TAYLOR_PODA_C: True,
    Method.LIME: None,
}


@dataclass
class Attribution:
    """Per-feature scores with method tag, fit diagnostics, and provenance."""

    scores: np.ndarray
    method: Method
    discrepancy: float = float("nan")
    aup: float = float("nan")
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "method": self.method.value,
            "scores": [float(v) for v in self.scores],
            "discrepancy": None if math.isnan(self.discrepancy) else self.discrepancy,
            "aup": None if math.isnan(self.aup) else self.aup,
            "metadata": self.metadata,
        }


def _finalize(attr: Attribution, table: CoalitionValueTable) -> Attribution:
    attr.discrepancy = metrics.discrepancy(attr, table)
    try:
        attr.aup = metrics.aup(attr, table)
    except MissingCoalition:
        attr.aup = float("nan")
    return attr


@dataclass(frozen=True)
class WeightFamily:
    """Coalition-size weights w_s (s = |S|, S excluding the target feature).

    Only the Shapley family satisfies the semivalue normalization
    sum_s C(d-1, s) * w_s = 1; other families are deliberately left
    unnormalized in that sense, which is what breaks their precision and
    efficiency properties.
    """

    id: str
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ParseError("weight family must be a 1-D size-weight vector")
        if not np.isfinite(w).all() or (w < 0).any() or w.sum() <= 0:
            raise ParseError("weights must be nonnegative, finite, not all zero")
        object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return int(self.weights.size)

    def tau(self) -> float:
        """sum over S subset of G\\{i} of w_|S|; 1 exactly for the Shapley family."""
        d = self.d
        return float(
            sum(math.comb(d - 1, s) * self.weights[s] for s in range(d))
        )

    @classmethod
    def shapley(cls, d: int) -> "WeightFamily":
        w = np.array([1.0 / (d * math.comb(d - 1, s)) for s in range(d)])
        return cls(id="shapley", weights=w)

    @classmethod
    def beta_induced(cls, d: int, p: float, q: float) -> "WeightFamily":
        """Size weights from a Beta(p, q) density on the midpoint grid (s+0.5)/d."""
        t = (np.arange(d) + 0.5) / d
        w = t ** (p - 1.0) * (1.0 - t) ** (q - 1.0)
        return cls(id=f"beta-{p:g}-{q:g}", weights=w / w.sum())

    @classmethod
    def default_grid(cls, d: int) -> list:
        """The 16 default candidate families: Beta(p, q) for p, q in {0.5, 1, 2, 4}."""
        grid = (0.5, 1.0, 2.0, 4.0)
        return [cls.beta_induced(d, p, q) for p in grid for q in grid]


def _require_full(table: CoalitionValueTable, op: str) -> None:
    if not table.is_full:
        raise MissingCoalition(f"{op} requires a FULL table (sigma={table.sigma})")


def _leading_terms(table: CoalitionValueTable) -> np.ndarray:
    """f(x) - f_(G minus i)(x) for every feature i."""
    full_mask = table.full_mask
    full = table.full_value
    return np.array(
        [full - table[full_mask ^ (1 << i)] for i in range(table.d)],
        dtype=np.float64,
    )


def occ1(table: CoalitionValueTable) -> Attribution:
    """Occlusion sensitivity: a_i = f(x) - f_(G minus i)(x)."""
    attr = Attribution(scores=_leading_terms(table), method=Method.OCC1)
    return _finalize(attr, table)


def _shap_scores(table: CoalitionValueTable) -> np.ndarray:
    w = WeightFamily.shapley(table.d).weights
    return semivalues(table.dense(), w)


def shap_exact(table: CoalitionValueTable) -> Attribution:
    """Exact Shapley values: weighted marginal contributions over all coalitions."""
    _require_full(table, "shap_exact")
    attr = Attribution(scores=_shap_scores(table), method=Method.SHAP)
    return _finalize(attr, table)


def weighted_shap(table: CoalitionValueTable, families: Optional[list] = None) -> Attribution:
    """Semivalue attribution for each candidate family; min-AUP family wins."""
    _require_full(table, "weighted_shap")
    if families is None:
        families = WeightFamily.default_grid(table.d)
    if not families:
        raise EmptyFamilyList("weighted_shap needs at least one weight family")
    dense = table.dense()
    best = None
    aups = []
    for idx, fam in enumerate(families):
        if fam.d != table.d:
            raise ParseError(f"family {fam.id} has {fam.d} weights, expected {table.d}")
        scores = semivalues(dense, fam.weights)
        a = metrics.aup(scores, table)
        aups.append(float(a))
        if best is None or a < best[0]:
            best = (a, idx, fam, scores)
    _, idx, fam, scores = best
    attr = Attribution(
        scores=scores,
        method=Method.WEIGHTED_SHAP,
        metadata={
            "family": fam.id,
            "family_index": idx,
            "family_weights": [float(v) for v in fam.weights],
            "candidate_aups": aups,
        },
    )
    return _finalize(attr, table)


def _penalties(
    table: CoalitionValueTable,
    xi: XiAllocation,
    masks: np.ndarray,
    dividends: DividendMap,
) -> np.ndarray:
    h = dividends.values_for(masks)
    flat, offsets = xi.segments_for(masks)
    return interaction_penalties(masks, h, flat, offsets, table.d)


def taylorpoda(
    table: CoalitionValueTable,
    xi: XiAllocation,
    dividends: Optional[DividendMap] = None,
) -> Attribution:
    """Occlusion leading terms minus the share of each dividend ceded to partners.

    a_i = f(x) - f_(G minus i)(x) - sum over S containing i, |S| > 1 of
    (1 - xi_{i,S}) H(S). Any allocation satisfying the per-coalition simplex
    constraint yields an exhaustive (zero-discrepancy) attribution.
    """
    _require_full(table, "taylorpoda")
    if xi.d != table.d:
        raise InvalidAllocation(f"allocation built for d={xi.d}, table has d={table.d}")
    if dividends is None:
        dividends = harsanyi_all(table)
    masks = interaction_masks(table.d)
    scores = _leading_terms(table) - _penalties(table, xi, masks, dividends)
    attr = Attribution(scores=scores, method=Method.TAYLOR_PODA)
    return _finalize(attr, table)


def taylorpoda_capped(
    table: CoalitionValueTable,
    xi: XiAllocation,
    sigma: int,
    dividends: Optional[DividendMap] = None,
) -> Attribution:
    """Cardinality-capped variant: dividend sum truncated at |S| <= sigma.

    When the table is FULL and the allocation covers the whole lattice, the
    per-feature truncation gap (capped minus full score) is recorded in
    ``metadata["delta"]``; it is identically zero at sigma = d.
    """
    d = table.d
    sigma = int(sigma)
    if not 2 <= sigma <= d:
        raise MissingCoalition(f"sigma must satisfy 2 <= sigma <= d, got {sigma}")
    if not table.is_full and table.sigma < sigma:
        raise MissingCoalition(
            f"table capped at sigma={table.sigma}, cannot truncate at {sigma}"
        )
    if xi.d != d:
        raise InvalidAllocation(f"allocation built for d={xi.d}, table has d={d}")
    if dividends is None:
        dividends = harsanyi_all(table)
    masks = interaction_masks(d, sigma)
    scores = _leading_terms(table) - _penalties(table, xi, masks, dividends)
    attr = Attribution(
        scores=scores, method=Method.TAYLOR_PODA_C, metadata={"sigma": sigma}
    )
    if table.is_full:
        rest = interaction_masks(d)
        rest = rest[popcounts(d)[rest] > sigma]
        try:
            delta = _penalties(table, xi, rest, dividends)
        except InvalidAllocation:
            delta = None  # allocation only covers |S| <= sigma
        if delta is not None:
            attr.metadata["delta"] = [float(v) for v in delta]
    return _finalize(attr, table)


@dataclass(frozen=True)
class LimeConfig:
    n_samples: int = 1000
    kernel_width: Optional[float] = None  # default 0.75 * sqrt(d)
    ridge_penalty: float = 1e-3
    seed: int = 0


def lime(
    model,
    x,
    bg: BackgroundSet,
    config: Optional[LimeConfig] = None,
    table: Optional[CoalitionValueTable] = None,
) -> Attribution:
    """Weighted-ridge surrogate on uniformly sampled binary presence masks.

    Masked rows splice the instance against the background mean row; the
    exponential kernel weights samples by Hamming proximity to full
    presence. Coefficients are the scores; discrepancy is expected nonzero.
    """
    cfg = config or LimeConfig()
    x = x.values if isinstance(x, oracle.FeatureVector) else np.asarray(x, dtype=np.float64)
    d = x.size
    width = cfg.kernel_width if cfg.kernel_width is not None else 0.75 * math.sqrt(d)
    mean_row = bg.rows.mean(axis=0)

    if d == 1:
        delta = oracle.evaluate(model, x) - oracle.evaluate(model, mean_row)
        scores = np.array([delta])
    else:
        rng = np.random.default_rng(cfg.seed)
        Z = rng.integers(0, 2, size=(cfg.n_samples, d)).astype(np.float64)
        rows = np.where(Z > 0, x[None, :], mean_row[None, :])
        y = oracle.evaluate_batch(model, rows)
        hamming = d - Z.sum(axis=1)
        w = np.exp(-(hamming**2) / width**2)
        A = np.hstack([Z, np.ones((cfg.n_samples, 1))])
        AtW = A.T * w[None, :]
        gram = AtW @ A
        gram[np.arange(d), np.arange(d)] += cfg.ridge_penalty
        try:
            beta = np.linalg.solve(gram, AtW @ y)
        except np.linalg.LinAlgError as exc:
            raise SingularFit(f"surrogate fit failed: {exc}") from exc
        if not np.isfinite(beta).all():
            raise SingularFit("surrogate fit produced non-finite coefficients")
        scores = beta[:d]

    attr = Attribution(
        scores=scores,
        method=Method.LIME,
        metadata={
            "n_samples": cfg.n_samples,
            "kernel_width": width,
            "ridge_penalty": cfg.ridge_penalty,
            "seed": cfg.seed,
        },
    )
    if table is not None:
        return _finalize(attr, table)
    empty = float(np.mean(oracle.evaluate_batch(model, bg.rows)))
    attr.discrepancy = empty + float(scores.sum()) - oracle.evaluate(model, x)
    return attr
