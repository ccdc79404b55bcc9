"""Attribution-quality metrics: AUP, discrepancy, inclusion curves, aggregates.

AUP sums, over m = 1..d, the absolute prediction-recovery error of the
top-m coalition taken from the importance order (descending |a_i|, ties by
ascending index). All masked values come from the sample's value table, so
the metric shares the attribution's own marginal masking estimator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateLabels, InsufficientSamples
from .masking import CoalitionValueTable


def _scores_of(attr) -> np.ndarray:
    return np.asarray(getattr(attr, "scores", attr), dtype=np.float64)


def importance_order(scores) -> np.ndarray:
    """Feature indices by descending |score|, ties broken by ascending index."""
    a = np.abs(_scores_of(scores))
    return np.lexsort((np.arange(a.size), -a))


def topm_masks(scores) -> list:
    """Nested top-m coalitions I(1) .. I(d) as bitmasks."""
    out = []
    mask = 0
    for i in importance_order(scores):
        mask |= 1 << int(i)
        out.append(mask)
    return out


def recovery_errors(attr, table: CoalitionValueTable) -> np.ndarray:
    """Signed errors f(x) - f_I(m)(x) for m = 1..d."""
    full = table.full_value
    return np.array([full - table[m] for m in topm_masks(attr)], dtype=np.float64)


def aup(attr, table: CoalitionValueTable) -> float:
    """Area under the prediction recovery error curve (lower is better)."""
    return float(np.abs(recovery_errors(attr, table)).sum())


def discrepancy(attr, table: CoalitionValueTable) -> float:
    """Signed allocation gap f_empty + sum(a) - f(x); zero for exhaustive methods."""
    return float(table.empty_value + _scores_of(attr).sum() - table.full_value)


def inclusion_mse_curve(samples) -> np.ndarray:
    """Per-m mean squared recovery error across (attribution, table) samples."""
    errs = np.stack([recovery_errors(attr, table) for attr, table in samples])
    return np.mean(errs**2, axis=0)


def inclusion_mse(samples) -> float:
    """Mean over m of the cross-sample squared recovery error."""
    return float(inclusion_mse_curve(samples).mean())


def _average_ranks(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=np.float64)
    sv = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _rank_auc(values: np.ndarray, labels: np.ndarray) -> float:
    """Mann-Whitney ROC-AUC; tied predictions contribute 1/2."""
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    ranks = _average_ranks(values)
    r_pos = ranks[labels == 1].sum()
    return float((r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def inclusion_auc_curve(samples) -> np.ndarray:
    """Per-m ROC-AUC of top-m masked predictions against binary labels."""
    labels = np.array([int(lbl) for _, _, lbl in samples])
    if labels.min() == labels.max():
        raise DegenerateLabels("need at least one positive and one negative label")
    preds = np.stack(
        [
            [table[m] for m in topm_masks(attr)]
            for attr, table, _ in samples
        ]
    )  # (n_samples, d)
    return np.array(
        [_rank_auc(preds[:, m], labels) for m in range(preds.shape[1])]
    )


def inclusion_auc(samples) -> float:
    """Mean over m of the per-m cross-sample ROC-AUC."""
    return float(inclusion_auc_curve(samples).mean())


def aggregate(values) -> tuple:
    """(mean, ci_low, ci_high) with a normal-approximation 95% interval."""
    v = np.asarray(list(values), dtype=np.float64)
    if v.size < 2:
        raise InsufficientSamples(f"need >= 2 values, got {v.size}")
    mean = float(v.mean())
    half = 1.96 * float(v.std(ddof=1)) / np.sqrt(v.size)
    return mean, mean - half, mean + half


def format_ci(mean: float, ci_low: float, ci_high: float) -> str:
    return f"{mean:.4f} ({ci_low:.4f}, {ci_high:.4f})"


@dataclass
class MetricReport:
    """Per-sample rows plus aggregated (mean, 95% CI) statistics for one method."""

    method: str
    per_sample: list = field(default_factory=list)  # {"sample", "aup", "discrepancy"}
    aggregates: dict = field(default_factory=dict)  # metric -> (mean, lo, hi)
    inclusion_curve: Optional[list] = None

    def add_aggregate(self, name: str, values) -> None:
        mean, lo, hi = aggregate(values)
        self.aggregates[name] = {
            "mean": mean,
            "ci_low": lo,
            "ci_high": hi,
            "formatted": format_ci(mean, lo, hi),
        }

    def to_json(self) -> dict:
        out = {
            "method": self.method,
            "per_sample": self.per_sample,
            "aggregates": self.aggregates,
        }
        if self.inclusion_curve is not None:
            out["inclusion_curve"] = self.inclusion_curve
        return out
