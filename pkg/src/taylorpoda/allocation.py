"""Interaction-allocation weights: Dirichlet candidate sampling and AUP search.

An allocation assigns every coalition S with |S| > 1 a simplex vector over
its members; the component for feature i is the share of S's interaction
effect credited to i. Candidates are scored by AUP on a shared value table
and the argmin is selected (ties break to the lowest candidate index).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import popcounts
from .dividends import interaction_masks
from .errors import InvalidAllocation, InvalidAlpha, MissingCoalition
from .masking import CoalitionValueTable, members_of

SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class XiAllocation:
    """Per-coalition simplex weights, stored flat for kernel consumption.

    ``masks`` lists coalitions in canonical (popcount, value) order;
    coalition j's member weights (ascending feature index) live at
    ``flat[offsets[j]:offsets[j+1]]``.
    """

    d: int
    masks: np.ndarray  # int64, popcount >= 2
    flat: np.ndarray  # float64 simplex segments
    offsets: np.ndarray  # int64, len(masks) + 1
    validated: bool = True

    def __post_init__(self):
        if self.validated:
            self.validate()
        object.__setattr__(self, "_index", None)

    def validate(self) -> None:
        if not np.isfinite(self.flat).all():
            raise InvalidAllocation("allocation weights must be finite")
        if self.flat.size and (self.flat.min() < -SIMPLEX_TOL or self.flat.max() > 1 + SIMPLEX_TOL):
            raise InvalidAllocation("allocation weights must lie in [0, 1]")
        sizes = np.diff(self.offsets)
        pc = popcounts(self.d)
        if not np.array_equal(sizes, pc[self.masks].astype(np.int64)):
            raise InvalidAllocation("segment lengths must match coalition sizes")
        if self.flat.size:
            sums = np.add.reduceat(self.flat, self.offsets[:-1])
            if np.abs(sums - 1.0).max() > SIMPLEX_TOL:
                raise InvalidAllocation(
                    f"simplex violation: worst sum deviates by {np.abs(sums - 1.0).max():.3e}"
                )

    def _mask_index(self) -> dict:
        if self.__dict__["_index"] is None:
            object.__setattr__(
                self, "_index", {int(m): j for j, m in enumerate(self.masks)}
            )
        return self.__dict__["_index"]

    def __contains__(self, mask: int) -> bool:
        return int(mask) in self._mask_index()

    def __getitem__(self, mask: int) -> np.ndarray:
        idx = self._mask_index()
        try:
            j = idx[int(mask)]
        except KeyError:
            raise InvalidAllocation(f"no weights for coalition {bin(mask)}") from None
        return self.flat[self.offsets[j] : self.offsets[j + 1]]

    def segments_for(self, required: np.ndarray) -> tuple:
        """(flat, offsets) aligned with ``required`` masks; errors if any are missing."""
        if required.size == self.masks.size and np.array_equal(required, self.masks):
            return self.flat, self.offsets
        idx = self._mask_index()
        parts = []
        offsets = np.zeros(required.size + 1, dtype=np.int64)
        for k, m in enumerate(required.tolist()):
            j = idx.get(m)
            if j is None:
                raise InvalidAllocation(f"no weights for coalition {bin(m)}")
            seg = self.flat[self.offsets[j] : self.offsets[j + 1]]
            parts.append(seg)
            offsets[k + 1] = offsets[k] + seg.size
        flat = np.concatenate(parts) if parts else np.empty(0, dtype=np.float64)
        return flat, offsets

    def to_json(self) -> dict:
        return {
            bin(int(m)): self[int(m)].tolist() for m in self.masks
        }

    @classmethod
    def uniform(cls, d: int, sigma: Optional[int] = None) -> "XiAllocation":
        """The SHAP-equivalent allocation: 1/|S| for every member of every S."""
        masks = interaction_masks(d, sigma)
        sizes = popcounts(d)[masks].astype(np.int64)
        offsets = np.concatenate([[0], np.cumsum(sizes)])
        flat = np.repeat(1.0 / sizes, sizes)
        return cls(d=d, masks=masks, flat=flat, offsets=offsets)

    @classmethod
    def from_entries(cls, d: int, entries: dict, validate: bool = True) -> "XiAllocation":
        """Build from a mask -> weight-vector mapping (ascending member order)."""
        masks = interaction_masks(d)
        keep, parts = [], []
        for m in masks.tolist():
            if m in entries:
                keep.append(m)
                parts.append(np.asarray(entries[m], dtype=np.float64))
        for m in entries:
            if int(m) not in keep:
                raise InvalidAllocation(f"entry {bin(int(m))} is not a |S|>1 coalition")
        keep_arr = np.asarray(keep, dtype=np.int64)
        sizes = np.array([p.size for p in parts], dtype=np.int64)
        for m, p in zip(keep, parts):
            if p.size != len(members_of(m)):
                raise InvalidAllocation(f"weight vector length mismatch for {bin(m)}")
        offsets = np.concatenate([[0], np.cumsum(sizes)]) if parts else np.zeros(1, dtype=np.int64)
        flat = np.concatenate(parts) if parts else np.empty(0, dtype=np.float64)
        return cls(
            d=d, masks=keep_arr, flat=flat, offsets=offsets.astype(np.int64),
            validated=validate,
        )


@dataclass(frozen=True)
class DirichletParams:
    """Concentration for candidate sampling; scalar alpha broadcasts per coalition."""

    alpha: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidAlpha(f"alpha must be positive and finite, got {self.alpha}")


def sample_simplex(alpha, k: int, rng: np.random.Generator) -> np.ndarray:
    """One Dirichlet draw of length k >= 2 via normalized gamma variates."""
    if k < 2:
        raise InvalidAlpha(f"simplex dimension must be >= 2, got {k}")
    a = np.broadcast_to(np.asarray(alpha, dtype=np.float64), (k,))
    if not np.isfinite(a).all() or (a <= 0).any():
        raise InvalidAlpha("alpha components must be positive and finite")
    g = rng.gamma(a)
    s = g.sum()
    if s <= 0.0:
        raise InvalidAlpha("degenerate Dirichlet draw; alpha too small")
    return g / s


def generate_candidates(
    d: int,
    sigma: Optional[int] = None,
    n_candidates: int = 16,
    include_uniform: bool = True,
    seed: int = 0,
    alpha: float = 1.0,
) -> list:
    """Candidate allocations: optional exact-uniform first, Dirichlet draws after.

    Every coalition with 1 < |S| (<= sigma when capped) receives an
    independent Dirichlet(alpha, ..., alpha) draw; one seeded generator
    drives all candidates, so the list is reproducible.
    """
    if n_candidates < 1:
        raise InvalidAlpha(f"need at least one candidate, got {n_candidates}")
    DirichletParams(alpha=alpha, seed=seed)
    masks = interaction_masks(d, sigma)
    sizes = popcounts(d)[masks].astype(np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    total = int(offsets[-1])
    candidates = []
    if include_uniform:
        candidates.append(XiAllocation.uniform(d, sigma))
    rng = np.random.default_rng(seed)
    while len(candidates) < n_candidates:
        g = rng.gamma(alpha, size=total)
        sums = np.add.reduceat(g, offsets[:-1]) if total else np.empty(0)
        if total and (sums <= 0.0).any():
            raise InvalidAlpha("degenerate Dirichlet draw; alpha too small")
        flat = g / np.repeat(sums, sizes) if total else g
        candidates.append(
            XiAllocation(d=d, masks=masks, flat=flat, offsets=offsets)
        )
    return candidates


def optimize_xi(table: CoalitionValueTable, candidates: list) -> tuple:
    """Evaluate every candidate on the shared table and return the AUP argmin.

    Returns (selected XiAllocation, its Attribution); the attribution's
    metadata records every candidate's AUP and the selected index.
    """
    from . import attribution as _attribution
    from . import dividends as _dividends

    if not candidates:
        raise InvalidAllocation("need at least one candidate allocation")
    divs = _dividends.harsanyi_all(table)
    attrs = []
    for cand in candidates:
        if table.is_full:
            attrs.append(_attribution.taylorpoda(table, cand, dividends=divs))
        else:
            attrs.append(
                _attribution.taylorpoda_capped(
                    table, cand, table.sigma, dividends=divs
                )
            )
    aups = np.array([a.aup for a in attrs], dtype=np.float64)
    if np.isnan(aups).any():
        raise MissingCoalition(
            "AUP not computable on this table; candidate selection needs the "
            "top-m coalition chain"
        )
    best = int(np.argmin(aups))
    chosen = attrs[best]
    chosen.metadata.update(
        {
            "selected_candidate": best,
            "candidate_aups": [float(v) for v in aups],
            "n_candidates": len(candidates),
        }
    )
    return candidates[best], chosen
