"""Harsanyi dividends of masked outputs via Moebius inversion.

H(S) = sum over T subset of S of (-1)^(|S|-|T|) f_T(x). H(empty) is defined
as f_empty(x) so the reconstruction identity f_S = f_empty + sum of H over
nonempty subsets reads cleanly; only |S| > 1 dividends enter attribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import popcounts, subset_mobius
from .errors import MissingCoalition
from .masking import CoalitionValueTable, canonical_order


@dataclass(frozen=True)
class DividendMap:
    """Dividends for every coalition enumerable from the source table."""

    entries: dict  # mask -> float
    d: int
    sigma: Optional[int] = None
    _dense: Optional[np.ndarray] = None  # FULL only: H indexed by bitmask

    def __getitem__(self, mask: int) -> float:
        try:
            return self.entries[mask]
        except KeyError:
            raise MissingCoalition(
                f"dividend for {bin(mask)} not available (sigma={self.sigma})"
            ) from None

    def __contains__(self, mask: int) -> bool:
        return mask in self.entries

    def masks(self) -> list:
        return canonical_order(self.entries.keys())

    def values_for(self, masks: np.ndarray) -> np.ndarray:
        """Dividends aligned with a bitmask array."""
        if self._dense is not None:
            return self._dense[masks]
        try:
            return np.array([self.entries[int(m)] for m in masks], dtype=np.float64)
        except KeyError as exc:
            raise MissingCoalition(
                f"dividend for {bin(exc.args[0])} not available (sigma={self.sigma})"
            ) from None

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "sigma": self.sigma if self.sigma is not None else "FULL",
            "entries": [
                {"coalition": bin(m), "value": self.entries[m]} for m in self.masks()
            ],
        }


def harsanyi(table: CoalitionValueTable, S: int) -> float:
    """Dividend of a single coalition by inclusion-exclusion over its subsets."""
    size = bin(S).count("1")
    total = 0.0
    # iterate subsets of S via the (sub - 1) & S walk, including S and 0
    sub = S
    while True:
        sign = -1.0 if (size - bin(sub).count("1")) % 2 else 1.0
        total += sign * table[sub]
        if sub == 0:
            break
        sub = (sub - 1) & S
    return total


def harsanyi_all(table: CoalitionValueTable) -> DividendMap:
    """Dividends for every enumerable coalition.

    FULL tables use the in-place subset Moebius transform (O(2^d * d));
    capped tables run bottom-up dynamic programming over popcount-ordered
    keys so each H(S) is assembled from memoized smaller dividends.
    """
    if table.is_full:
        transformed = subset_mobius(table.dense())
        transformed[0] = table.empty_value
        entries = {m: float(transformed[m]) for m in range(1 << table.d)}
        return DividendMap(entries=entries, d=table.d, sigma=None, _dense=transformed)

    entries = {0: table.empty_value}
    for mask in table.masks():
        if mask == 0 or bin(mask).count("1") > table.sigma:
            continue
        acc = table[mask] - table.empty_value
        sub = (mask - 1) & mask
        while sub:
            acc -= entries[sub]
            sub = (sub - 1) & mask
        entries[mask] = acc
    return DividendMap(entries=entries, d=table.d, sigma=table.sigma)


def mobius_identity_check(table: CoalitionValueTable, dividends: DividendMap) -> float:
    """Reconstruction residual |f(x) - (f_empty + sum of nonempty dividends)|.

    Requires FULL enumeration; exact up to floating-point summation error.
    """
    if not table.is_full or dividends.sigma is not None:
        raise MissingCoalition("Moebius identity check requires a FULL table")
    acc = dividends.values_for(np.arange(1 << table.d, dtype=np.int64))
    total = table.empty_value + float(acc[1:].sum())
    return abs(table.full_value - total)


def interaction_masks(d: int, sigma: Optional[int] = None) -> np.ndarray:
    """Bitmasks of all coalitions with 2 <= |S| (<= sigma when capped), canonical order."""
    pc = popcounts(d)
    masks = np.arange(1 << d, dtype=np.int64)
    keep = pc >= 2
    if sigma is not None:
        keep &= pc <= sigma
    masks = masks[keep]
    order = np.lexsort((masks, pc[keep]))
    return masks[order]
