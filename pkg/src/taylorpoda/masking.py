"""Masked-output estimation and per-instance coalition value tables.

The masked output for a coalition S keeps the instance's values on S and
marginalizes the remaining features over an explicit background set:
f_S(x) = mean_b f(splice(x, b, S)). This is the interventional/marginal
estimator; the choice is recorded in every report (``ESTIMATOR_LABEL``).

Coalitions are bitmasks over feature indices (bit i set <=> feature i
present), canonically ordered by (popcount, numeric value).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import oracle
from ._kernels import popcounts
from .errors import DimensionError, EnumerationGuard, MissingCoalition, ParseError

#: Bitset representation ceiling.
MAX_FEATURES = 64
#: FULL 2^d enumeration ceiling.
FULL_ENUMERATION_LIMIT = 20
#: Default background subsample size.
DEFAULT_BACKGROUND_SIZE = 32
#: Target rows per in-process evaluation chunk.
_CHUNK_ROWS = 1 << 18

ESTIMATOR_LABEL = "marginal-splice"


def mask_of(indices, d: int) -> int:
    """Bitmask for an iterable of 0-based feature indices."""
    m = 0
    for i in indices:
        if not 0 <= i < d:
            raise DimensionError(f"feature index {i} out of range for d={d}")
        m |= 1 << i
    return m


def members_of(mask: int) -> list:
    """Ascending feature indices present in a bitmask."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def canonical_order(masks) -> list:
    """Sort coalition bitmasks by (popcount, numeric value)."""
    return sorted(masks, key=lambda m: (bin(m).count("1"), m))


@dataclass(frozen=True)
class BackgroundSet:
    """Reference rows used to marginalize absent features."""

    rows: np.ndarray  # (B, d)
    source: str = "unspecified"

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise DimensionError("background needs at least one row")
        if not np.isfinite(rows).all():
            raise ParseError("background rows contain NaN/Inf")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return int(self.rows.shape[0])

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def subsample(self, size: int, seed: int) -> "BackgroundSet":
        """Deterministic without-replacement subsample (identity if size >= B)."""
        if size >= self.size:
            return self
        idx = np.sort(np.random.default_rng(seed).choice(self.size, size, replace=False))
        return BackgroundSet(self.rows[idx], source=f"{self.source}[sub{size}:seed{seed}]")

    @classmethod
    def from_csv(cls, path, drop_columns=()) -> tuple:
        """Read a headered numeric CSV; returns (BackgroundSet, feature names)."""
        names, matrix = read_numeric_csv(path, drop_columns=drop_columns)
        return cls(matrix, source=str(path)), names


def read_numeric_csv(path, drop_columns=()) -> tuple:
    """Parse a CSV with a header row into (names, float matrix).

    Non-numeric cells are rejected; categorical encoding is expected to
    happen upstream.
    """
    drop = set(drop_columns)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty CSV") from None
        keep = [j for j, name in enumerate(header) if name not in drop]
        if not keep:
            raise ParseError(f"{path}: no feature columns left")
        names = [header[j] for j in keep]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}:{lineno}: expected {len(header)} cells")
            try:
                rows.append([float(row[j]) for j in keep])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric cell ({exc})") from exc
    matrix = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(names))
    return names, matrix


@dataclass(frozen=True)
class CoalitionValueTable:
    """Memoized masked outputs f_S(x) for one instance.

    ``sigma`` is None for FULL 2^d enumeration; a capped table stores all
    coalitions with |S| <= sigma plus every G\\{i} and G. Immutable after
    build; safe to share across threads.
    """

    instance: np.ndarray
    d: int
    values: dict  # mask -> float
    sigma: Optional[int] = None
    _dense: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def full_mask(self) -> int:
        return (1 << self.d) - 1

    @property
    def full_value(self) -> float:
        return self.values[self.full_mask]

    @property
    def empty_value(self) -> float:
        return self.values[0]

    @property
    def is_full(self) -> bool:
        return self.sigma is None

    def __getitem__(self, mask: int) -> float:
        try:
            return self.values[mask]
        except KeyError:
            raise MissingCoalition(
                f"coalition {bin(mask)} not stored (sigma={self.sigma})"
            ) from None

    def __contains__(self, mask: int) -> bool:
        return mask in self.values

    def dense(self) -> np.ndarray:
        """FULL tables only: values as a float64 array indexed by bitmask."""
        if not self.is_full:
            raise MissingCoalition("dense layout requires a FULL table")
        if self._dense is None:
            arr = np.empty(1 << self.d, dtype=np.float64)
            for mask, v in self.values.items():
                arr[mask] = v
            object.__setattr__(self, "_dense", arr)
        return self._dense

    def masks(self) -> list:
        """Stored coalitions in canonical (popcount, value) order."""
        return canonical_order(self.values.keys())

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "sigma": self.sigma if self.sigma is not None else "FULL",
            "instance": self.instance.tolist(),
            "entries": [
                {"coalition": bin(m), "value": self.values[m]} for m in self.masks()
            ],
        }

    def dump(self, fh) -> None:
        json.dump(self.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _check_dims(model, x: np.ndarray, bg: BackgroundSet) -> None:
    d = int(x.size)
    if d != model.input_dim:
        raise DimensionError(f"instance has {d} features, model expects {model.input_dim}")
    if bg.dim != d:
        raise DimensionError(f"background has {bg.dim} features, instance has {d}")
    if d > MAX_FEATURES:
        raise EnumerationGuard(f"bitset engine limited to d <= {MAX_FEATURES}")


def splice(x: np.ndarray, rows: np.ndarray, mask: int) -> np.ndarray:
    """Background rows with the instance's values written onto coalition ``mask``."""
    out = np.array(rows, dtype=np.float64, copy=True)
    for i in members_of(mask):
        out[:, i] = x[i]
    return out


def masked_output(model, x, S: int, bg: BackgroundSet) -> float:
    """Estimate f_S(x) as the background mean of spliced evaluations."""
    x = x.values if isinstance(x, oracle.FeatureVector) else np.asarray(x, dtype=np.float64)
    _check_dims(model, x, bg)
    outs = oracle.evaluate_batch(model, splice(x, bg.rows, S))
    return float(np.mean(outs))


def evaluate_masks(model, x, bg: BackgroundSet, masks) -> dict:
    """Masked outputs for an explicit list of coalitions, batched per chunk."""
    x = x.values if isinstance(x, oracle.FeatureVector) else np.asarray(x, dtype=np.float64)
    _check_dims(model, x, bg)
    d = int(x.size)
    B = bg.size
    masks = list(masks)
    values = {}
    chunk = max(1, _CHUNK_ROWS // max(B, 1))
    if isinstance(model, oracle.ExternalModel):
        chunk = max(1, oracle.EXTERNAL_BATCH_ROWS // max(B, 1))
    bits = 1 << np.arange(d, dtype=np.int64)
    for start in range(0, len(masks), chunk):
        part = np.asarray(masks[start : start + chunk], dtype=np.int64)
        present = (part[:, None] & bits[None, :]) != 0  # (m, d)
        spliced = np.where(present[:, None, :], x[None, None, :], bg.rows[None, :, :])
        outs = oracle.evaluate_batch(model, spliced.reshape(-1, d))
        means = outs.reshape(part.size, B).mean(axis=1)
        for m, v in zip(part.tolist(), means.tolist()):
            values[m] = v
    return values


def _capped_masks(d: int, sigma: int) -> list:
    masks = set()
    idx = range(d)
    for k in range(0, sigma + 1):
        for combo in combinations(idx, k):
            masks.add(mask_of(combo, d))
    full = (1 << d) - 1
    masks.add(full)
    for i in range(d):
        masks.add(full ^ (1 << i))
    return canonical_order(masks)


def build_table(model, x, bg: BackgroundSet, sigma=None) -> CoalitionValueTable:
    """Build the coalition value table for one instance.

    ``sigma=None`` (or the string "FULL") enumerates all 2^d coalitions,
    guarded at d <= 20. An integer cap stores all |S| <= sigma plus the
    leading-term coalitions G\\{i} and G.
    """
    x = x.values if isinstance(x, oracle.FeatureVector) else np.asarray(x, dtype=np.float64)
    _check_dims(model, x, bg)
    d = int(x.size)
    if isinstance(sigma, str):
        if sigma.upper() != "FULL":
            raise ParseError(f"sigma must be an integer or 'FULL', got {sigma!r}")
        sigma = None
    if sigma is None:
        if d > FULL_ENUMERATION_LIMIT:
            raise EnumerationGuard(
                f"FULL enumeration needs 2^{d} coalitions; limit is d <= {FULL_ENUMERATION_LIMIT}"
            )
        masks = range(1 << d)
    else:
        sigma = int(sigma)
        if not 1 <= sigma <= d:
            raise EnumerationGuard(f"sigma must satisfy 1 <= sigma <= d, got {sigma}")
        if sigma == d:
            return build_table(model, x, bg, sigma=None)
        masks = _capped_masks(d, sigma)
    values = evaluate_masks(model, x, bg, masks)
    return CoalitionValueTable(instance=x, d=d, values=values, sigma=sigma)
