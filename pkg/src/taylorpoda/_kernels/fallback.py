"""Pure numpy implementations of the subset-lattice kernels.

Used when the compiled extension is unavailable (or TAYLORPODA_PURE=1).
Same contracts as ``taylorpoda._kernels._core``; arrays indexed by coalition
bitmask, bit i set <=> feature i present.
"""

import numpy as np


def popcounts(d: int) -> np.ndarray:
    """Popcount of every mask 0..2^d-1 as uint8."""
    pc = np.zeros(1, dtype=np.uint8)
    for _ in range(d):
        pc = np.concatenate([pc, pc + np.uint8(1)])
    return pc


def subset_mobius(values: np.ndarray) -> np.ndarray:
    """Signed Moebius transform over the subset lattice.

    out[S] = sum over T subset of S of (-1)^(|S|-|T|) * values[T].
    out[0] is values[0] unchanged.
    """
    out = np.array(values, dtype=np.float64, copy=True)
    n = out.shape[0]
    d = n.bit_length() - 1
    for b in range(d):
        view = out.reshape(-1, 2, 1 << b)
        view[:, 1, :] -= view[:, 0, :]
    return out


def subset_zeta(values: np.ndarray) -> np.ndarray:
    """Inverse of :func:`subset_mobius`: out[S] = sum over T subset of S of values[T]."""
    out = np.array(values, dtype=np.float64, copy=True)
    n = out.shape[0]
    d = n.bit_length() - 1
    for b in range(d):
        view = out.reshape(-1, 2, 1 << b)
        view[:, 1, :] += view[:, 0, :]
    return out


def semivalues(values: np.ndarray, size_weights: np.ndarray) -> np.ndarray:
    """Weighted marginal-contribution sums over a dense coalition table.

    a_i = sum over S not containing i of size_weights[|S|] * (values[S + i] - values[S]).
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    d = n.bit_length() - 1
    w = np.asarray(size_weights, dtype=np.float64)
    pc = popcounts(d)
    masks = np.arange(n, dtype=np.int64)
    out = np.empty(d, dtype=np.float64)
    for i in range(d):
        bit = np.int64(1) << i
        absent = masks[(masks & bit) == 0]
        out[i] = np.dot(w[pc[absent]], values[absent | bit] - values[absent])
    return out


def interaction_penalties(
    masks: np.ndarray,
    dividends: np.ndarray,
    xi_flat: np.ndarray,
    offsets: np.ndarray,
    d: int,
) -> np.ndarray:
    """Per-feature sums of (1 - xi_{i,S}) * H(S) over the listed coalitions.

    ``masks[j]`` holds coalition j's bitmask (popcount >= 2), ``dividends[j]``
    its dividend, and ``xi_flat[offsets[j]:offsets[j+1]]`` its member weights
    ordered by ascending feature index.
    """
    masks = np.asarray(masks, dtype=np.int64)
    dividends = np.asarray(dividends, dtype=np.float64)
    xi_flat = np.asarray(xi_flat, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.int64)
    pc = popcounts(d)
    out = np.zeros(d, dtype=np.float64)
    for i in range(d):
        bit = np.int64(1) << i
        sel = np.nonzero((masks & bit) != 0)[0]
        if sel.size == 0:
            continue
        slots = pc[masks[sel] & (bit - 1)].astype(np.int64)
        xi_i = xi_flat[offsets[sel] + slots]
        out[i] = np.dot(1.0 - xi_i, dividends[sel])
    return out
