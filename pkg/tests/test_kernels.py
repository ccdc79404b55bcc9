"""Compiled core vs numpy fallback equivalence, plus kernel ground truths."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taylorpoda._kernels import HAVE_COMPILED, fallback

if HAVE_COMPILED:
    from taylorpoda._kernels import _core as core
else:
    core = None

needs_core = pytest.mark.skipif(not HAVE_COMPILED, reason="compiled core not built")


def random_xi(rng, d):
    masks = np.array(
        [m for m in range(1 << d) if bin(m).count("1") >= 2], dtype=np.int64
    )
    sizes = np.array([bin(m).count("1") for m in masks], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    g = rng.gamma(1.0, size=int(offsets[-1]))
    flat = g / np.repeat(np.add.reduceat(g, offsets[:-1]), sizes)
    return masks, flat, offsets


def test_popcounts_small():
    pc = fallback.popcounts(3)
    assert pc.tolist() == [0, 1, 1, 2, 1, 2, 2, 3]


def test_mobius_known_values():
    # d=2 table for f = x1*x2 + 5*x1 at x=(2,3), baseline 0
    v = np.array([0.0, 10.0, 0.0, 16.0])
    h = fallback.subset_mobius(v)
    assert h.tolist() == [0.0, 10.0, 0.0, 6.0]


def test_zeta_inverts_mobius():
    rng = np.random.default_rng(0)
    v = rng.normal(size=64)
    assert np.allclose(fallback.subset_zeta(fallback.subset_mobius(v)), v, atol=1e-12)


def test_semivalues_direct_formula():
    rng = np.random.default_rng(1)
    d = 4
    v = rng.normal(size=1 << d)
    w = rng.uniform(0.1, 1.0, size=d)
    got = fallback.semivalues(v, w)
    expect = np.zeros(d)
    for i in range(d):
        for m in range(1 << d):
            if not m >> i & 1:
                expect[i] += w[bin(m).count("1")] * (v[m | 1 << i] - v[m])
    assert np.allclose(got, expect, atol=1e-12)


def test_penalties_direct_formula():
    rng = np.random.default_rng(2)
    d = 5
    masks, flat, offsets = random_xi(rng, d)
    h = rng.normal(size=masks.size)
    got = fallback.interaction_penalties(masks, h, flat, offsets, d)
    expect = np.zeros(d)
    for j, m in enumerate(masks):
        members = [i for i in range(d) if m >> i & 1]
        for slot, i in enumerate(members):
            expect[i] += (1.0 - flat[offsets[j] + slot]) * h[j]
    assert np.allclose(got, expect, atol=1e-12)


@needs_core
@settings(max_examples=25, deadline=None)
@given(d=st.integers(min_value=1, max_value=8), seed=st.integers(0, 2**32 - 1))
def test_core_matches_fallback_transforms(d, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << d)
    assert np.array_equal(core.subset_mobius(v), fallback.subset_mobius(v))
    assert np.array_equal(core.subset_zeta(v), fallback.subset_zeta(v))
    assert np.array_equal(core.popcounts(d), fallback.popcounts(d))


@needs_core
@settings(max_examples=25, deadline=None)
@given(d=st.integers(min_value=1, max_value=8), seed=st.integers(0, 2**32 - 1))
def test_core_matches_fallback_semivalues(d, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << d)
    w = rng.uniform(0.0, 1.0, size=d)
    assert np.allclose(core.semivalues(v, w), fallback.semivalues(v, w), atol=1e-12)


@needs_core
@settings(max_examples=25, deadline=None)
@given(d=st.integers(min_value=2, max_value=8), seed=st.integers(0, 2**32 - 1))
def test_core_matches_fallback_penalties(d, seed):
    rng = np.random.default_rng(seed)
    masks, flat, offsets = random_xi(rng, d)
    h = rng.normal(size=masks.size)
    got = core.interaction_penalties(masks, h, flat, offsets, d)
    ref = fallback.interaction_penalties(masks, h, flat, offsets, d)
    assert np.allclose(got, ref, atol=1e-12)


def test_import_selection_reports_backend():
    import taylorpoda._kernels as k

    assert k.subset_mobius is (core.subset_mobius if HAVE_COMPILED else fallback.subset_mobius)
