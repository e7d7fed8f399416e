from __future__ import annotations

import math

import numpy as np
import pytest

from projdim import _counting
from projdim.levels import compute_level_data, get_level_data
from projdim.system import enumerate_holes, rauzy_system
from projdim.words import MatrixProduct, MaxDepth, compose, singular_values


def test_level_walk_matches_hole_enumeration(rauzy):
    data = compute_level_data(rauzy, 4)
    buckets = {}
    enumerate_holes(rauzy, MaxDepth(4),
                    lambda r: buckets.setdefault(len(r.word), []).append(r))
    assert data.depth == 4
    assert data.num_holes == sum(len(v) for v in buckets.values())
    for n in range(5):
        recs = buckets[n]
        assert data.hole_log_vol[n].shape == (len(recs),)
        vol_walk = np.sort(np.exp(data.hole_log_vol[n]))
        vol_recs = np.sort([r.volume for r in recs])
        assert np.allclose(vol_walk, vol_recs, rtol=1e-12)
        in_walk = np.sort(np.exp(data.hole_log_in[n]))
        in_recs = np.sort([r.inradius for r in recs])
        assert np.allclose(in_walk, in_recs, rtol=1e-9)


def test_level_walk_singular_ratios_match_exact_svd(rauzy):
    data = compute_level_data(rauzy, 3, with_sv=True)
    words = [()]
    prods = {(): MatrixProduct.identity(3)}
    for _ in range(3):
        for w in [w for w in words if len(w) < 3]:
            for letter in (1, 2, 3):
                key = w + (letter,)
                if key not in prods:
                    prods[key] = compose(prods[w], letter, rauzy.generators)
                    words.append(key)
    by_level = {}
    for w, p in prods.items():
        sv = singular_values(p)
        by_level.setdefault(len(w), []).append(
            (math.log(sv[1] / sv[0]), math.log(sv[2] / sv[0])))
    for n in range(4):
        expect = np.array(sorted(by_level[n]))
        got = np.array(sorted(zip(data.sv_r21[n], data.sv_r31[n])))
        assert np.allclose(got, expect, atol=1e-10)


def test_image_levels_satisfy_the_tiling_recursion(rauzy):
    # each cell splits into its three children plus its hole, exactly
    data = compute_level_data(rauzy, 6)
    vol_delta = rauzy.simplex.volume
    assert math.isclose(float(np.exp(data.img_log_ratio[0]).sum()), 1.0,
                        rel_tol=1e-14)
    for n in range(6):
        parents = vol_delta * float(np.exp(data.img_log_ratio[n]).sum())
        children = vol_delta * float(np.exp(data.img_log_ratio[n + 1]).sum())
        holes = float(np.exp(data.hole_log_vol[n]).sum())
        assert math.isclose(parents, children + holes, rel_tol=1e-12)


def test_truncation_slices_levels(rauzy):
    data = compute_level_data(rauzy, 5)
    cut = data.truncated(3)
    assert cut.depth == 3
    assert len(cut.hole_log_vol) == 4
    for n in range(4):
        assert np.array_equal(cut.hole_log_vol[n], data.hole_log_vol[n])


def test_level_cache_serves_shallower_requests(rauzy):
    deep = get_level_data(rauzy, 5)
    shallow = get_level_data(rauzy, 3)
    assert shallow.depth == 3
    assert np.array_equal(shallow.hole_log_vol[3], deep.hole_log_vol[3])


def test_streamed_final_level_matches_direct_walk(rauzy, monkeypatch):
    from projdim import levels as levels_mod

    monkeypatch.setattr(levels_mod, "_CHUNK", 16)  # force many final-level chunks
    monkeypatch.setenv("PROJDIM_THREADS", "2")
    threaded = compute_level_data(rauzy, 5)
    monkeypatch.setenv("PROJDIM_THREADS", "1")
    serial = compute_level_data(rauzy, 5)
    for n in range(6):
        assert np.array_equal(threaded.hole_log_vol[n], serial.hole_log_vol[n])
        assert np.array_equal(threaded.hole_log_in[n], serial.hole_log_in[n])


def test_norm_histogram_matches_pure_python_reference(rauzy):
    ref = _counting.norm_histogram_reference(rauzy.generators, 60)
    fast = _counting.norm_histogram(rauzy, 60)
    assert np.array_equal(np.asarray(ref), np.asarray(fast))
    assert fast[1] == 1  # the empty word
    assert fast[:1].sum() == 0


def test_word_counts_match_frozen_brute_force_values(rauzy):
    # reference values computed by direct enumeration of the word tree
    assert _counting.word_count(rauzy, 10) == 106
    assert _counting.word_count(rauzy, 100) == 25348
    assert _counting.word_count(rauzy, 1000) == 6945712


def test_histogram_cache_serves_smaller_caps(rauzy):
    a = _counting.norm_histogram(rauzy, 300)
    b = _counting.norm_histogram(rauzy, 200)
    assert len(b) == 201
    assert np.array_equal(np.asarray(a)[:201], np.asarray(b))
