"""Vectorized level-by-level traversal statistics for series evaluation.

One breadth-first sweep of the word tree computes, per level n:
  - log volume and log inradius of every hole T_i(hole_k) with |i| = n,
  - log singular-value ratios of every product N_i (d = 2 systems),
  - log image-volume ratios vol(Delta_i)/vol(Delta).
Matrices are carried as float64; entries are exact integers well below 2^53
for every depth used here, so the arithmetic is exact.  The final level is
streamed in chunks so its matrices are never all held at once.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .system import IfsSystem

_CHUNK = 1 << 18

# suspect threshold for the batched symmetric eigensolver: lam2/lam1 below
# this is at the edge of float64 backward error and gets recomputed exactly
_EIG_RTOL = 1e-18


@dataclass
class LevelData:
    """Per-level arrays from one traversal to a fixed depth."""

    d: int
    depth: int
    num_holes: int
    hole_log_vol: list  # level -> float64 array, length K * m^level
    hole_log_in: list
    sv_r21: list        # level -> log(sigma2/sigma1) per word (d = 2 only)
    sv_r31: list        # level -> log(sigma3/sigma1) per word
    img_log_ratio: list  # level -> log(vol(Delta_i)/vol(Delta)) per word
    escalations: int = 0

    def truncated(self, depth: int) -> "LevelData":
        if depth > self.depth:
            raise ValueError("requested depth exceeds computed depth")
        return LevelData(
            self.d,
            depth,
            sum(len(a) for a in self.hole_log_vol[: depth + 1]),
            self.hole_log_vol[: depth + 1],
            self.hole_log_in[: depth + 1],
            self.sv_r21[: depth + 1],
            self.sv_r31[: depth + 1],
            self.img_log_ratio[: depth + 1],
            self.escalations,
        )


def _facet_log_perimeter(verts: np.ndarray, d: int) -> np.ndarray:
    """log of the total (d-1)-measure of facets for a batch of simplices.

    verts: (n, d+1, d+1) with vertex vectors along axis 2 (columns).
    """
    n = verts.shape[0]
    per = np.zeros(n)
    scale = math.factorial(d - 1)
    for j in range(d + 1):
        idx = [i for i in range(d + 1) if i != j]
        pts = verts[:, :, idx]                      # (n, d+1, d)
        e = pts[:, :, 1:] - pts[:, :, :1]           # (n, d+1, d-1) edge frame
        g = np.einsum("nik,nil->nkl", e, e)         # Gram matrices (n, d-1, d-1)
        per += np.sqrt(np.abs(np.linalg.det(g))) / scale
    return np.log(per)


def _hole_stats(prods: np.ndarray, hole_arrays, log_vol_delta: float, d: int):
    """(log_vol, log_in) arrays for all holes of a batch of word products."""
    outs_v, outs_i = [], []
    for h in hole_arrays:
        y = prods @ h                                # (n, d+1, d+1)
        col = y.sum(axis=1)                          # (n, d+1) l1 norms of image vertices
        log_vol = log_vol_delta - np.log(col).sum(axis=1)
        verts = y / col[:, None, :]
        log_per = _facet_log_perimeter(verts, d)
        outs_v.append(log_vol)
        outs_i.append(math.log(d) + log_vol - log_per)
    return np.concatenate(outs_v), np.concatenate(outs_i)


def _sv_ratios(prods: np.ndarray, escalate_entries=None):
    """(r21, r31, escalations) for a batch of 3x3 unimodular products.

    Uses eigenvalues of P^T P for the two largest singular values; the
    smallest comes from sigma3 = 1/(sigma1*sigma2), exact since |det P| = 1.
    Rows whose middle eigenvalue is at float64 noise level are recomputed
    in high precision from the exact integer entries.
    """
    a = np.swapaxes(prods, 1, 2) @ prods
    lam = np.linalg.eigvalsh(a)
    l1 = lam[:, 2]
    l2 = lam[:, 1]
    bad = l2 <= _EIG_RTOL * l1
    esc = int(bad.sum())
    if esc:
        from .words import singular_values

        for i in np.flatnonzero(bad):
            rows = tuple(tuple(int(v) for v in row) for row in prods[i])
            s1, s2, s3 = singular_values(rows)
            l1[i] = s1 * s1
            l2[i] = s2 * s2
    log_s1 = 0.5 * np.log(l1)
    log_s2 = 0.5 * np.log(l2)
    r21 = log_s2 - log_s1
    r31 = -(2.0 * log_s1 + log_s2)   # log sigma3 - log sigma1 via the det trick
    return r21, r31, esc


def _img_log_ratio(prods: np.ndarray) -> np.ndarray:
    return -np.log(prods.sum(axis=1)).sum(axis=1)


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("PROJDIM_THREADS", "1")))
    except ValueError:
        return 1


def compute_level_data(system: IfsSystem, depth: int, with_sv: bool = False) -> LevelData:
    d = system.d
    gen = np.stack([g.as_array() for g in system.generators])
    hole_arrays = [h.as_array() for h in system.holes]
    log_vol_delta = system.simplex.log_volume
    with_sv = with_sv and d == 2

    data = LevelData(d, depth, 0, [], [], [], [], [])

    def stats(prods: np.ndarray):
        lv, li = _hole_stats(prods, hole_arrays, log_vol_delta, d)
        out = [lv, li, _img_log_ratio(prods), None, None, 0]
        if with_sv:
            out[3], out[4], out[5] = _sv_ratios(prods)
        return out

    def expand(parents: np.ndarray) -> np.ndarray:
        return (parents[:, None, :, :] @ gen[None, :, :, :]).reshape(-1, d + 1, d + 1)

    level = np.eye(d + 1)[None, :, :]
    for n in range(depth + 1):
        if n < depth or depth == 0:
            if n > 0:
                level = expand(level)
            results = [stats(level)]
        else:
            # final level: stream children in chunks, never holding them all.
            # Chunks are independent; merging in submission order keeps the
            # output identical for any worker count.
            chunks = [level[s : s + _CHUNK] for s in range(0, level.shape[0], _CHUNK)]
            workers = min(_worker_count(), len(chunks))
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(lambda p: stats(expand(p)), chunks))
            else:
                results = [stats(expand(p)) for p in chunks]
        data.hole_log_vol.append(np.concatenate([r[0] for r in results]))
        data.hole_log_in.append(np.concatenate([r[1] for r in results]))
        data.img_log_ratio.append(np.concatenate([r[2] for r in results]))
        if with_sv:
            data.sv_r21.append(np.concatenate([r[3] for r in results]))
            data.sv_r31.append(np.concatenate([r[4] for r in results]))
            data.escalations += sum(r[5] for r in results)
    data.num_holes = sum(len(a) for a in data.hole_log_vol)
    return data


_CACHE: dict = {}


def get_level_data(system: IfsSystem, depth: int, with_sv: bool = False) -> LevelData:
    """Cached accessor; deeper cached traversals are reused by truncation.

    One entry per system; a request for singular-value ratios upgrades the
    cached traversal in place (recomputed once at the deepest depth seen).
    """
    key = system.fingerprint()
    need_sv = with_sv and system.d == 2
    cached = _CACHE.get(key)
    if cached is None or cached.depth < depth or (need_sv and not cached.sv_r21):
        target = depth if cached is None else max(depth, cached.depth)
        keep_sv = need_sv or (cached is not None and bool(cached.sv_r21))
        cached = compute_level_data(system, target, with_sv=keep_sv)
        _CACHE[key] = cached
    return cached.truncated(depth) if cached.depth > depth else cached
