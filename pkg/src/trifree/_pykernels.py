"""Pure-Python/numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``;
``trifree._kernels`` picks one at import time.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 15


def mixing_sweep(V, indptr, indices, weights):
    """One coordinate-ascent sweep: ``V[u] <- -normalise(sum_v w_uv V[v])`` in place.

    Rows whose neighbourhood sum vanishes are left unchanged.
    """
    n = V.shape[0]
    for u in range(n):
        lo, hi = indptr[u], indptr[u + 1]
        if lo == hi:
            continue
        g = weights[lo:hi] @ V[indices[lo:hi]]
        norm = np.sqrt(g @ g)
        if norm > 0.0:
            V[u] = -g / norm


def max_cut_enum(n, eu, ev, ew):
    """Exhaustive max cut with vertex ``n - 1`` pinned to side 0.

    Returns ``(best_weight, mask)`` where bit ``v`` of ``mask`` is the side of ``v``.
    """
    if n <= 1 or len(eu) == 0:
        return 0, 0
    total = 1 << (n - 1)
    best, best_mask = -1, 0
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        diff = ((masks[:, None] >> eu[None, :]) ^ (masks[:, None] >> ev[None, :])) & 1
        vals = diff @ ew
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_mask = int(vals[i]), int(masks[i])
    return best, best_mask


def colour3_enum(n, eu, ev, ew):
    """Exhaustive best 3-colouring (colours 0..2) with vertex 0 pinned to colour 0.

    Returns ``(best_weight, colours)`` with ``colours`` an int64 array.
    """
    if n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    total = 3 ** (n - 1)
    pow3 = 3 ** np.arange(n - 1, dtype=np.int64)
    best, best_code = -1, 0
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        cols = np.zeros((len(codes), n), dtype=np.int64)
        cols[:, 1:] = (codes[:, None] // pow3[None, :]) % 3
        vals = (cols[:, eu] != cols[:, ev]).astype(np.int64) @ ew
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_code = int(vals[i]), int(codes[i])
    colours = np.zeros(n, dtype=np.int64)
    colours[1:] = (best_code // pow3) % 3
    return best, colours


def _conflicts(m, tri_ptr, tri_a, tri_b):
    return [
        [(int(tri_a[t]), int(tri_b[t])) for t in range(tri_ptr[k], tri_ptr[k + 1])]
        for k in range(m)
    ]


def max_triangle_free(m, ew, tri_ptr, tri_a, tri_b, collect_all=False):
    """Branch and bound over support edges in index order.

    ``tri_ptr/tri_a/tri_b`` list, for every edge ``k``, the pairs ``(a, b)``
    with ``a < b < k`` closing a triangle with ``k``. Returns
    ``(best_weight, masks)``; ``masks`` holds every optimal selection when
    ``collect_all`` is set, otherwise one.
    """
    conf = _conflicts(m, tri_ptr, tri_a, tri_b)
    w = [int(x) for x in ew]
    suffix = [0] * (m + 1)
    for k in range(m - 1, -1, -1):
        suffix[k] = suffix[k + 1] + w[k]
    best = -1
    found: list[int] = []

    def rec(k, mask, wt):
        nonlocal best, found
        bound = wt + suffix[k]
        if bound < best or (bound == best and not collect_all):
            return
        if k == m:
            if wt > best:
                best, found = wt, [mask]
            else:
                found.append(mask)
            return
        if all(not (mask >> a & 1 and mask >> b & 1) for a, b in conf[k]):
            rec(k + 1, mask | (1 << k), wt + w[k])
        rec(k + 1, mask, wt)

    rec(0, 0, 0)
    return best, found


def triangle_free_masks(m, tri_ptr, tri_a, tri_b, init, free):
    """All triangle-free selections ``S`` with ``init <= S <= init | free``."""
    conf = _conflicts(m, tri_ptr, tri_a, tri_b)
    out: list[int] = []

    def rec(k, mask):
        if k == m:
            out.append(mask)
            return
        bit = 1 << k
        ok = all(not (mask >> a & 1 and mask >> b & 1) for a, b in conf[k])
        if init & bit:
            if ok:
                rec(k + 1, mask | bit)
            return
        if free & bit and ok:
            rec(k + 1, mask | bit)
        rec(k + 1, mask)

    rec(0, 0)
    return out


def atom_intervals(L, y, z, pts, mass):
    """Per grid atom, the open interval of ``t`` on which all constraints hold.

    Atoms ``u`` range over ``pts**r`` (``r = L.shape[1]``) with product mass.
    Constraint ``i`` reads ``L[i] . u + z[i] t > y[i]``. Returns ``(lo, hi, w)``
    for atoms with a non-empty interval; ``lo``/``hi`` may be infinite.
    """
    d, r = L.shape
    if r == 0:
        U = np.zeros((1, 0))
        W = np.ones(1)
    else:
        # first coordinate varies fastest, matching the compiled kernel's order
        grids = np.meshgrid(*([pts] * r), indexing="ij")[::-1]
        U = np.stack([g.ravel() for g in grids], axis=1)
        mgrids = np.meshgrid(*([mass] * r), indexing="ij")[::-1]
        W = np.prod(np.stack([g.ravel() for g in mgrids], axis=1), axis=1)
    thr = y[None, :] - U @ L.T  # (A, d)
    lo = np.full(len(U), -np.inf)
    hi = np.full(len(U), np.inf)
    ok = np.ones(len(U), dtype=bool)
    for i in range(d):
        zi = z[i]
        if zi > 0:
            np.maximum(lo, thr[:, i] / zi, out=lo)
        elif zi < 0:
            np.minimum(hi, thr[:, i] / zi, out=hi)
        else:
            ok &= thr[:, i] < 0
    keep = ok & (lo < hi)
    return lo[keep], hi[keep], W[keep]
