# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; signatures and semantics mirror ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


def mixing_sweep(double[:, ::1] V, const int64_t[::1] indptr,
                 const int64_t[::1] indices, const double[::1] weights):
    cdef Py_ssize_t n = V.shape[0], k = V.shape[1]
    cdef Py_ssize_t u, p, j, v
    cdef double norm, w
    cdef double[::1] g = np.empty(k, dtype=np.float64)
    for u in range(n):
        if indptr[u] == indptr[u + 1]:
            continue
        for j in range(k):
            g[j] = 0.0
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            w = weights[p]
            for j in range(k):
                g[j] += w * V[v, j]
        norm = 0.0
        for j in range(k):
            norm += g[j] * g[j]
        norm = sqrt(norm)
        if norm > 0.0:
            for j in range(k):
                V[u, j] = -g[j] / norm


def max_cut_enum(int n, const int64_t[::1] eu, const int64_t[::1] ev,
                 const int64_t[::1] ew):
    # Gray-code walk over sides of vertices 0..n-2; vertex n-1 stays on side 0
    cdef Py_ssize_t m = eu.shape[0]
    if n <= 1 or m == 0:
        return 0, 0
    cdef Py_ssize_t i, p, v, bit
    cdef uint64_t total = (<uint64_t>1) << (n - 1)
    cdef uint64_t step, mask = 0, best_mask = 0
    cdef int64_t cur = 0, best = 0
    # incidence lists
    cdef int64_t[::1] deg_ptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(m):
        deg_ptr[eu[i] + 1] += 1
        deg_ptr[ev[i] + 1] += 1
    for v in range(n):
        deg_ptr[v + 1] += deg_ptr[v]
    cdef int64_t[::1] fill = np.array(deg_ptr[:n], dtype=np.int64)
    cdef int64_t[::1] nbr = np.empty(2 * m, dtype=np.int64)
    cdef int64_t[::1] nw = np.empty(2 * m, dtype=np.int64)
    for i in range(m):
        nbr[fill[eu[i]]] = ev[i]
        nw[fill[eu[i]]] = ew[i]
        fill[eu[i]] += 1
        nbr[fill[ev[i]]] = eu[i]
        nw[fill[ev[i]]] = ew[i]
        fill[ev[i]] += 1
    cdef int sv, su
    for step in range(1, total):
        bit = 0
        while not ((step >> bit) & 1):
            bit += 1
        sv = (mask >> bit) & 1
        # flipping `bit`: edges to same-side neighbours join the cut, others leave
        for p in range(deg_ptr[bit], deg_ptr[bit + 1]):
            su = (mask >> nbr[p]) & 1
            if su == sv:
                cur += nw[p]
            else:
                cur -= nw[p]
        mask ^= (<uint64_t>1) << bit
        if cur > best:
            best = cur
            best_mask = mask
    return int(best), int(best_mask)


def colour3_enum(int n, const int64_t[::1] eu, const int64_t[::1] ev,
                 const int64_t[::1] ew):
    cdef Py_ssize_t m = eu.shape[0]
    colours_out = np.zeros(n, dtype=np.int64)
    if n == 0:
        return 0, colours_out
    cdef int64_t[::1] col = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] best_col = colours_out
    cdef int64_t total = 1, code, cur, best = -1
    cdef Py_ssize_t i, v
    for v in range(n - 1):
        total *= 3
    for code in range(total):
        if code > 0:
            # odometer increment on vertices 1..n-1
            v = 1
            while True:
                col[v] += 1
                if col[v] < 3:
                    break
                col[v] = 0
                v += 1
        cur = 0
        for i in range(m):
            if col[eu[i]] != col[ev[i]]:
                cur += ew[i]
        if cur > best:
            best = cur
            for v in range(n):
                best_col[v] = col[v]
    return int(best), colours_out


cdef struct Conf:
    Py_ssize_t m
    const int64_t* ptr
    const int64_t* a
    const int64_t* b


cdef inline bint _ok(Conf* c, Py_ssize_t k, uint64_t mask) nogil:
    cdef Py_ssize_t t
    for t in range(c.ptr[k], c.ptr[k + 1]):
        if (mask >> c.a[t]) & 1 and (mask >> c.b[t]) & 1:
            return False
    return True


cdef class _BB:
    cdef Conf c
    cdef int64_t* w
    cdef int64_t* suffix
    cdef int64_t best
    cdef bint collect_all
    cdef list found
    cdef object keep

    cdef void rec(self, Py_ssize_t k, uint64_t mask, int64_t wt):
        cdef int64_t bound = wt + self.suffix[k]
        if bound < self.best or (bound == self.best and not self.collect_all):
            return
        if k == self.c.m:
            if wt > self.best:
                self.best = wt
                self.found = [mask]
            else:
                self.found.append(mask)
            return
        if _ok(&self.c, k, mask):
            self.rec(k + 1, mask | ((<uint64_t>1) << k), wt + self.w[k])
        self.rec(k + 1, mask, wt)


def max_triangle_free(int m, const int64_t[::1] ew, const int64_t[::1] tri_ptr,
                      const int64_t[::1] tri_a, const int64_t[::1] tri_b,
                      bint collect_all=False):
    if m > 63:
        raise ValueError("compiled kernel supports at most 63 support edges")
    cdef int64_t[::1] w = np.ascontiguousarray(ew, dtype=np.int64)
    cdef int64_t[::1] suffix = np.zeros(m + 1, dtype=np.int64)
    cdef Py_ssize_t k
    for k in range(m - 1, -1, -1):
        suffix[k] = suffix[k + 1] + w[k]
    cdef _BB bb = _BB()
    bb.c.m = m
    bb.c.ptr = &tri_ptr[0]
    bb.c.a = &tri_a[0] if tri_a.shape[0] else NULL
    bb.c.b = &tri_b[0] if tri_b.shape[0] else NULL
    bb.w = &w[0] if m else NULL
    bb.suffix = &suffix[0]
    bb.best = -1
    bb.collect_all = collect_all
    bb.found = []
    bb.keep = (w, suffix)
    bb.rec(0, 0, 0)
    return int(bb.best), [int(x) for x in bb.found]


cdef class _Enum:
    cdef Conf c
    cdef uint64_t init, free
    cdef list out

    cdef void rec(self, Py_ssize_t k, uint64_t mask):
        cdef uint64_t bit
        cdef bint ok
        if k == self.c.m:
            self.out.append(mask)
            return
        bit = (<uint64_t>1) << k
        ok = _ok(&self.c, k, mask)
        if self.init & bit:
            if ok:
                self.rec(k + 1, mask | bit)
            return
        if (self.free & bit) and ok:
            self.rec(k + 1, mask | bit)
        self.rec(k + 1, mask)


def triangle_free_masks(int m, const int64_t[::1] tri_ptr, const int64_t[::1] tri_a,
                        const int64_t[::1] tri_b, init, free):
    if m > 63:
        raise ValueError("compiled kernel supports at most 63 support edges")
    cdef _Enum en = _Enum()
    en.c.m = m
    en.c.ptr = &tri_ptr[0]
    en.c.a = &tri_a[0] if tri_a.shape[0] else NULL
    en.c.b = &tri_b[0] if tri_b.shape[0] else NULL
    en.init = init
    en.free = free
    en.out = []
    en.rec(0, 0)
    return [int(x) for x in en.out]


def atom_intervals(const double[:, :] L, const double[::1] y, const double[::1] z,
                   const double[::1] pts, const double[::1] mass):
    cdef Py_ssize_t d = L.shape[0], r = L.shape[1], k = pts.shape[0]
    cdef Py_ssize_t A = 1, a, i, j, cnt = 0
    for j in range(r):
        A *= k
    lo_out = np.empty(A, dtype=np.float64)
    hi_out = np.empty(A, dtype=np.float64)
    w_out = np.empty(A, dtype=np.float64)
    cdef double[::1] lo_v = lo_out, hi_v = hi_out, w_v = w_out
    cdef Py_ssize_t[::1] idx = np.zeros(max(r, 1), dtype=np.intp)
    cdef double lo, hi, wt, val, thr
    cdef bint ok
    for a in range(A):
        if a > 0:
            j = 0
            while True:
                idx[j] += 1
                if idx[j] < k:
                    break
                idx[j] = 0
                j += 1
        lo = -INFINITY
        hi = INFINITY
        ok = True
        for i in range(d):
            val = 0.0
            for j in range(r):
                val += L[i, j] * pts[idx[j]]
            thr = y[i] - val
            if z[i] > 0:
                if thr / z[i] > lo:
                    lo = thr / z[i]
            elif z[i] < 0:
                if thr / z[i] < hi:
                    hi = thr / z[i]
            elif not (thr < 0):
                ok = False
                break
        if ok and lo < hi:
            wt = 1.0
            for j in range(r):
                wt *= mass[idx[j]]
            lo_v[cnt] = lo
            hi_v[cnt] = hi
            w_v[cnt] = wt
            cnt += 1
    return lo_out[:cnt], hi_out[:cnt], w_out[:cnt]
