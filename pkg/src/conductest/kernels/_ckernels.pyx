# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: cyclic Jacobi sweeps and the Gray-code cut scan."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef extern from *:
    """
    static inline int cc_popcount(unsigned long long x) { return __builtin_popcountll(x); }
    static inline int cc_ctz(unsigned long long x) { return __builtin_ctzll(x); }
    """
    int cc_popcount(unsigned long long x) nogil
    int cc_ctz(unsigned long long x) nogil


cdef double _offdiag(double[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            acc += a[i, j] * a[i, j]
    return sqrt(2.0 * acc)


def jacobi_eigh(a, double tol=1e-10, int max_sweeps=100):
    """Cyclic Jacobi eigen-decomposition; see ``_pykernels.jacobi_eigh``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] arr = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = arr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] varr = np.eye(n)
    cdef double[:, ::1] A = arr
    cdef double[:, ::1] V = varr
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double apq, app, aqq, h, theta, t, c, s, akp, akq
    cdef int converged = -1

    with nogil:
        for sweep in range(max_sweeps + 1):
            if n < 2 or _offdiag(A, n) <= tol:
                converged = sweep
                break
            if sweep == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    if apq == 0.0:
                        continue
                    app = A[p, p]
                    aqq = A[q, q]
                    h = aqq - app
                    if fabs(h) + 100.0 * fabs(apq) == fabs(h):
                        t = apq / h  # apq negligible; avoids overflow in theta
                    else:
                        theta = 0.5 * h / apq
                        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for k in range(n):
                        akp = A[k, p]
                        akq = A[k, q]
                        A[k, p] = c * akp - s * akq
                        A[k, q] = s * akp + c * akq
                    for k in range(n):
                        A[p, k] = A[k, p]
                        A[q, k] = A[k, q]
                    A[p, p] = app - t * apq
                    A[q, q] = aqq + t * apq
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    for k in range(n):
                        akp = V[k, p]
                        akq = V[k, q]
                        V[k, p] = c * akp - s * akq
                        V[k, q] = s * akp + c * akq
    return arr.diagonal().copy(), varr, converged


def scan_min_conductance(adj_masks, degrees):
    """Gray-code minimum-conductance scan; see ``_pykernels.scan_min_conductance``."""
    masks_arr = np.ascontiguousarray(adj_masks, dtype=np.uint64)
    deg_arr = np.ascontiguousarray(degrees, dtype=np.int64)
    cdef const unsigned long long[::1] adj = masks_arr
    cdef const long long[::1] deg = deg_arr
    cdef Py_ssize_t n = deg_arr.shape[0]
    cdef long long total = 0
    cdef Py_ssize_t i
    for i in range(n):
        total += deg[i]
    cdef unsigned long long full = (1ULL << n) - 1ULL
    cdef unsigned long long reps = 1ULL << (n - 1)
    cdef unsigned long long k, s = 0, bit, key
    cdef long long cut = 0, vol = 0, volc, mv, d
    cdef long long best_cut = -1, best_vol = -1
    cdef unsigned long long best_key = 0
    cdef Py_ssize_t v
    cdef int b

    with nogil:
        for k in range(1, reps):
            b = cc_ctz(k)
            v = n - 1 - b
            bit = 1ULL << b
            d = deg[v]
            if s & bit:
                s ^= bit
                cut -= d - 2 * cc_popcount(adj[v] & s)
                vol -= d
            else:
                cut += d - 2 * cc_popcount(adj[v] & s)
                s |= bit
                vol += d
            volc = total - vol
            mv = vol if vol < volc else volc
            if mv <= 0:
                continue
            key = s if 2 * vol <= total else (full ^ s)
            if best_cut < 0 or cut * best_vol < best_cut * mv:
                best_cut = cut
                best_vol = mv
                best_key = key
            elif cut * best_vol == best_cut * mv and key < best_key:
                best_key = key
    return int(best_cut), int(best_vol), int(best_key)
