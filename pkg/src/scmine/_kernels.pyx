# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. ``_fallback.py`` mirrors every function here."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


def sparse_dot(const i64[::1] ids_a, const double[::1] w_a,
               const i64[::1] ids_b, const double[::1] w_b):
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t na = ids_a.shape[0], nb = ids_b.shape[0]
    cdef double acc = 0.0
    with nogil:
        while i < na and j < nb:
            if ids_a[i] == ids_b[j]:
                acc += w_a[i] * w_b[j]
                i += 1
                j += 1
            elif ids_a[i] < ids_b[j]:
                i += 1
            else:
                j += 1
    return acc


def quantize_counts(const cnp.uint8_t[:, :, ::1] raster, int bits):
    cdef Py_ssize_t h = raster.shape[0], w = raster.shape[1], y, x
    cdef int shift = 8 - bits
    cdef i64 term
    counts = np.zeros(1 << (3 * bits), dtype=np.int64)
    cdef i64[::1] c = counts
    with nogil:
        for y in range(h):
            for x in range(w):
                term = ((<i64>(raster[y, x, 0] >> shift)) << (2 * bits)) \
                    | ((<i64>(raster[y, x, 1] >> shift)) << bits) \
                    | (<i64>(raster[y, x, 2] >> shift))
                c[term] += 1
    return counts


def gibbs_sweep(const i64[::1] words, const i64[::1] docs, i64[::1] z,
                i64[:, ::1] n_dk, i64[:, ::1] n_kw, i64[::1] n_k,
                double alpha, double beta, const double[::1] uniforms):
    """One collapsed-Gibbs pass over every token, in token order."""
    cdef Py_ssize_t n = words.shape[0], i, t
    cdef Py_ssize_t K = n_k.shape[0], V = n_kw.shape[1]
    cdef double vbeta = V * beta, total, u
    cdef i64 w, d, k
    cdef double[::1] cum = np.empty(K, dtype=np.float64)
    with nogil:
        for i in range(n):
            w = words[i]
            d = docs[i]
            k = z[i]
            n_dk[d, k] -= 1
            n_kw[k, w] -= 1
            n_k[k] -= 1
            total = 0.0
            for t in range(K):
                total += (n_dk[d, t] + alpha) * (n_kw[t, w] + beta) / (n_k[t] + vbeta)
                cum[t] = total
            u = uniforms[i] * total
            k = K - 1
            for t in range(K):
                if cum[t] > u:
                    k = t
                    break
            z[i] = k
            n_dk[d, k] += 1
            n_kw[k, w] += 1
            n_k[k] += 1
