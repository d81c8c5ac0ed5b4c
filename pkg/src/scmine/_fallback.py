"""Pure-Python versions of the kernels in ``_kernels.pyx``.

Arithmetic is performed in the same order as the compiled code so that a
seeded Gibbs run produces identical assignments on either backend.
"""

import numpy as np


def sparse_dot(ids_a, w_a, ids_b, w_b):
    ids_a = ids_a.tolist()
    ids_b = ids_b.tolist()
    w_a = w_a.tolist()
    w_b = w_b.tolist()
    i = j = 0
    na, nb = len(ids_a), len(ids_b)
    acc = 0.0
    while i < na and j < nb:
        a, b = ids_a[i], ids_b[j]
        if a == b:
            acc += w_a[i] * w_b[j]
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return acc


def quantize_counts(raster, bits):
    shift = 8 - bits
    px = (raster.reshape(-1, 3) >> shift).astype(np.int64)
    terms = (px[:, 0] << (2 * bits)) | (px[:, 1] << bits) | px[:, 2]
    return np.bincount(terms, minlength=1 << (3 * bits)).astype(np.int64)


def gibbs_sweep(words, docs, z, n_dk, n_kw, n_k, alpha, beta, uniforms):
    """One collapsed-Gibbs pass over every token, in token order."""
    K = n_k.shape[0]
    vbeta = n_kw.shape[1] * beta
    words_l = words.tolist()
    docs_l = docs.tolist()
    u_l = uniforms.tolist()
    z_l = z.tolist()
    ndk = n_dk.tolist()
    nkw = n_kw.tolist()
    nk = n_k.tolist()
    cum = [0.0] * K
    topics = range(K)
    for i in range(len(words_l)):
        w = words_l[i]
        row = ndk[docs_l[i]]
        k = z_l[i]
        row[k] -= 1
        nkw[k][w] -= 1
        nk[k] -= 1
        total = 0.0
        for t in topics:
            total += (row[t] + alpha) * (nkw[t][w] + beta) / (nk[t] + vbeta)
            cum[t] = total
        u = u_l[i] * total
        k = K - 1
        for t in topics:
            if cum[t] > u:
                k = t
                break
        z_l[i] = k
        row[k] += 1
        nkw[k][w] += 1
        nk[k] += 1
    z[:] = z_l
    n_dk[:] = ndk
    n_kw[:] = nkw
    n_k[:] = nk
