# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; behaviour matches ``_kernels_py`` exactly."""

from libc.stdlib cimport malloc, free

from . import _kernels_py


cdef long long _modpow(long long b, long long e, long long p):
    cdef long long r = 1
    b %= p
    while e > 0:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


def mul_terms(dict a, dict b, tuple weights, bound, modulus):
    cdef Py_ssize_t nv = len(weights)
    cdef Py_ssize_t i, ia, ib, na, nb
    cdef long wa, wb, bnd
    cdef bint bounded = bound is not None
    cdef long *w
    cdef long *wbs
    cdef dict out = {}
    cdef tuple ea, eb
    cdef list lb, exps_b, coeffs_b
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    bnd = bound if bounded else 0
    w = <long *> malloc(nv * sizeof(long)) if nv else NULL
    for i in range(nv):
        w[i] = weights[i]
    lb = []
    for eb, cb in b.items():
        wb = 0
        for i in range(nv):
            wb += <long> eb[i] * w[i]
        lb.append((wb, eb, cb))
    if bounded:
        lb.sort(key=lambda t: t[0])
    nb = len(lb)
    wbs = <long *> malloc((nb + 1) * sizeof(long))
    exps_b = [t[1] for t in lb]
    coeffs_b = [t[2] for t in lb]
    for ib in range(nb):
        wbs[ib] = lb[ib][0]
    try:
        for ea, ca in a.items():
            wa = 0
            for i in range(nv):
                wa += <long> ea[i] * w[i]
            if bounded and wa > bnd:
                continue
            for ib in range(nb):
                if bounded and wa + wbs[ib] > bnd:
                    break
                eb = <tuple> exps_b[ib]
                e = tuple([ea[i] + eb[i] for i in range(nv)])
                c = ca * coeffs_b[ib]
                prev = out.get(e)
                out[e] = c if prev is None else prev + c
    finally:
        free(w)
        free(wbs)
    if modulus:
        return {e: c % modulus for e, c in out.items() if c % modulus}
    return {e: c for e, c in out.items() if c}


def rref_mod_p(rows, Py_ssize_t ncols, long long p):
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t i, j, col, r = 0, piv
    cdef long long f, inv, x
    cdef long long *m
    cdef long long *row
    cdef long long *other
    cdef list pivots = []
    if nrows == 0 or ncols == 0:
        return [], []
    if p >= 3037000499:
        # products of residues would overflow 64 bits
        return _kernels_py.rref_mod_p(rows, ncols, p)
    m = <long long *> malloc(nrows * ncols * sizeof(long long))
    try:
        for i in range(nrows):
            src = rows[i]
            for j in range(ncols):
                x = src[j] % p
                m[i * ncols + j] = x
        for col in range(ncols):
            piv = -1
            for i in range(r, nrows):
                if m[i * ncols + col] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(ncols):
                    x = m[r * ncols + j]
                    m[r * ncols + j] = m[piv * ncols + j]
                    m[piv * ncols + j] = x
            row = m + r * ncols
            inv = _modpow(row[col], p - 2, p)
            if inv != 1:
                for j in range(col, ncols):
                    row[j] = row[j] * inv % p
            for i in range(nrows):
                if i == r:
                    continue
                other = m + i * ncols
                f = other[col]
                if f:
                    for j in range(col, ncols):
                        if row[j]:
                            other[j] = ((other[j] - f * row[j]) % p + p) % p
            pivots.append(col)
            r += 1
            if r == nrows:
                break
        out = [[m[i * ncols + j] for j in range(ncols)] for i in range(r)]
    finally:
        free(m)
    return out, pivots


def echelon_int(rows, Py_ssize_t ncols):
    cdef list mat = [list(src) for src in rows]
    cdef Py_ssize_t nrows = len(mat)
    cdef Py_ssize_t i, j, col, r = 0
    cdef list pr, row
    cdef list pivots = []
    prev = 1
    for col in range(ncols):
        piv = -1
        for i in range(r, nrows):
            if mat[i][col]:
                piv = i
                break
        if piv < 0:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pr = mat[r]
        d = pr[col]
        for i in range(r + 1, nrows):
            row = mat[i]
            f = row[col]
            for j in range(col + 1, ncols):
                row[j] = (d * row[j] - f * pr[j]) // prev
            row[col] = 0
        prev = d
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return [row for row in mat[:r]], pivots
