# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled mod-p matrix kernels; bit-identical twin of ``_kernels_py``."""

from libc.stdlib cimport malloc, free

BACKEND = "compiled"


cdef inline long long md(long long x, long long p):
    x %= p
    return x + p if x < 0 else x


cdef long long inv_mod(long long a, long long p):
    cdef long long t = 0, newt = 1, r = p, newr = a % p, q, tmp
    while newr != 0:
        q = r / newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


cdef long long* _flatten(a, Py_ssize_t* nr, Py_ssize_t* nc) except NULL:
    cdef Py_ssize_t rows = len(a)
    cdef Py_ssize_t cols = len(a[0]) if rows else 0
    cdef long long* buf = <long long*> malloc(rows * cols * sizeof(long long))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    for i in range(rows):
        row = a[i]
        for j in range(cols):
            buf[i * cols + j] = row[j]
    nr[0] = rows
    nc[0] = cols
    return buf


cdef list _unflatten(long long* buf, Py_ssize_t nr, Py_ssize_t nc):
    cdef list out = []
    cdef Py_ssize_t i, j
    for i in range(nr):
        row = []
        for j in range(nc):
            row.append(buf[i * nc + j])
        out.append(row)
    return out


def mat_add(a, b, p):
    cdef long long pp = p
    cdef Py_ssize_t nr, nc, i, j
    cdef long long* fa = _flatten(a, &nr, &nc)
    cdef long long* fb = _flatten(b, &nr, &nc)
    try:
        for i in range(nr * nc):
            fa[i] = md(fa[i] + fb[i], pp)
        return _unflatten(fa, nr, nc)
    finally:
        free(fa)
        free(fb)


def mat_sub(a, b, p):
    cdef long long pp = p
    cdef Py_ssize_t nr, nc, i
    cdef long long* fa = _flatten(a, &nr, &nc)
    cdef long long* fb = _flatten(b, &nr, &nc)
    try:
        for i in range(nr * nc):
            fa[i] = md(fa[i] - fb[i], pp)
        return _unflatten(fa, nr, nc)
    finally:
        free(fa)
        free(fb)


def mat_mul(a, b, p):
    cdef long long pp = p
    cdef Py_ssize_t ra, ca, rb, cb, i, j, k
    cdef long long* fa = _flatten(a, &ra, &ca)
    cdef long long* fb = _flatten(b, &rb, &cb)
    cdef long long* out = <long long*> malloc(ra * cb * sizeof(long long))
    cdef long long acc, aik
    if out == NULL:
        free(fa)
        free(fb)
        raise MemoryError()
    try:
        for i in range(ra):
            for j in range(cb):
                acc = 0
                for k in range(ca):
                    aik = fa[i * ca + k]
                    if aik:
                        acc = (acc + aik * fb[k * cb + j]) % pp
                out[i * cb + j] = acc
        return _unflatten(out, ra, cb)
    finally:
        free(fa)
        free(fb)
        free(out)


def mat_rank(a, p):
    cdef long long pp = p
    cdef Py_ssize_t nr, nc, col, i, j, piv
    cdef long long* m = _flatten(a, &nr, &nc)
    cdef long long inv, f, tmp
    cdef Py_ssize_t rank = 0
    try:
        for col in range(nc):
            piv = -1
            for i in range(rank, nr):
                if m[i * nc + col]:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(nc):
                    tmp = m[rank * nc + j]
                    m[rank * nc + j] = m[piv * nc + j]
                    m[piv * nc + j] = tmp
            inv = inv_mod(m[rank * nc + col], pp)
            for i in range(rank + 1, nr):
                if m[i * nc + col]:
                    f = (m[i * nc + col] * inv) % pp
                    for j in range(col, nc):
                        m[i * nc + j] = md(m[i * nc + j] - f * m[rank * nc + j], pp)
            rank += 1
            if rank == nr:
                break
        return rank
    finally:
        free(m)


def mat_rref(a, p):
    cdef long long pp = p
    cdef Py_ssize_t nr, nc, col, i, j, piv
    cdef long long* m = _flatten(a, &nr, &nc)
    cdef long long inv, f, tmp
    cdef Py_ssize_t rank = 0
    cdef list pivots = []
    try:
        for col in range(nc):
            piv = -1
            for i in range(rank, nr):
                if m[i * nc + col]:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(nc):
                    tmp = m[rank * nc + j]
                    m[rank * nc + j] = m[piv * nc + j]
                    m[piv * nc + j] = tmp
            inv = inv_mod(m[rank * nc + col], pp)
            if inv != 1:
                for j in range(col, nc):
                    m[rank * nc + j] = (m[rank * nc + j] * inv) % pp
            for i in range(nr):
                if i != rank and m[i * nc + col]:
                    f = m[i * nc + col]
                    for j in range(col, nc):
                        m[i * nc + j] = md(m[i * nc + j] - f * m[rank * nc + j], pp)
            pivots.append(col)
            rank += 1
            if rank == nr:
                break
        return _unflatten(m, nr, nc), pivots
    finally:
        free(m)


def mat_nullspace(a, p):
    rows, pivots = mat_rref(a, p)
    cdef Py_ssize_t nc = len(a[0]) if len(a) else 0
    cdef Py_ssize_t free_col, r
    pivot_set = set(pivots)
    basis = []
    cdef long long pp = p
    for free_col in range(nc):
        if free_col in pivot_set:
            continue
        v = [0] * nc
        v[free_col] = 1
        for r in range(len(pivots)):
            v[pivots[r]] = md(-rows[r][free_col], pp)
        basis.append(v)
    return basis


def mat_rnf(a, p):
    cdef long long pp = p
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t nr0, nc0, i, j, t, r, pi, pj
    cdef long long* m = _flatten(a, &nr0, &nc0)
    cdef long long* P = <long long*> malloc(n * n * sizeof(long long))
    cdef long long* Q = <long long*> malloc(n * n * sizeof(long long))
    cdef long long pv, inv, c, tmp
    if P == NULL or Q == NULL:
        free(m)
        if P != NULL:
            free(P)
        if Q != NULL:
            free(Q)
        raise MemoryError()
    try:
        for i in range(n):
            for j in range(n):
                P[i * n + j] = 1 if i == j else 0
                Q[i * n + j] = 1 if i == j else 0
        r = 0
        for _ in range(n):
            pi = -1
            pj = -1
            for j in range(r, n):
                for i in range(r, n):
                    if m[i * n + j]:
                        pi = i
                        pj = j
                        break
                if pi >= 0:
                    break
            if pi < 0:
                break
            if pi != r:
                for j in range(n):
                    tmp = m[r * n + j]
                    m[r * n + j] = m[pi * n + j]
                    m[pi * n + j] = tmp
                for t in range(n):
                    tmp = P[t * n + r]
                    P[t * n + r] = P[t * n + pi]
                    P[t * n + pi] = tmp
            if pj != r:
                for t in range(n):
                    tmp = m[t * n + r]
                    m[t * n + r] = m[t * n + pj]
                    m[t * n + pj] = tmp
                for t in range(n):
                    tmp = Q[r * n + t]
                    Q[r * n + t] = Q[pj * n + t]
                    Q[pj * n + t] = tmp
            pv = m[r * n + r]
            if pv != 1:
                inv = inv_mod(pv, pp)
                for j in range(n):
                    m[r * n + j] = (m[r * n + j] * inv) % pp
                for t in range(n):
                    P[t * n + r] = (P[t * n + r] * pv) % pp
            for i in range(n):
                if i != r and m[i * n + r]:
                    c = m[i * n + r]
                    for j in range(n):
                        m[i * n + j] = md(m[i * n + j] - c * m[r * n + j], pp)
                    for t in range(n):
                        P[t * n + r] = (P[t * n + r] + c * P[t * n + i]) % pp
            for j in range(n):
                if j != r and m[r * n + j]:
                    c = m[r * n + j]
                    m[r * n + j] = 0
                    for t in range(n):
                        Q[r * n + t] = (Q[r * n + t] + c * Q[j * n + t]) % pp
            r += 1
        return _unflatten(P, n, n), r, _unflatten(Q, n, n)
    finally:
        free(m)
        free(P)
        free(Q)
