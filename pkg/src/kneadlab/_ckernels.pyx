# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""
from libc.math cimport fabs, sqrt

DEF TENT = 0
DEF QUADRATIC = 1
DEF EX3_Q = 2
DEF EX3_F = 3
DEF EX3_G = 4

DEF INTERIOR = 0
DEF ENDPOINT = 1
DEF FALLBACK = 2

DEF CONVERGED = 1
DEF ESCAPED = 0
DEF EXHAUSTED = -1

DEF MAX_BISECTIONS = 200


cdef inline double _f(int kind, double p0, double p1, double y, double x) except? -9e300:
    cdef double s
    if kind == TENT:
        s = p0 + p1 * y
        return (s - 1.0) - s * fabs(x)
    if kind == QUADRATIC:
        s = p0 + p1 * y
        return s * (1.0 - x * x) - 1.0
    if kind == EX3_Q:
        return -(x * x)
    if kind == EX3_F:
        return -fabs(x)
    if kind == EX3_G:
        return -sqrt(fabs(x))
    raise ValueError("unknown family kind %r" % (kind,))


cdef inline double _k_inv(double a, double b, int j, double y):
    if j > 0:
        return a * y
    return 1.0 - (1.0 - b) * y


cdef int _inverse(int kind, double p0, double p1, int j, double x, int tag,
                  double y, double root_tol, double* out) except -1:
    cdef double top, lo, hi, mid, fm
    cdef bint rising
    cdef int it
    if tag != 0 and tag != j:
        out[0] = 0.0
        return FALLBACK
    top = _f(kind, p0, p1, y, 0.0)
    if x > top + root_tol:
        out[0] = 0.0
        return FALLBACK
    if x >= top:
        out[0] = 0.0
        return ENDPOINT
    if x <= -1.0:
        out[0] = <double>j
        return INTERIOR
    if j < 0:
        lo = -1.0
        hi = 0.0
    else:
        lo = 0.0
        hi = 1.0
    rising = j < 0
    for it in range(MAX_BISECTIONS):
        if hi - lo <= root_tol:
            break
        mid = 0.5 * (lo + hi)
        fm = _f(kind, p0, p1, y, mid)
        if fm == x:
            out[0] = mid
            return INTERIOR
        if (fm < x) == rising:
            lo = mid
        else:
            hi = mid
    out[0] = 0.5 * (lo + hi)
    return INTERIOR


def f_eval(int kind, double p0, double p1, double y, double x):
    return _f(kind, p0, p1, y, x)


def cantor_branch(double a, double b, int j, double y):
    return _k_inv(a, b, j, y)


def step(int kind, double p0, double p1, double a, double b,
         double x, int tag, double y, double zero_eps):
    cdef int j
    cdef double xn, yn
    if x == 0.0:
        j = tag
    elif x > 0.0:
        j = 1
    else:
        j = -1
    xn = _f(kind, p0, p1, y, x)
    yn = _k_inv(a, b, j, y)
    if fabs(xn) <= zero_eps:
        return 0.0, j, yn, j
    return xn, 0, yn, j


def orbit(int kind, double p0, double p1, double a, double b,
          double x, int tag, double y, int n, double zero_eps):
    cdef int i, j
    cdef double xn
    xs = [x]
    tags = [tag]
    ys = [y]
    branches = []
    for i in range(n):
        if x == 0.0:
            j = tag
        elif x > 0.0:
            j = 1
        else:
            j = -1
        xn = _f(kind, p0, p1, y, x)
        y = _k_inv(a, b, j, y)
        if fabs(xn) <= zero_eps:
            x = 0.0
            tag = j
        else:
            x = xn
            tag = 0
        xs.append(x)
        tags.append(tag)
        ys.append(y)
        branches.append(j)
    return xs, tags, ys, branches


def branch_inverse(int kind, double p0, double p1, int j, double x, int tag,
                   double y, double root_tol):
    cdef double value
    cdef int status = _inverse(kind, p0, p1, j, x, tag, y, root_tol, &value)
    return value, status


cdef list _preimages(int kind, double p0, double p1, double a, double b,
                     double y, int depth, double root_tol):
    cdef list out = []
    cdef list sub
    cdef int j, status, tg
    cdef double x, xs, yj
    cdef tuple word
    if depth <= 0:
        return out
    for j in (-1, 1):
        status = _inverse(kind, p0, p1, j, 0.0, j, y, root_tol, &x)
        if status != FALLBACK:
            out.append(((j,), x, j if x == 0.0 else 0))
        if depth > 1:
            yj = _k_inv(a, b, j, y)
            sub = _preimages(kind, p0, p1, a, b, yj, depth - 1, root_tol)
            for word, xs, tg in sub:
                status = _inverse(kind, p0, p1, j, xs, tg, y, root_tol, &x)
                if status != FALLBACK:
                    out.append(((j,) + word, x, j if x == 0.0 else 0))
    return out


def preimages(int kind, double p0, double p1, double a, double b,
              double y, int depth, double root_tol):
    return _preimages(kind, p0, p1, a, b, y, depth, root_tol)


def basin_probe(int kind, double p0, double p1, fibers, word, double x, int tag,
                double target, long steps, double conv_tol, double zero_eps):
    cdef int m = len(word)
    cdef long it
    cdef int i, j
    cdef double xn
    cdef double[64] fib
    cdef int[64] wd
    if m > 64:
        raise ValueError("word longer than 64 letters")
    for i in range(m):
        fib[i] = fibers[i]
        wd[i] = word[i]
    for it in range(steps):
        i = it % m
        if x == 0.0:
            j = tag
        elif x > 0.0:
            j = 1
        else:
            j = -1
        if j != wd[i]:
            return ESCAPED, it
        xn = _f(kind, p0, p1, fib[i], x)
        if fabs(xn) <= zero_eps:
            x = 0.0
            tag = j
        else:
            x = xn
            tag = 0
        if i == m - 1 and fabs(x - target) <= conv_tol:
            return CONVERGED, it + 1
    return EXHAUSTED, steps
