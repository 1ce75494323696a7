"""Pure-Python reference kernels.

Every function here has a twin with the same signature and the same
floating-point operation order in ``_ckernels.pyx``; the two backends are
expected to agree bit for bit.

Families are passed as ``(kind, p0, p1)`` with the y-dependent parameter
``p0 + p1 * y``; Cantor maps are affine and passed as ``(a, b)``.
Branches and zero tags are encoded as -1 / +1, with 0 meaning "no tag".
"""
import math

TENT = 0
QUADRATIC = 1
EX3_Q = 2
EX3_F = 3
EX3_G = 4

INTERIOR = 0
ENDPOINT = 1
FALLBACK = 2

CONVERGED = 1
ESCAPED = 0
EXHAUSTED = -1

MAX_BISECTIONS = 200


def f_eval(kind, p0, p1, y, x):
    if kind == TENT:
        s = p0 + p1 * y
        return (s - 1.0) - s * abs(x)
    if kind == QUADRATIC:
        c = p0 + p1 * y
        return c * (1.0 - x * x) - 1.0
    if kind == EX3_Q:
        return -(x * x)
    if kind == EX3_F:
        return -abs(x)
    if kind == EX3_G:
        return -math.sqrt(abs(x))
    raise ValueError("unknown family kind %r" % (kind,))


def cantor_branch(a, b, j, y):
    if j > 0:
        return a * y
    return 1.0 - (1.0 - b) * y


def step(kind, p0, p1, a, b, x, tag, y, zero_eps):
    """One application of F. Returns (x', tag', y', branch)."""
    if x == 0.0:
        j = tag
    elif x > 0.0:
        j = 1
    else:
        j = -1
    xn = f_eval(kind, p0, p1, y, x)
    yn = cantor_branch(a, b, j, y)
    if abs(xn) <= zero_eps:
        return 0.0, j, yn, j
    return xn, 0, yn, j


def orbit(kind, p0, p1, a, b, x, tag, y, n, zero_eps):
    xs = [x]
    tags = [tag]
    ys = [y]
    branches = []
    for _ in range(n):
        x, tag, y, j = step(kind, p0, p1, a, b, x, tag, y, zero_eps)
        xs.append(x)
        tags.append(tag)
        ys.append(y)
        branches.append(j)
    return xs, tags, ys, branches


def branch_inverse(kind, p0, p1, j, x, tag, y, root_tol):
    """Preimage of ``x`` (zero tag ``tag``) under the branch ``j`` of f(y).

    Returns ``(value, status)``. A target zero tagged with the opposite
    branch lies outside the codomain of F_j and falls back.
    """
    if tag != 0 and tag != j:
        return 0.0, FALLBACK
    top = f_eval(kind, p0, p1, y, 0.0)
    if x > top + root_tol:
        return 0.0, FALLBACK
    if x >= top:
        return 0.0, ENDPOINT
    if x <= -1.0:
        return float(j), INTERIOR
    if j < 0:
        lo = -1.0
        hi = 0.0
    else:
        lo = 0.0
        hi = 1.0
    rising = j < 0
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= root_tol:
            break
        mid = 0.5 * (lo + hi)
        fm = f_eval(kind, p0, p1, y, mid)
        if fm == x:
            return mid, INTERIOR
        if (fm < x) == rising:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), INTERIOR


def preimages(kind, p0, p1, a, b, y, depth, root_tol):
    """All labeled preimages of the critical line on fiber ``y``.

    Words have length 1..depth. Returns a list of ``(word, x, tag)`` where
    ``word`` is a tuple of -1/+1; chains that hit the fallback are dropped.
    """
    out = []
    if depth <= 0:
        return out
    for j in (-1, 1):
        x, status = branch_inverse(kind, p0, p1, j, 0.0, j, y, root_tol)
        if status != FALLBACK:
            out.append(((j,), x, j if x == 0.0 else 0))
        if depth > 1:
            yj = cantor_branch(a, b, j, y)
            for word, xs, tg in preimages(kind, p0, p1, a, b, yj, depth - 1, root_tol):
                x, status = branch_inverse(kind, p0, p1, j, xs, tg, y, root_tol)
                if status != FALLBACK:
                    out.append(((j,) + word, x, j if x == 0.0 else 0))
    return out


def basin_probe(kind, p0, p1, fibers, word, x, tag, target, steps, conv_tol, zero_eps):
    """Follow the fiber return map along ``word`` (cyclically).

    Returns ``(status, iterations)``: CONVERGED once a full period lands
    within ``conv_tol`` of ``target``, ESCAPED as soon as the sign sequence
    leaves ``word``, EXHAUSTED when the budget runs out.
    """
    m = len(word)
    for it in range(steps):
        i = it % m
        if x == 0.0:
            j = tag
        elif x > 0.0:
            j = 1
        else:
            j = -1
        if j != word[i]:
            return ESCAPED, it
        xn = f_eval(kind, p0, p1, fibers[i], x)
        if abs(xn) <= zero_eps:
            x = 0.0
            tag = j
        else:
            x = xn
            tag = 0
        if i == m - 1 and abs(x - target) <= conv_tol:
            return CONVERGED, it + 1
    return EXHAUSTED, steps
