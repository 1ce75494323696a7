import numpy as np
from hypothesis import given, settings, strategies as st

from kneadlab import (
    CantorMapSpec,
    Point,
    SignedCoordinate,
    ToyModel,
    branch_inverse,
    cocycle,
    eval_step,
    itinerary,
    preimage_set,
    psi_extended,
    quadratic,
    tent,
)
from kneadlab.model import eval_orbit

unit = st.floats(0.0, 1.0, allow_nan=False)
xs = st.floats(-1.0, 1.0, allow_nan=False)
side = st.sampled_from(["-", "+"])

models = st.one_of(
    st.builds(lambda s0, s1: ToyModel(tent(s0, s1)), st.floats(1.2, 1.8), st.floats(-0.2, 0.2)),
    st.builds(lambda c0, c1: ToyModel(quadratic(c0, c1)), st.floats(0.8, 1.6), st.floats(-0.4, 0.4)),
)
cantors = st.builds(lambda a, gap: CantorMapSpec(a, a + gap),
                    st.floats(0.1, 0.45), st.floats(0.05, 0.4))


def coord(x, s):
    return SignedCoordinate.of(x, s)


@given(xs, side, xs, side)
def test_order_is_total_and_antisymmetric(x1, s1, x2, s2):
    a, b = coord(x1, s1), coord(x2, s2)
    assert (a < b) + (b < a) + (a == b) == 1


@given(models, unit, side, st.floats(0.0, 1.0))
def test_inverse_roundtrip(model, y, j, t):
    top = model.f(y, 0.0)
    x = -1.0 + t * (top + 1.0)
    xi = branch_inverse(model, j, x, y)
    assert abs(model.f(y, xi.value) - x) <= 10 * model.root_tol + 1e-14
    assert xi.branch.symbol == j


@given(models, xs, side, unit)
def test_skew_structure(model, x, s, y):
    p = Point(coord(x, s), y)
    q = eval_step(model, p)
    assert q.y == model.K(p.x.branch, y)


@given(models, xs, side, unit, st.integers(1, 20))
def test_itinerary_shift(model, x, s, y, d):
    p = Point(coord(x, s), y)
    assert itinerary(model, eval_step(model, p), d).symbols == itinerary(model, p, d + 1).symbols[1:]


@given(cantors, cantors, unit, unit)
@settings(max_examples=60)
def test_psi_monotone(F, G, y1, y2):
    if y1 == y2:
        return
    lo, hi = sorted((y1, y2))
    assert psi_extended(F, G, lo) <= psi_extended(F, G, hi)


@given(cantors, cantors)
@settings(max_examples=30)
def test_psi_fixes_endpoints(F, G):
    assert psi_extended(F, G, 0.0) == 0.0
    assert psi_extended(F, G, 1.0) == 1.0


@given(models, st.floats(-0.95, 0.95), unit, st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=60)
def test_cocycle_chain(model, x, y, a, b):
    p = Point.of(x if x != 0 else 0.5, y)
    q = eval_orbit(model, p, a)[0][-1]
    lhs = cocycle(model, p, a + b).matrix()
    rhs = cocycle(model, q, b).matrix() @ cocycle(model, p, a).matrix()
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-12)


@given(models, unit, st.integers(1, 6))
@settings(max_examples=40)
def test_preimages_sorted_and_nested(model, y, n):
    part = preimage_set(model, y, n)
    keys = [p.x.sort_key() for p in part.points]
    assert all(u < v for u, v in zip(keys, keys[1:]))
    assert part.labels <= preimage_set(model, y, n + 1).labels
