import math

import numpy as np
import pytest

from kneadlab import (
    CombinatorialInequivalenceError,
    Point,
    build_Hn,
    convergence_estimate,
    density_report,
    equicontinuity_modulus,
    fixture,
    pl_conjugacy,
    preimage_set,
    trace_curve,
)
from kneadlab.equivalence import (
    PLConjugacy,
    hausdorff_1d,
    semiconjugacy_residual,
    word_tail_residual,
)
from kneadlab.model import ZERO_MINUS, ZERO_PLUS, Branch, eval_step, word_key

S = 1 / math.sqrt(2)


def _grid(nx=65, ny=9, centred=False):
    if centred:
        xs = -1 + (np.arange(nx) + 0.5) * 2 / nx
    else:
        xs = np.linspace(-1, 1, nx)
    return [Point.of(x, y, "+") for y in np.linspace(0, 1, ny) for x in xs]


def test_depth_one_is_critical_line(tent2):
    part = preimage_set(tent2, 0.3, 1)
    assert [p.label for p in part.points] == ["-1", "0-", "0+", "1"]
    assert part.labels == {"0-", "0+"}


def test_depth_two_tent(tent2):
    part = preimage_set(tent2, 0.8, 2)
    assert [(p.label, p.x.value) for p in part.points] == [
        ("-1", -1.0), ("-", -0.5), ("0-", 0.0), ("0+", 0.0), ("+", 0.5), ("1", 1.0)]


def test_depth_two_quadratic(quad2):
    part = preimage_set(quad2, 0.1, 2)
    assert part.by_label("-").x.value == pytest.approx(-S, abs=1e-12)
    assert part.by_label("+").x.value == pytest.approx(S, abs=1e-12)


def test_invalid_depth(tent2):
    with pytest.raises(ValueError):
        preimage_set(tent2, 0.3, 0)


def test_tent_preimages_are_dyadic(tent2):
    for n in range(1, 9):
        xs = sorted(p.x.value for p in preimage_set(tent2, 0.45, n).points)
        k = 2 ** (n - 1)
        expect = sorted(set(np.arange(-k, k + 1) / k))
        # 0 appears twice (0- and 0+)
        assert sorted(set(xs)) == pytest.approx(expect, abs=1e-12)


def test_points_strictly_ordered(coupled):
    for y in (0.0, 0.37, 1.0):
        pts = preimage_set(coupled, y, 7).points
        keys = [p.x.sort_key() for p in pts]
        assert all(u < v for u, v in zip(keys, keys[1:]))


def test_intervals_skip_the_critical_pair(tent2):
    part = preimage_set(tent2, 0.5, 3)
    assert len(part.intervals) == len(part.points) - 2
    lefts = [u.label for u, _ in part.intervals]
    assert "0+" in lefts and ("0-", "0+") not in [(u.label, v.label) for u, v in part.intervals]


@pytest.mark.parametrize("name", ["tent2", "quad2", "quad1.2", "coupled", "example3-q"])
def test_nesting(name):
    m = fixture(name)
    for y in (0.0, 0.6):
        for n in range(1, 7):
            assert preimage_set(m, y, n).labels <= preimage_set(m, y, n + 1).labels


@pytest.mark.parametrize("name", ["tent2", "quad2", "coupled"])
def test_labels_land_on_critical_line(name):
    m = fixture(name)
    for y in (0.05, 0.5, 0.95):
        for p in preimage_set(m, y, 5).labeled:
            q = Point(p.x, y)
            for letter in p.word:
                assert q.x.branch.symbol == letter
                q = eval_step(m, q)
            if p.word:
                assert abs(q.x.value) <= 1e-11
                assert not q.x.is_critical or q.x.branch.symbol == p.word[-1]


def test_word_tail_shift_tent(tent2):
    for y in (0.0, 0.3, 0.9):
        assert word_tail_residual(tent2, y, 8) <= 10 * tent2.root_tol


def test_word_tail_shift_coupled(coupled):
    for y in (0.1, 0.7):
        assert word_tail_residual(coupled, y, 6) <= 1e-11


def test_fixed_critical_points_absorb_all_words():
    # f(0) = 0 for the three maps: every word collapses onto 0- or 0+
    for name in ("example3-q", "example3-f", "example3-g"):
        part = preimage_set(fixture(name), 0.2, 5)
        assert [p.label for p in part.points] == ["-1", "0-", "0+", "1"]


def test_dedupe_keeps_shortest_word(tent2):
    from kneadlab.equivalence import LabeledPreimage, _dedupe
    from kneadlab.model import SignedCoordinate
    pts = [LabeledPreimage("+-", SignedCoordinate(0.25), 0.0),
           LabeledPreimage("-", SignedCoordinate(0.25 + 1e-13), 0.0),
           LabeledPreimage("--", SignedCoordinate(0.25 - 1e-13), 0.0),
           LabeledPreimage("+", SignedCoordinate(0.5), 0.0)]
    out = _dedupe(pts, 10 * tent2.root_tol)
    assert [p.label for p in out] == ["-", "+"]


def test_build_hn_tent_vs_quadratic(tent2, quad2):
    t = build_Hn(tent2, quad2, 0.3, 2)
    pairs = {lab: (xf.value, xg.value) for lab, xf, xg in t.pairs}
    assert pairs["-"] == pytest.approx((-0.5, -S), abs=1e-9)
    assert pairs["+"] == pytest.approx((0.5, S), abs=1e-9)
    assert t.psi_y == 0.3


@pytest.mark.parametrize("name", ["tent2", "coupled", "example3-g"])
def test_build_hn_identity(name):
    m = fixture(name)
    for n in range(1, 9):
        for lab, xf, xg in build_Hn(m, m, 0.41, n).pairs:
            assert xf == xg


def test_build_hn_rejects_inequivalent(tent2, quad12):
    with pytest.raises(CombinatorialInequivalenceError) as exc:
        build_Hn(tent2, quad12, 0.3, 3)
    assert exc.value.label == "-+"


def test_monotone_pairing(tent2, quad2):
    for n in range(1, 8):
        t = build_Hn(tent2, quad2, 0.55, n)
        f_order = sorted(range(len(t.pairs)), key=lambda i: t.pairs[i][1].sort_key())
        g_order = sorted(range(len(t.pairs)), key=lambda i: t.pairs[i][2].sort_key())
        assert f_order == g_order


def test_pl_conjugacy_nodes_and_midpoint(tent2, quad2):
    assert pl_conjugacy(tent2, quad2, 0.3, 2, 0.25) == pytest.approx(S / 2, abs=1e-12)
    t = build_Hn(tent2, quad2, 0.3, 5)
    h = PLConjugacy(t)
    for _, xf, xg in t.pairs:
        assert h(xf) == xg.value
    assert h(-1.0) == -1.0 and h(1.0) == 1.0


def test_pl_conjugacy_self_is_identity(coupled):
    h = PLConjugacy(build_Hn(coupled, coupled, 0.2, 6))
    for x in np.linspace(-1, 1, 101):
        assert h(x) == pytest.approx(x, abs=1e-12)


def test_pl_conjugacy_matches_analytic_limit(tent2, quad2):
    # tent(2) and quadratic(2) are conjugate by sin(pi x / 2)
    h = PLConjugacy(build_Hn(tent2, quad2, 0.5, 10))
    xs = np.linspace(-1, 1, 201)
    err = max(abs(h(x) - math.sin(math.pi * x / 2)) for x in xs)
    assert err < 1e-4


def test_convergence_self_zero(coupled):
    assert convergence_estimate(coupled, coupled, 2, 5, _grid(17, 3)) <= 1e-12


def test_convergence_decays(tent2, quad2):
    g = _grid()
    assert convergence_estimate(tent2, quad2, 4, 8, g) > convergence_estimate(tent2, quad2, 8, 12, g)


def test_convergence_single_point(tent2, quad2):
    p = Point.of(0.3, 0.5)
    d = convergence_estimate(tent2, quad2, 2, 6, [p])
    assert d == pytest.approx(abs(pl_conjugacy(tent2, quad2, 0.5, 2, p.x)
                                  - pl_conjugacy(tent2, quad2, 0.5, 6, p.x)), abs=0)


def test_convergence_needs_order(tent2, quad2):
    with pytest.raises(ValueError):
        convergence_estimate(tent2, quad2, 4, 4, [Point.of(0.1, 0.1)])


def test_semiconjugacy_residual_decreases(tent2, quad2):
    g = _grid(centred=True)
    r = [semiconjugacy_residual(tent2, quad2, n, g) for n in (2, 4, 6, 8)]
    assert all(u > v for u, v in zip(r, r[1:]))


def test_semiconjugacy_residual_floor_on_dyadic_grid(tent2, quad2):
    # every point of the endpoint grid is a node of H~_n once n >= 6
    g = _grid()
    assert semiconjugacy_residual(tent2, quad2, 6, g) < 1e-12


def test_trace_curve_constant_for_tent(tent2):
    c = trace_curve(tent2, "-", np.linspace(0, 1, 11))
    assert all(x.value == -0.5 and not fb for _, x, fb in c.samples)


def test_trace_curve_coupled_matches_bisection(coupled):
    c = trace_curve(coupled, "+", [0.0, 0.5, 1.0])
    vals = []
    for w, x, fb in c.samples:
        cw = 1.5 + 0.4 * w
        assert x.value == pytest.approx(math.sqrt(1 - 1 / cw), abs=1e-12)
        vals.append(x.value)
    assert vals[0] < vals[1] < vals[2]


def test_trace_curve_agrees_with_preimage_set(coupled):
    ws = np.linspace(0, 1, 9)
    for word in ("+", "-+", "+-+", "--+-"):
        c = trace_curve(coupled, word, ws)
        for w, x, fb in c.samples:
            part = preimage_set(coupled, w, len(word) + 1)
            try:
                p = part.by_label(word)
            except KeyError:
                assert fb or any(q.x == x for q in part.labeled)
                continue
            assert abs(p.x.value - x.value) <= 10 * coupled.root_tol


def test_trace_curve_flags_fallback(quad12):
    # quad1.2 has f(0) = 0.2 < 1/sqrt(1.2)... the chain "+-" needs x(K+ y)_- in Im f_+
    c = trace_curve(quad12, "-+", [0.0])
    assert c.samples[0][2] or c.samples[0][1].value != 0.0


def test_trace_curve_rejects_empty(tent2):
    with pytest.raises(ValueError):
        trace_curve(tent2, "", [0.0])


def test_equicontinuity_y_independent(tent2):
    assert all(m == 0.0 for _, m in equicontinuity_modulus(tent2, 5, [0.0, 0.1, 1.0],
                                                           np.linspace(0, 1, 5)))


def test_equicontinuity_coupled(coupled):
    table = equicontinuity_modulus(coupled, 5, [0.0, 0.125, 0.25, 0.5, 1.0], np.linspace(0, 1, 9))
    mods = [m for _, m in table]
    assert mods[0] == 0.0
    assert all(m > 0 for m in mods[1:])
    assert all(u <= v for u, v in zip(mods, mods[1:]))


def test_hausdorff():
    assert hausdorff_1d([0.0, 1.0], [0.0, 1.0]) == 0.0
    assert hausdorff_1d([0.0, 1.0], [0.0, 0.5, 1.0]) == 0.5
    assert hausdorff_1d([0.2], [0.0, 1.0]) == pytest.approx(0.8)
    assert hausdorff_1d([0.0, 1.0], [0.2, 0.9]) == pytest.approx(0.2)


def test_density_tent_halves(tent2):
    gaps = [g for _, g in density_report(tent2, 0.3, range(1, 11))]
    assert gaps[0] == 1.0
    for u, v in zip(gaps, gaps[1:]):
        assert v == pytest.approx(u / 2, rel=1e-9)


def test_density_neutral_map_runs():
    gaps = density_report(fixture("example3-f"), 0.3, [1, 4, 8])
    assert [n for n, _ in gaps] == [1, 4, 8]
