"""Preimages of the critical line and finite-depth combinatorial conjugacies.

On a fiber I(y), the point labeled by the branch word ``j1...jk`` is the
unique x with F^k(x, y) = (0^{jk}, y_{jk...j1}), each step using branch
``j_i``. The set C_n(y) collects these points for k <= n - 1 together with
the two critical points. H_n pairs equally labeled points of F on y and of
G on psi(y); H~_n interpolates linearly between them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels
from .cantor import base_conjugacy
from .model import (
    Branch,
    Point,
    SignedCoordinate,
    ToyModel,
    ZERO_MINUS,
    ZERO_PLUS,
    _from_kernel,
    branch_inverse_status,
    eval_step,
    parse_word,
    word_key,
    word_str,
)
from .symbolic import kneading

CRITICAL_LABELS = {Branch.MINUS: "0-", Branch.PLUS: "0+"}
BOUNDARY_LABELS = ("-1", "1")


class CombinatorialInequivalenceError(Exception):
    """The two models are not combinatorially equivalent at this depth."""

    def __init__(self, message: str, label: str):
        super().__init__(message)
        self.label = label


@dataclass(frozen=True)
class LabeledPreimage:
    label: str
    x: SignedCoordinate
    y: float
    kind: str = "preimage"  # "preimage" | "critical" | "boundary"

    @property
    def word(self) -> str:
        return self.label if self.kind == "preimage" else ""


@dataclass(frozen=True)
class FiberPartition:
    y: float
    n: int
    points: tuple[LabeledPreimage, ...]

    @property
    def labeled(self) -> tuple[LabeledPreimage, ...]:
        """Points of C_n(y), without the boundary markers."""
        return tuple(p for p in self.points if p.kind != "boundary")

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(p.label for p in self.labeled)

    def by_label(self, label: str) -> LabeledPreimage:
        for p in self.points:
            if p.label == label:
                return p
        raise KeyError(label)

    @property
    def intervals(self) -> list[tuple[LabeledPreimage, LabeledPreimage]]:
        """Consecutive pairs, skipping the empty step from 0- to 0+."""
        pts = self.points
        return [(u, v) for u, v in zip(pts, pts[1:])
                if not (u.label == "0-" and v.label == "0+")]

    def gaps(self) -> list[float]:
        return [v.x.value - u.x.value for u, v in self.intervals]


def _dedupe(points: list[LabeledPreimage], tol: float) -> list[LabeledPreimage]:
    points = sorted(points, key=lambda p: (p.x.sort_key(), word_key(p.word)))
    out: list[LabeledPreimage] = []
    for p in points:
        if out:
            q = out[-1]
            if q.x.tag == p.x.tag and abs(q.x.value - p.x.value) <= tol:
                if word_key(p.word) < word_key(q.word):
                    out[-1] = p
                continue
        out.append(p)
    return out


@lru_cache(maxsize=8192)
def _preimage_points(model: ToyModel, y: float, n: int) -> tuple[LabeledPreimage, ...]:
    kind, p0, p1, a, b = model.kernel_args
    raw = kernels.preimages(kind, p0, p1, a, b, y, n - 1, model.root_tol)
    pts = [LabeledPreimage("0-", ZERO_MINUS, y, "critical"),
           LabeledPreimage("0+", ZERO_PLUS, y, "critical")]
    for word, x, tag in raw:
        pts.append(LabeledPreimage(word_str(word), _from_kernel(x, tag), y))
    pts = _dedupe(pts, 10 * model.root_tol)
    return (LabeledPreimage("-1", SignedCoordinate(-1.0), y, "boundary"),
            *pts,
            LabeledPreimage("1", SignedCoordinate(1.0), y, "boundary"))


def preimage_set(model: ToyModel, y: float, n: int) -> FiberPartition:
    """The labeled set C_n(y) and the partition it induces on I(y)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return FiberPartition(float(y), n, _preimage_points(model, float(y), n))


@dataclass(frozen=True)
class ConjugacyTable:
    y: float
    n: int
    psi_y: float
    pairs: tuple[tuple[str, SignedCoordinate, SignedCoordinate], ...]


def build_Hn(F: ToyModel, G: ToyModel, y: float, n: int, psi_depth: int = 40) -> ConjugacyTable:
    """Pair C_n^F(y) with C_n^G(psi(y)) label by label.

    Raises CombinatorialInequivalenceError when the label sets differ, the
    kneading prefixes on the fiber differ, or the pairing is not increasing.
    """
    gy = base_conjugacy(F, G, y, psi_depth)
    pf = preimage_set(F, y, n)
    pg = preimage_set(G, gy, n)
    diff = pf.labels ^ pg.labels
    if diff:
        label = min(diff, key=word_key)
        owner = "F" if label in pf.labels else "G"
        raise CombinatorialInequivalenceError(
            "label sets differ at y=%r, n=%d: %r only in %s" % (y, n, label, owner), label)
    for side in (Branch.MINUS, Branch.PLUS):
        kf = kneading(F, y, side, n).symbols
        kg = kneading(G, gy, side, n).symbols
        if kf != kg:
            idx = next(i for i, (u, v) in enumerate(zip(kf, kg)) if u is not v)
            raise CombinatorialInequivalenceError(
                "kneading of 0%s differs at index %d (y=%r)" % (side.symbol, idx, y),
                CRITICAL_LABELS[side])
    order_f = [p.label for p in pf.labeled]
    order_g = [p.label for p in pg.labeled]
    if order_f != order_g:
        label = next(u for u, v in zip(order_f, order_g) if u != v)
        raise CombinatorialInequivalenceError(
            "fiber order disagrees at label %r (y=%r, n=%d)" % (label, y, n), label)
    pairs = tuple((p.label, p.x, pg.by_label(p.label).x) for p in pf.labeled)
    return ConjugacyTable(float(y), n, gy, pairs)


class PLConjugacy:
    """The piecewise-linear map H~_n(y): I(y) -> I(psi(y))."""

    def __init__(self, table: ConjugacyTable):
        self.table = table
        left = [(-1.0, -1.0)]
        right = []
        for _, xf, xg in table.pairs:
            if xf.branch is Branch.MINUS:
                left.append((xf.value, xg.value))
            else:
                right.append((xf.value, xg.value))
        right.append((1.0, 1.0))
        self._left = np.array(left).T
        self._right = np.array(right).T

    def __call__(self, x) -> float:
        if not isinstance(x, SignedCoordinate):
            x = SignedCoordinate.of(x, Branch.PLUS)
        nodes = self._left if x.branch is Branch.MINUS else self._right
        return float(np.interp(x.value, nodes[0], nodes[1]))

    def point(self, x: SignedCoordinate) -> Point:
        v = self(x)
        return Point(SignedCoordinate.of(v, x.branch), self.table.psi_y)


def pl_conjugacy_map(F: ToyModel, G: ToyModel, y: float, n: int) -> PLConjugacy:
    return PLConjugacy(build_Hn(F, G, y, n))


def pl_conjugacy(F: ToyModel, G: ToyModel, y: float, n: int, x) -> float:
    return pl_conjugacy_map(F, G, y, n)(x)


def _as_point(p) -> Point:
    if isinstance(p, Point):
        return p
    x, y = p
    return Point.of(x, y, Branch.PLUS)


def convergence_estimate(F: ToyModel, G: ToyModel, n: int, m: int, xy_grid: Iterable) -> float:
    """sup over the grid of |H~_n - H~_m|."""
    if not m > n >= 1:
        raise ValueError("need m > n >= 1")
    worst = 0.0
    maps: dict = {}
    for p in map(_as_point, xy_grid):
        if p.y not in maps:
            maps[p.y] = (pl_conjugacy_map(F, G, p.y, n), pl_conjugacy_map(F, G, p.y, m))
        hn, hm = maps[p.y]
        worst = max(worst, abs(hn(p.x) - hm(p.x)))
    return worst


def semiconjugacy_residual(F: ToyModel, G: ToyModel, n: int, xy_grid: Iterable) -> float:
    """sup over the grid of |H~_n(F(p)) - G(H~_n(p))|."""
    worst = 0.0
    maps: dict = {}

    def h(y):
        if y not in maps:
            maps[y] = pl_conjugacy_map(F, G, y, n)
        return maps[y]

    for p in map(_as_point, xy_grid):
        fp = eval_step(F, p)
        left = h(fp.y)(fp.x)
        gh = eval_step(G, h(p.y).point(p.x))
        right = gh.x.value
        worst = max(worst, abs(left - right), abs(h(fp.y).table.psi_y - gh.y))
    return worst


@dataclass(frozen=True)
class PreimageCurve:
    word: str
    samples: tuple[tuple[float, SignedCoordinate, bool], ...]  # (w, x(w), fallback)


def _curve_value(model: ToyModel, word, w: float) -> tuple[SignedCoordinate, bool]:
    j = word[0]
    if len(word) == 1:
        target, inner_fb = SignedCoordinate(0.0, j), False
    else:
        target, inner_fb = _curve_value(model, word[1:], model.K(j, w))
    x, fb = branch_inverse_status(model, j, target, w)
    return x, fb or inner_fb


def trace_curve(model: ToyModel, word, w_grid: Sequence[float]) -> PreimageCurve:
    """Sample the continuous curve w -> x(w)_{word} (with xi fallbacks)."""
    letters = parse_word(word)
    if not letters:
        raise ValueError("word must be non-empty")
    samples = []
    for w in w_grid:
        x, fb = _curve_value(model, letters, float(w))
        samples.append((float(w), x, fb))
    return PreimageCurve(word_str(letters), tuple(samples))


def hausdorff_1d(u: np.ndarray, v: np.ndarray) -> float:
    u = np.sort(np.asarray(u, dtype=float))
    v = np.sort(np.asarray(v, dtype=float))

    def directed(p, q):
        idx = np.clip(np.searchsorted(q, p), 1, len(q) - 1) if len(q) > 1 else np.zeros(len(p), int)
        d = np.abs(p - q[idx])
        if len(q) > 1:
            d = np.minimum(d, np.abs(p - q[idx - 1]))
        return float(d.max()) if len(p) else 0.0

    return max(directed(u, v), directed(v, u))


def _x_values(model: ToyModel, y: float, n_max: int) -> list[np.ndarray]:
    """x-projections of C_n(y) for n = 1..n_max (from one depth-n_max pass)."""
    pts = preimage_set(model, y, n_max).labeled
    return [np.array([p.x.value for p in pts if len(p.word) <= n - 1]) for n in range(1, n_max + 1)]


def equicontinuity_modulus(model: ToyModel, n_max: int, delta_grid: Sequence[float],
                           y_grid: Sequence[float]) -> list[tuple[float, float]]:
    """For each delta, the largest Hausdorff distance between C_n(y1) and
    C_n(y2) over grid pairs with |y1 - y2| <= delta and n <= n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ys = [float(y) for y in y_grid]
    xs = {y: _x_values(model, y, n_max) for y in ys}
    pair_dist = []
    for i, y1 in enumerate(ys):
        for y2 in ys[i + 1:]:
            d = max(hausdorff_1d(a, b) for a, b in zip(xs[y1], xs[y2]))
            pair_dist.append((abs(y1 - y2), d))
    out = []
    for delta in delta_grid:
        m = max((d for dy, d in pair_dist if dy <= delta), default=0.0)
        out.append((float(delta), m))
    return out


def density_report(model: ToyModel, y: float, n_list: Sequence[int]) -> list[tuple[int, float]]:
    """Largest gap between consecutive points of C_n(y) in I(y), per n."""
    return [(int(n), max(preimage_set(model, y, n).gaps())) for n in n_list]


def word_tail_residual(model: ToyModel, y: float, n: int) -> float:
    """max |F(x(y)_{j1 w}) - x(K_{j1} y)_w| over labels of C_n(y) with |word| >= 2.

    Returns inf when a shifted label is missing on the image fiber.
    """
    worst = 0.0
    for p in preimage_set(model, y, n).labeled:
        if len(p.word) < 2:
            continue
        img = eval_step(model, Point(p.x, y))
        part = preimage_set(model, img.y, n)
        try:
            target = part.by_label(p.word[1:])
        except KeyError:
            return math.inf
        if img.x.tag != target.x.tag:
            return math.inf
        worst = max(worst, abs(img.x.value - target.x.value))
    return worst
