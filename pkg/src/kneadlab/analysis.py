"""Derivatives of F^m, Schwarzian machinery, periodic orbits and basins."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ._backend import kernels
from ._pykernels import CONVERGED, EXHAUSTED
from .model import (
    Branch,
    CheckResult,
    Point,
    SignedCoordinate,
    ToyModel,
    UnimodalFamily,
    eval_orbit,
    eval_step,
    parse_word,
    word_str,
)

NEUTRAL_BAND = 1e-9
TURNING_EXCLUSION = 1e-6
ROOT_GRID = 256
PROBES_PER_ROUND = 64


class PreconditionError(ValueError):
    """An operation was called outside its hypotheses."""


# ---------------------------------------------------------------------------
# derivative cocycle


@dataclass(frozen=True)
class CocycleEntries:
    """The upper-triangular Jacobian [[A, B], [0, D]] of F^m at a point."""

    A: float
    B: float
    D: float
    m: int
    critical_hit: bool = False

    def matrix(self) -> np.ndarray:
        return np.array([[self.A, self.B], [0.0, self.D]])


def cocycle(model: ToyModel, p: Point, m: int) -> CocycleEntries:
    """A^m, B^m, D^m along the orbit of ``p``.

    If the orbit meets the critical line in its first m points, the fiber
    derivative there is taken as 0 and ``critical_hit`` is set.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    fam, spec = model.family, model.cantor
    points, branches = eval_orbit(model, p, m)
    A, B, D = 1.0, 0.0, 1.0
    hit = False
    for q, j in zip(points[:m], branches):
        if q.x.is_critical:
            hit = True
            fx = 0.0
        else:
            fx = fam.deriv_x(q.y, q.x.value)
        fy = fam.deriv_y(q.y, q.x.value)
        ky = spec.inverse_deriv(j)
        A, B, D = fx * A, fx * B + fy * D, ky * D
    if hit:
        A = 0.0
    return CocycleEntries(A, B, D, m, hit)


def _iterate(model: ToyModel, x: float, y: float, m: int):
    kind, p0, p1, a, b = model.kernel_args
    tag = 0
    word = []
    for _ in range(m):
        x, tag, y, j = kernels.step(kind, p0, p1, a, b, x, tag, y, model.zero_epsilon)
        word.append(j)
        if tag:
            word.append(0)  # critical hits always break the cell
    return x, y, tuple(word)


@dataclass(frozen=True)
class JacobianFD:
    matrix: np.ndarray = field(compare=False)
    branch_violation: bool


def jacobian_fd(model: ToyModel, p: Point, m: int, h: float = 1e-6) -> JacobianFD:
    """Central differences of F^m in x and y.

    ``branch_violation`` is set when a perturbed orbit leaves the branch
    cell of the unperturbed one (or any of them meets the critical line).
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return JacobianFD(np.eye(2), False)
    x0, y0 = p.x.value, p.y
    _, _, ref = _iterate(model, x0, y0, m)
    violation = 0 in ref
    J = np.zeros((2, 2))
    for col, (dx, dy) in enumerate(((h, 0.0), (0.0, h))):
        xp, yp, wp = _iterate(model, x0 + dx, y0 + dy, m)
        xm, ym, wm = _iterate(model, x0 - dx, y0 - dy, m)
        violation = violation or wp != ref or wm != ref
        J[0, col] = (xp - xm) / (2 * h)
        J[1, col] = (yp - ym) / (2 * h)
    return JacobianFD(J, violation)


# ---------------------------------------------------------------------------
# Schwarzian derivative


def schwarzian(family: UnimodalFamily, y: float, x: float) -> float:
    """Sf = f'''/f' - 3/2 (f''/f')^2, with -inf where f' vanishes (and at 0)."""
    x = float(x)
    if x == 0.0:
        return -math.inf
    d1 = family.deriv_x(y, x)
    if d1 == 0.0:
        return -math.inf
    d2 = family.deriv_x2(y, x)
    d3 = family.deriv_x3(y, x)
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def _schwarzian_from(d1, d2, d3):
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def fiber_chain(model: ToyModel, word, y: float) -> list[float]:
    """Fibers y, K_{j1}(y), K_{j2}K_{j1}(y), ... visited along ``word``."""
    ys = [float(y)]
    for j in parse_word(word)[:-1]:
        ys.append(model.K(j, ys[-1]))
    return ys


def schwarzian_composition_check(family: UnimodalFamily, y_chain: Sequence[float],
                                 x_grid: Sequence[float]) -> float:
    """Largest gap between S(g o h) and Sg(h) h'^2 + Sh along a fiber chain.

    ``h`` runs over the partial compositions f(y_k) o ... o f(y_0). The left
    side uses the chain-rule derivatives of the composition. Grid points
    whose partial orbit comes within 1e-6 of the turning point are skipped.
    """
    worst = 0.0
    for x in x_grid:
        x = float(x)
        if abs(x) < TURNING_EXCLUSION:
            continue
        y0 = y_chain[0]
        d1, d2, d3 = (family.deriv_x(y0, x), family.deriv_x2(y0, x), family.deriv_x3(y0, x))
        u = family.eval(y0, x)
        for y in y_chain[1:]:
            if abs(u) < TURNING_EXCLUSION:
                break
            g1, g2, g3 = family.deriv_x(y, u), family.deriv_x2(y, u), family.deriv_x3(y, u)
            rhs = schwarzian(family, y, u) * d1 * d1 + _schwarzian_from(d1, d2, d3)
            d1, d2, d3 = (g1 * d1,
                          g2 * d1 * d1 + g1 * d2,
                          g3 * d1 ** 3 + 3.0 * g2 * d1 * d2 + g1 * d3)
            lhs = _schwarzian_from(d1, d2, d3)
            worst = max(worst, abs(lhs - rhs))
            u = family.eval(y, u)
    return worst


def negative_schwarzian_gate(family: UnimodalFamily, y_grid: Sequence[float] = (0.0, 0.5, 1.0),
                             points: int = 65) -> CheckResult:
    """Sf < 0 on a uniform grid of [-1, 1] minus the turning point."""
    xs = [x for x in np.linspace(-1.0, 1.0, points) if abs(x) >= TURNING_EXCLUSION]
    worst = -math.inf
    where = (math.nan, math.nan)
    for y in y_grid:
        for x in xs:
            s = schwarzian(family, y, x)
            if not s < worst:
                worst, where = s, (float(y), float(x))
    passed = worst < 0.0
    detail = "max Sf = %.6g at (y, x) = (%.6g, %.6g)" % (worst, where[0], where[1])
    return CheckResult("negative_schwarzian", passed, worst, detail)


# ---------------------------------------------------------------------------
# Minimum Principle


def _chain_derivative(family: UnimodalFamily, ys: Sequence[float], x: float) -> float:
    d = 1.0
    for y in ys:
        d *= family.deriv_x(y, x)
        x = family.eval(y, x)
    return d


@dataclass(frozen=True)
class MinimumPrincipleVerdict:
    holds: bool
    endpoint_min: float
    interior_min: float
    worst_x: float


def minimum_principle_check(model: ToyModel, word, y: float, interval: tuple[float, float],
                            grid: Union[int, Sequence[float]] = 65) -> MinimumPrincipleVerdict:
    """Test |Dg(x)| > min(|Dg(a)|, |Dg(b)|) inside [a, b] for g = g_word on fiber y.

    Raises PreconditionError when Dg vanishes, is undefined or changes sign
    on the grid.
    """
    a, b = map(float, interval)
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    if isinstance(grid, int):
        xs = np.linspace(a, b, max(grid, 3))
    else:
        xs = np.array(sorted({a, b, *(float(v) for v in grid if a <= v <= b)}))
    ys = fiber_chain(model, word, y)
    ds = np.array([_chain_derivative(model.family, ys, x) for x in xs])
    if not np.all(np.isfinite(ds)) or np.any(ds == 0.0):
        raise PreconditionError("Dg vanishes or is undefined on [%r, %r]" % (a, b))
    if np.any(np.sign(ds) != np.sign(ds[0])):
        raise PreconditionError("Dg changes sign on [%r, %r]" % (a, b))
    mag = np.abs(ds)
    ends = min(mag[0], mag[-1])
    inner = mag[1:-1]
    k = int(np.argmin(inner))
    return MinimumPrincipleVerdict(bool(np.all(inner > ends)), float(ends), float(inner[k]),
                                   float(xs[1 + k]))


# ---------------------------------------------------------------------------
# periodic orbits


class Stability(enum.Enum):
    strongly_attracting = "strongly_attracting"
    repelling = "repelling"
    neutral = "neutral"
    on_critical_line = "on_critical_line"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PeriodicOrbitRecord:
    word: str
    y_star: float
    x_star: SignedCoordinate
    multiplier_A: float
    multiplier_D: float
    classification: Stability
    orbit: tuple[Point, ...] = field(default=(), compare=False, repr=False)

    @property
    def period(self) -> int:
        return len(self.word)


def _rotations(word: str):
    return [word[i:] + word[:i] for i in range(len(word))]


def canonical_word(word) -> str:
    """Least rotation, with '-' before '+'."""
    w = word_str(parse_word(word))
    return min(_rotations(w), key=lambda s: s.replace("-", "0").replace("+", "1"))


def _is_primitive(word: str) -> bool:
    m = len(word)
    return not any(m % d == 0 and word == word[:d] * (m // d) for d in range(1, m))


def canonical_words(m_max: int) -> list[str]:
    out = []
    for m in range(1, m_max + 1):
        for letters in itertools.product("-+", repeat=m):
            w = "".join(letters)
            if w == canonical_word(w) and _is_primitive(w):
                out.append(w)
    return out


def base_fixed_point(model: ToyModel, word) -> float:
    """Fixed point of K_{jm} o ... o K_{j1} (the composition is affine)."""
    letters = parse_word(word)

    def comp(t):
        for j in letters:
            t = model.K(j, t)
        return t

    beta = comp(0.0)
    alpha = comp(1.0) - beta
    return beta / (1.0 - alpha)


def _fiber_return(family, ys, x):
    for y in ys:
        x = family.eval(y, x)
    return x


def _classify(points, A, eps):
    if any(abs(q.x.value) <= eps for q in points):
        return Stability.on_critical_line
    mag = abs(A)
    if abs(mag - 1.0) <= NEUTRAL_BAND:
        return Stability.neutral
    return Stability.strongly_attracting if mag < 1.0 else Stability.repelling


def periodic_orbits_for_word(model: ToyModel, word) -> list[PeriodicOrbitRecord]:
    """Periodic orbits following ``word`` (given up to rotation)."""
    w = canonical_word(word)
    letters = parse_word(w)
    m = len(letters)
    fam = model.family
    y_star = base_fixed_point(model, letters)
    ys = fiber_chain(model, letters, y_star)
    j1 = letters[0]
    lo, hi = (0.0, 1.0) if j1 is Branch.PLUS else (-1.0, 0.0)
    grid = np.linspace(lo, hi, ROOT_GRID + 1)
    h = [_fiber_return(fam, ys, x) - x for x in grid]
    roots = []
    for i, x in enumerate(grid):
        if h[i] == 0.0:
            roots.append(float(x))
        if i + 1 < len(grid) and h[i] * h[i + 1] < 0.0:
            a, b, ha = float(x), float(grid[i + 1]), h[i]
            for _ in range(200):
                if b - a <= model.root_tol:
                    break
                mid = 0.5 * (a + b)
                hm = _fiber_return(fam, ys, mid) - mid
                if hm == 0.0:
                    a = b = mid
                    break
                if (hm < 0.0) == (ha < 0.0):
                    a, ha = mid, hm
                else:
                    b = mid
            roots.append(0.5 * (a + b))
    records = []
    last = None
    for r in roots:
        if last is not None and abs(r - last) <= 10 * model.root_tol:
            continue
        last = r
        start = Point(SignedCoordinate.of(r, j1), y_star)
        points, branches = eval_orbit(model, start, m)
        if branches != letters:
            continue
        A = 1.0
        for q in points[:m]:
            A *= fam.deriv_x(q.y, q.x.value, q.x.branch)
        D = 1.0
        for j in letters:
            D *= model.cantor.inverse_deriv(j)
        records.append(PeriodicOrbitRecord(w, y_star, start.x, A, D,
                                           _classify(points[:m], A, model.zero_epsilon),
                                           tuple(points[:m])))
    return records


def find_periodic_orbits(model: ToyModel, m_max: int) -> list[PeriodicOrbitRecord]:
    """Periodic orbits of minimal period <= m_max, one record per orbit."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    out = []
    for w in canonical_words(m_max):
        out.extend(periodic_orbits_for_word(model, w))
    return out


# ---------------------------------------------------------------------------
# basins


@dataclass(frozen=True)
class BasinComponent:
    y: float
    target: float
    interval: tuple[float, float]
    touches: frozenset[str]


@dataclass(frozen=True)
class BasinReport:
    orbit: PeriodicOrbitRecord
    fiber_interval: tuple[float, float]
    touches: frozenset[str]
    components: tuple[BasinComponent, ...]
    probes: int
    inconclusive: int
    negative_schwarzian: Optional[CheckResult] = None

    @property
    def singer_holds(self) -> bool:
        return bool(self.touches)


class _Prober:
    def __init__(self, model, ys, word, target, steps, conv_tol):
        self.args = model.kernel_args[:3]
        self.ys = list(ys)
        self.word = [int(j) for j in word]
        self.target = target
        self.steps = steps
        self.conv_tol = conv_tol
        self.eps = model.zero_epsilon
        self.count = 0
        self.exhausted = 0

    def __call__(self, x: float, side: int) -> bool:
        self.count += 1
        tag = side if x == 0.0 else 0
        status, _ = kernels.basin_probe(*self.args, self.ys, self.word, x, tag, self.target,
                                        self.steps, self.conv_tol, self.eps)
        if status == EXHAUSTED:
            self.exhausted += 1
        return status == CONVERGED


def _grow(probe, start: float, limit: float, side: int, eps: float) -> float:
    """Walk from ``start`` toward ``limit`` and return the last converging
    point before the first failure, to within ``eps``."""
    good, far = start, limit
    while True:
        base, span = good, far - good
        bad = None
        for i in range(1, PROBES_PER_ROUND + 1):
            x = far if i == PROBES_PER_ROUND else base + span * i / PROBES_PER_ROUND
            if probe(x, side):
                good = x
            else:
                bad = x
                break
        if bad is None:
            return good
        far = bad
        if abs(far - good) <= 0.5 * eps:
            return good


def _touches(lo: float, hi: float, eps: float) -> frozenset[str]:
    out = set()
    if min(abs(lo), abs(hi)) <= eps:
        out.add("critical_line")
    if max(abs(lo), abs(hi)) >= 1.0 - eps:
        out.add("boundary")
    return frozenset(out)


def singer_check(model: ToyModel, orbit: PeriodicOrbitRecord, expansion_steps: int = 10000,
                 conv_tol: float = 1e-9) -> BasinReport:
    """Estimate the immediate basin of an attracting orbit on each of its fibers.

    Each component is grown outward from the orbit point by probing with the
    fiber return map; its closure is then tested for x = 0 and x = +-1.
    """
    if orbit.classification is not Stability.strongly_attracting:
        raise PreconditionError("singer_check needs a strongly attracting orbit off the "
                                "critical line (got %s)" % orbit.classification)
    letters = [int(j) for j in parse_word(orbit.word)]
    m = len(letters)
    points = orbit.orbit or tuple(eval_orbit(model, Point(orbit.x_star, orbit.y_star), m)[0][:m])
    eps = model.zero_epsilon
    comps = []
    probes = exhausted = 0
    for k in range(m):
        word_k = letters[k:] + letters[:k]
        ys_k = [q.y for q in points[k:]] + [q.y for q in points[:k]]
        xk = points[k].x.value
        prober = _Prober(model, ys_k, word_k, xk, expansion_steps, conv_tol)
        side = word_k[0]
        lo_lim, hi_lim = (0.0, 1.0) if side > 0 else (-1.0, 0.0)
        lo = _grow(prober, xk, lo_lim, side, eps)
        hi = _grow(prober, xk, hi_lim, side, eps)
        probes += prober.count
        exhausted += prober.exhausted
        comps.append(BasinComponent(points[k].y, xk, (lo, hi), _touches(lo, hi, eps)))
    touches = frozenset().union(*(c.touches for c in comps))
    gate = negative_schwarzian_gate(model.family)
    return BasinReport(orbit, comps[0].interval, touches, tuple(comps), probes, exhausted, gate)
