"""Toy models: unimodal fiber families over an expanding Cantor base.

A toy model acts on ``([-1, 0-] U [0+, 1]) x [0, 1]`` by

    F(x, y) = (f(y)(x), K_j(y)),   j = sign of x (or the zero tag),

where ``K_+`` and ``K_-`` are the inverse branches of an affine Cantor map
``k``. The turning point 0 is split into two points ``0-`` and ``0+`` so
that ``F`` is defined on a compact set.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Optional

import numpy as np

from ._backend import kernels
from ._pykernels import EX3_F, EX3_G, EX3_Q, FALLBACK, QUADRATIC, TENT

DEFAULT_ZERO_EPSILON = 1e-12
DEFAULT_ROOT_TOL = 1e-13


class Branch(enum.IntEnum):
    MINUS = -1
    PLUS = 1

    @property
    def symbol(self) -> str:
        return "-" if self is Branch.MINUS else "+"

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, Branch):
            return value
        if value in ("-", "minus", -1):
            return cls.MINUS
        if value in ("+", "plus", 1):
            return cls.PLUS
        raise ValueError("not a branch: %r" % (value,))


def parse_word(word) -> tuple[Branch, ...]:
    """Turn ``"-+-"`` (or an iterable of branches) into a tuple of Branch."""
    return tuple(Branch.parse(c) for c in word)


def word_str(word) -> str:
    return "".join(Branch.parse(c).symbol for c in word)


def word_key(word: str):
    """Shorter first, then lexicographic with '-' before '+'."""
    return (len(word), tuple(0 if c == "-" else 1 for c in word))


@total_ordering
@dataclass(frozen=True)
class SignedCoordinate:
    """A real x in [-1, 1]; x = 0 must carry a zero tag (0- or 0+)."""

    value: float
    zero_sign: Optional[Branch] = None

    def __post_init__(self):
        value = float(self.value)
        object.__setattr__(self, "value", value)
        if self.zero_sign is not None:
            object.__setattr__(self, "zero_sign", Branch.parse(self.zero_sign))
        if (value == 0.0) != (self.zero_sign is not None):
            raise ValueError("zero_sign is required exactly when value == 0 (got %r, %r)"
                             % (value, self.zero_sign))

    @classmethod
    def of(cls, value: float, side=None) -> "SignedCoordinate":
        """Build a coordinate, tagging an exact zero with ``side``."""
        value = float(value)
        if value == 0.0:
            if side is None:
                raise ValueError("an exact zero needs a side")
            return cls(0.0, Branch.parse(side))
        return cls(value)

    @property
    def tag(self) -> int:
        return 0 if self.zero_sign is None else int(self.zero_sign)

    @property
    def branch(self) -> Branch:
        """The branch of F that applies at this coordinate."""
        if self.zero_sign is not None:
            return self.zero_sign
        return Branch.PLUS if self.value > 0 else Branch.MINUS

    @property
    def is_critical(self) -> bool:
        return self.zero_sign is not None

    def sort_key(self):
        return (self.value, self.tag)

    def __lt__(self, other):
        if not isinstance(other, SignedCoordinate):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __float__(self):
        return self.value

    def __str__(self):
        if self.zero_sign is not None:
            return "0" + self.zero_sign.symbol
        return "%.17g" % self.value


ZERO_MINUS = SignedCoordinate(0.0, Branch.MINUS)
ZERO_PLUS = SignedCoordinate(0.0, Branch.PLUS)


def _from_kernel(value: float, tag: int) -> SignedCoordinate:
    if value == 0.0:
        return SignedCoordinate(0.0, Branch(tag))
    return SignedCoordinate(value)


@dataclass(frozen=True)
class Point:
    x: SignedCoordinate
    y: float

    @classmethod
    def of(cls, x, y: float, side=None) -> "Point":
        if not isinstance(x, SignedCoordinate):
            x = SignedCoordinate.of(x, side)
        return cls(x, float(y))

    @property
    def on_critical_line(self) -> bool:
        return self.x.is_critical

    def __str__(self):
        return "(%s, %.17g)" % (self.x, self.y)


# ---------------------------------------------------------------------------
# families

FAMILY_KINDS = {
    "tent": TENT,
    "quadratic": QUADRATIC,
    "example3-q": EX3_Q,
    "example3-f": EX3_F,
    "example3-g": EX3_G,
}


@dataclass(frozen=True)
class UnimodalFamily:
    """A built-in unimodal family f(y) on [-1, 1] with turning point 0.

    ``tent`` is ``(s - 1) - s|x|`` and ``quadratic`` is ``c(1 - x^2) - 1``,
    with ``s`` or ``c`` equal to ``p0 + p1 * y``. The three ``example3``
    kinds are ``-x^2``, ``-|x|`` and ``-sqrt|x|`` and ignore the parameters.
    """

    kind: str
    p0: float = 0.0
    p1: float = 0.0

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError("unknown family kind %r" % (self.kind,))
        object.__setattr__(self, "p0", float(self.p0))
        object.__setattr__(self, "p1", float(self.p1))

    @property
    def code(self) -> int:
        return FAMILY_KINDS[self.kind]

    @property
    def y_dependent(self) -> bool:
        return self.kind in ("tent", "quadratic") and self.p1 != 0.0

    def param(self, y: float) -> float:
        return self.p0 + self.p1 * y

    def eval(self, y: float, x: float) -> float:
        return kernels.f_eval(self.code, self.p0, self.p1, y, float(x))

    def turning_value(self, y: float) -> float:
        return self.eval(y, 0.0)

    def deriv_x(self, y: float, x: float, side=None) -> float:
        """First x-derivative; at x = 0 ``side`` selects a one-sided value.

        Without a side, the turning point of a non-smooth family has no
        derivative and ``nan`` is returned.
        """
        x = float(x)
        kind = self.kind
        if x == 0.0:
            if kind in ("quadratic", "example3-q"):
                return 0.0
            if side is None:
                return math.nan
            sgn = int(Branch.parse(side))
            if kind == "tent":
                return -sgn * self.param(y)
            if kind == "example3-f":
                return -float(sgn)
            return -sgn * math.inf
        if kind == "tent":
            return -math.copysign(self.param(y), x)
        if kind == "quadratic":
            return -2.0 * self.param(y) * x
        if kind == "example3-q":
            return -2.0 * x
        if kind == "example3-f":
            return -math.copysign(1.0, x)
        return -math.copysign(0.5, x) / math.sqrt(abs(x))

    def deriv_x2(self, y: float, x: float) -> float:
        kind = self.kind
        if kind in ("tent", "example3-f"):
            return 0.0
        if kind == "quadratic":
            return -2.0 * self.param(y)
        if kind == "example3-q":
            return -2.0
        ax = abs(float(x))
        return 0.25 * ax ** -1.5 if ax > 0 else math.inf

    def deriv_x3(self, y: float, x: float) -> float:
        if self.kind != "example3-g":
            return 0.0
        x = float(x)
        if x == 0.0:
            return math.nan
        return -math.copysign(0.375, x) * abs(x) ** -2.5

    def deriv_y(self, y: float, x: float) -> float:
        x = abs(float(x))
        if self.kind == "tent":
            return self.p1 * (1.0 - x)
        if self.kind == "quadratic":
            return self.p1 * (1.0 - x * x)
        return 0.0

    def descriptor(self) -> dict:
        if self.kind == "tent":
            return {"family": "tent", "s0": self.p0, "s1": self.p1}
        if self.kind == "quadratic":
            return {"family": "quadratic", "c0": self.p0, "c1": self.p1}
        return {"family": self.kind}


def tent(s0: float = 2.0, s1: float = 0.0) -> UnimodalFamily:
    return UnimodalFamily("tent", s0, s1)


def quadratic(c0: float = 2.0, c1: float = 0.0) -> UnimodalFamily:
    return UnimodalFamily("quadratic", c0, c1)


def example3(which: str) -> UnimodalFamily:
    return UnimodalFamily("example3-" + which)


@dataclass(frozen=True)
class CantorMapSpec:
    """Affine Cantor map: k(y) = y/a on [0, a], k(y) = (1 - y)/(1 - b) on [b, 1]."""

    a: float = 1.0 / 3.0
    b: float = 2.0 / 3.0

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    def k(self, y: float) -> float:
        if y <= self.a:
            return y / self.a
        if y >= self.b:
            return (1.0 - y) / (1.0 - self.b)
        raise ValueError("%r lies in the gap (%r, %r)" % (y, self.a, self.b))

    def k_branch(self, j, y: float) -> float:
        """Forward branch k_j, extended affinely beyond its domain."""
        if Branch.parse(j) is Branch.PLUS:
            return y / self.a
        return (1.0 - y) / (1.0 - self.b)

    def k_deriv(self, j) -> float:
        if Branch.parse(j) is Branch.PLUS:
            return 1.0 / self.a
        return -1.0 / (1.0 - self.b)

    def inverse(self, j, y: float) -> float:
        """K_j(y)."""
        return kernels.cantor_branch(self.a, self.b, int(Branch.parse(j)), float(y))

    def inverse_deriv(self, j) -> float:
        if Branch.parse(j) is Branch.PLUS:
            return self.a
        return -(1.0 - self.b)

    @property
    def expansion_bound(self) -> float:
        return min(1.0 / self.a, 1.0 / (1.0 - self.b))

    def descriptor(self) -> dict:
        return {"cantor": "affine", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class ToyModel:
    family: UnimodalFamily
    cantor: CantorMapSpec = field(default_factory=CantorMapSpec)
    zero_epsilon: float = DEFAULT_ZERO_EPSILON
    root_tol: float = DEFAULT_ROOT_TOL
    name: Optional[str] = field(default=None, compare=False)

    @property
    def kernel_args(self):
        f, c = self.family, self.cantor
        return f.code, f.p0, f.p1, c.a, c.b

    def f(self, y: float, x: float) -> float:
        return self.family.eval(y, x)

    def K(self, j, y: float) -> float:
        return self.cantor.inverse(j, y)

    def descriptor(self) -> dict:
        d = dict(self.family.descriptor())
        d.update(self.cantor.descriptor())
        return d

    def __str__(self):
        return self.name or str(self.descriptor())


# ---------------------------------------------------------------------------
# operations


def eval_step(model: ToyModel, p: Point) -> Point:
    kind, p0, p1, a, b = model.kernel_args
    xn, tag, yn, _ = kernels.step(kind, p0, p1, a, b, p.x.value, p.x.tag, p.y,
                                  model.zero_epsilon)
    return Point(_from_kernel(xn, tag), yn)


def eval_orbit(model: ToyModel, p: Point, n: int) -> tuple[list[Point], tuple[Branch, ...]]:
    """The first ``n`` iterates of ``p`` and the branch word that was applied."""
    if n < 0:
        raise ValueError("n must be >= 0")
    kind, p0, p1, a, b = model.kernel_args
    xs, tags, ys, branches = kernels.orbit(kind, p0, p1, a, b, p.x.value, p.x.tag,
                                           p.y, n, model.zero_epsilon)
    points = [Point(_from_kernel(x, t), y) for x, t, y in zip(xs, tags, ys)]
    points[0] = p
    return points, tuple(Branch(j) for j in branches)


def branch_inverse_status(model: ToyModel, j, x, y: float) -> tuple[SignedCoordinate, bool]:
    """Like :func:`branch_inverse` but also reports whether the fallback fired."""
    j = Branch.parse(j)
    if isinstance(x, SignedCoordinate):
        value, tag = x.value, x.tag
    else:
        value, tag = float(x), 0
    kind, p0, p1, _, _ = model.kernel_args
    out, status = kernels.branch_inverse(kind, p0, p1, int(j), value, tag, float(y),
                                         model.root_tol)
    if status == FALLBACK or out == 0.0:
        return SignedCoordinate(0.0, j), status == FALLBACK
    return SignedCoordinate(out), False


def branch_inverse(model: ToyModel, j, x, y: float) -> SignedCoordinate:
    """The branch inverse xi_j(x, y), falling back to 0^j outside Im f_j(y).

    ``x`` may be a plain float or a SignedCoordinate; a tagged zero is only
    in the image of the branch with the same tag.
    """
    return branch_inverse_status(model, j, x, y)[0]


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult]
    gamma: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_model(model: ToyModel, grid_density: int = 64) -> ValidationReport:
    """Check the standing hypotheses of a toy model on a grid.

    Failures are report entries, never exceptions.
    """
    if grid_density < 16:
        raise ValueError("grid_density must be >= 16")
    fam, can = model.family, model.cantor
    ys = np.linspace(0.0, 1.0, grid_density)
    xs = np.linspace(-1.0, 1.0, 2 * grid_density + 1)
    vals = np.array([[fam.eval(y, x) for x in xs] for y in ys])
    checks = []

    endpoint_res = max(max(abs(fam.eval(y, -1.0) + 1.0), abs(fam.eval(y, 1.0) + 1.0))
                       for y in ys)
    checks.append(CheckResult("family_endpoints", endpoint_res <= 1e-12, endpoint_res))

    excess = float(max(vals.max() - 1.0, -1.0 - vals.min(), 0.0))
    checks.append(CheckResult("family_range", excess <= 1e-12, excess))

    mid = grid_density  # index of x = 0
    left = np.diff(vals[:, : mid + 1], axis=1)
    right = np.diff(vals[:, mid:], axis=1)
    worst = float(max(-left.min(), right.max()))
    checks.append(CheckResult("family_unimodal", worst < 0.0, worst,
                              "worst finite difference against the expected sign"))

    dy = ys[1] - ys[0]
    lip = float(np.abs(np.diff(vals, axis=0)).max() / dy)
    checks.append(CheckResult("family_continuous_in_y", math.isfinite(lip), lip,
                              "grid Lipschitz estimate in y"))

    order_ok = 0.0 < can.a < can.b < 1.0
    checks.append(CheckResult("cantor_order", order_ok, float(can.a - can.b)))

    bres = max(abs(can.k_branch(Branch.PLUS, 0.0)), abs(can.k_branch(Branch.MINUS, 1.0)),
               abs(can.k_branch(Branch.PLUS, can.a) - 1.0),
               abs(can.k_branch(Branch.MINUS, can.b) - 1.0))
    checks.append(CheckResult("cantor_boundary", bres <= 1e-12, bres))

    slopes = [abs(can.k_deriv(j)) for j in Branch]
    gamma = min(slopes)
    checks.append(CheckResult("cantor_expanding", gamma > 1.0, gamma,
                              "minimum |k'| (the expansion estimate)"))

    contraction = max(abs(can.inverse_deriv(j)) for j in Branch)
    checks.append(CheckResult("cantor_inverse_contracting",
                              contraction < 1.0 and contraction * gamma <= 1.0 + 1e-12,
                              contraction))
    return ValidationReport(checks, gamma)
