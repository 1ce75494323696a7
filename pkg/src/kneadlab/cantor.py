"""Binary coding of the base Cantor set and the base conjugacy psi.

Bit 0 is the branch [0, a] (inverse K+), bit 1 is the branch [b, 1]
(inverse K-). Both Cantor maps of a pair share the orientation pattern
(k+ increasing, k- decreasing), so matching codes gives an increasing map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .model import Branch, CantorMapSpec

# Cylinder membership and endpoint matching work at a few ulps.
MEMBER_TOL = 1e-15
ENDPOINT_TOL = 4.5e-16

BIT_BRANCH = {0: Branch.PLUS, 1: Branch.MINUS}
BRANCH_BIT = {Branch.PLUS: 0, Branch.MINUS: 1}


class PsiError(ValueError):
    """psi could not be evaluated at the requested point."""


@dataclass(frozen=True)
class CantorCode:
    word: tuple[int, ...]
    gap_step: Optional[int] = None  # None means the point is coded to full depth

    @property
    def in_set(self) -> bool:
        return self.gap_step is None

    def __str__(self):
        return "".join(str(b) for b in self.word)


@dataclass(frozen=True)
class GapDescriptor:
    word: tuple[Branch, ...]
    image_interval: tuple[float, float]


@dataclass(frozen=True)
class PsiValue:
    y: float
    value: float
    width: float
    code: CantorCode


def _compose(spec: CantorMapSpec, word: Sequence[int], t: float) -> float:
    """K_{w1} o ... o K_{ws}(t), innermost letter applied first."""
    for bit in reversed(word):
        t = spec.inverse(BIT_BRANCH[bit], t)
    return t


def _cylinder(spec, word):
    e0 = _compose(spec, word, 0.0)
    e1 = _compose(spec, word, 1.0)
    return (e0, e1) if e0 <= e1 else (e1, e0)


def _dist(y, lo, hi):
    if y < lo:
        return lo - y
    if y > hi:
        return y - hi
    return 0.0


def cantor_code(spec: CantorMapSpec, y: float, depth: int) -> CantorCode:
    """Symbolic code of ``y`` under ``k``, by nested cylinders.

    Stops with ``gap_step = s`` when ``y`` falls in the gap of its level-s
    cylinder, i.e. when k^s(y) lands in (a, b).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not 0.0 <= y <= 1.0:
        raise PsiError("y = %r outside [0, 1]" % (y,))
    word: list[int] = []
    for s in range(depth):
        d0 = _dist(y, *_cylinder(spec, word + [0]))
        d1 = _dist(y, *_cylinder(spec, word + [1]))
        best = min(d0, d1)
        if best > MEMBER_TOL:
            return CantorCode(tuple(word), s)
        word.append(0 if d0 <= d1 else 1)
    return CantorCode(tuple(word))


def gap_descriptor(spec: CantorMapSpec, y: float, depth: int) -> Optional[GapDescriptor]:
    """The word carrying the gap containing ``y`` onto (a, b), if any."""
    code = cantor_code(spec, y, depth)
    if code.in_set:
        return None
    return GapDescriptor(tuple(BIT_BRANCH[b] for b in code.word), (spec.a, spec.b))


def psi_on_cantor_value(F_spec: CantorMapSpec, G_spec: CantorMapSpec, y: float,
                        depth: int) -> PsiValue:
    code = cantor_code(F_spec, y, depth)
    if not code.in_set:
        raise PsiError("y = %r enters a gap at step %d" % (y, code.gap_step))
    # Cylinder endpoints are images of 0 and 1, whose psi-values are exact.
    # Deep cylinders are too thin for the match to be unambiguous.
    for s in range(len(code.word) + 1):
        prefix = code.word[:s]
        lo, hi = _cylinder(F_spec, prefix)
        if hi - lo < 1000 * ENDPOINT_TOL:
            break
        for t in (0.0, 1.0):
            if abs(_compose(F_spec, prefix, t) - y) <= ENDPOINT_TOL:
                return PsiValue(y, _compose(G_spec, prefix, t), 0.0, code)
    lo, hi = _cylinder(G_spec, code.word)
    return PsiValue(y, 0.5 * (lo + hi), hi - lo, code)


def psi_on_cantor(F_spec: CantorMapSpec, G_spec: CantorMapSpec, y: float, depth: int) -> float:
    """psi at a point of the Cantor set of ``F_spec`` (nested-interval midpoint)."""
    return psi_on_cantor_value(F_spec, G_spec, y, depth).value


def affine_gap_map(t: float) -> float:
    return t


def psi_extended_value(F_spec: CantorMapSpec, G_spec: CantorMapSpec, y: float, depth: int,
                       gap_map: Optional[Callable[[float], float]] = None) -> PsiValue:
    """psi on all of [0, 1].

    Gap points are pushed forward by the F branches onto (a_F, b_F), sent to
    (a_G, b_G) by ``gap_map`` (an increasing homeomorphism of [0, 1] in
    normalized coordinates, identity by default) and pulled back through the
    G inverse branches.
    """
    y = float(y)
    if math.isnan(y):
        raise PsiError("y is nan")
    code = cantor_code(F_spec, y, depth)
    if code.in_set:
        return psi_on_cantor_value(F_spec, G_spec, y, depth)
    h = gap_map or affine_gap_map
    t = y
    for bit in code.word:
        t = F_spec.k_branch(BIT_BRANCH[bit], t)
    u = (t - F_spec.a) / (F_spec.b - F_spec.a)
    u = min(max(u, 0.0), 1.0)
    v = G_spec.a + h(u) * (G_spec.b - G_spec.a)
    return PsiValue(y, _compose(G_spec, code.word, v), 0.0, code)


def psi_extended(F_spec: CantorMapSpec, G_spec: CantorMapSpec, y: float, depth: int = 40,
                 gap_map: Optional[Callable[[float], float]] = None) -> float:
    return psi_extended_value(F_spec, G_spec, y, depth, gap_map).value


def base_conjugacy(F, G, y: float, depth: int = 40) -> float:
    """psi(y) between the Cantor maps of two models; the identity when they agree."""
    if F.cantor == G.cantor:
        if not 0.0 <= y <= 1.0:
            raise PsiError("y = %r outside [0, 1]" % (y,))
        return float(y)
    return psi_extended(F.cantor, G.cantor, y, depth)


def psi_inverse(F_spec: CantorMapSpec, G_spec: CantorMapSpec, z: float, depth: int = 40,
                tol: float = 1e-15) -> float:
    """Solve psi(y) = z by bisection on the increasing map psi."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if psi_extended(F_spec, G_spec, mid, depth) < z:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PsiResidualReport:
    residual: float
    worst_y: float
    worst_branch: Optional[Branch]
    samples: int


def verify_psi_conjugacy(F_spec: CantorMapSpec, G_spec: CantorMapSpec, grid: Sequence[float],
                         depth: int = 40) -> PsiResidualReport:
    """max over grid and branches of |psi(K^F_j(y)) - K^G_j(psi(y))|."""
    worst, worst_y, worst_j = 0.0, math.nan, None
    for y in grid:
        py = psi_extended(F_spec, G_spec, y, depth)
        for j in (Branch.MINUS, Branch.PLUS):
            r = abs(psi_extended(F_spec, G_spec, F_spec.inverse(j, y), depth)
                    - G_spec.inverse(j, py))
            if r > worst or worst_j is None:
                worst, worst_y, worst_j = r, float(y), j
    return PsiResidualReport(worst, worst_y, worst_j, 2 * len(grid))
