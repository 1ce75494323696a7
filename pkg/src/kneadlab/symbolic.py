"""Addresses, itineraries and kneading sequences of the critical line."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cantor import base_conjugacy
from .model import Branch, Point, SignedCoordinate, ToyModel, eval_orbit


class AddressSymbol(enum.Enum):
    L = "L"
    Zminus = "0-"
    Zplus = "0+"
    R = "R"

    def __str__(self):
        return self.value


def address(p: Point) -> AddressSymbol:
    x = p.x
    if x.zero_sign is Branch.MINUS:
        return AddressSymbol.Zminus
    if x.zero_sign is Branch.PLUS:
        return AddressSymbol.Zplus
    return AddressSymbol.R if x.value > 0 else AddressSymbol.L


@dataclass(frozen=True)
class Itinerary:
    symbols: tuple[AddressSymbol, ...]

    @property
    def depth(self) -> int:
        return len(self.symbols)

    def __str__(self):
        return ",".join(s.value for s in self.symbols)

    @classmethod
    def parse(cls, text: str) -> "Itinerary":
        return cls(tuple(AddressSymbol(s.strip()) for s in text.split(",") if s.strip()))


def itinerary(model: ToyModel, p: Point, depth: int) -> Itinerary:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    points, _ = eval_orbit(model, p, depth - 1)
    return Itinerary(tuple(address(q) for q in points))


def kneading(model: ToyModel, y: float, side, depth: int) -> Itinerary:
    """Itinerary of the critical point (0^side, y)."""
    return itinerary(model, Point(SignedCoordinate(0.0, Branch.parse(side)), float(y)), depth)


@dataclass(frozen=True)
class Mismatch:
    y: float
    psi_y: float
    side: Branch
    index: int
    symbol_f: AddressSymbol
    symbol_g: AddressSymbol


@dataclass(frozen=True)
class EquivalenceVerdict:
    all_equal: bool
    depth: int
    grid_size: int
    mismatch: Optional[Mismatch] = None

    def __bool__(self):
        return self.all_equal


def default_y_grid(model: ToyModel, size: int = 33) -> list[float]:
    """Uniform grid plus the Cantor endpoints a, b, K+(b), K-(a)."""
    c = model.cantor
    extra = [c.a, c.b, c.inverse(Branch.PLUS, c.b), c.inverse(Branch.MINUS, c.a)]
    base = np.linspace(0.0, 1.0, max(size - len(extra), 2))
    return sorted(set(float(v) for v in base) | set(extra))


def kneading_equal(F: ToyModel, G: ToyModel, y_grid: Sequence[float], depth: int,
                   psi_depth: int = 40) -> EquivalenceVerdict:
    """Compare T_F(0^s, y) with T_G(0^s, psi(y)) on a grid, both sides."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    for i, y in enumerate(y_grid):
        if not 0.0 <= y <= 1.0:
            raise ValueError("grid value %r outside [0, 1]" % (y,))
        gy = base_conjugacy(F, G, y, psi_depth)
        for side in (Branch.MINUS, Branch.PLUS):
            tf = kneading(F, y, side, depth).symbols
            tg = kneading(G, gy, side, depth).symbols
            for k, (a, b) in enumerate(zip(tf, tg)):
                if a is not b:
                    return EquivalenceVerdict(False, depth, len(y_grid),
                                              Mismatch(float(y), gy, side, k, a, b))
    return EquivalenceVerdict(True, depth, len(y_grid))
