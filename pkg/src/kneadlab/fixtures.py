"""Built-in models, all over the affine Cantor map with a = 1/3, b = 2/3."""
from __future__ import annotations

from .model import CantorMapSpec, ToyModel, example3, quadratic, tent

_BUILDERS = {
    "tent2": lambda: tent(2.0),
    "quad2": lambda: quadratic(2.0),
    "quad1.2": lambda: quadratic(1.2),
    "example3-q": lambda: example3("q"),
    "example3-f": lambda: example3("f"),
    "example3-g": lambda: example3("g"),
    "coupled": lambda: quadratic(1.5, 0.4),
}

FIXTURE_NAMES = tuple(_BUILDERS)


def fixture(name: str, cantor: CantorMapSpec | None = None) -> ToyModel:
    try:
        family = _BUILDERS[name]()
    except KeyError:
        raise KeyError("unknown fixture %r (known: %s)" % (name, ", ".join(FIXTURE_NAMES))) from None
    return ToyModel(family, cantor or CantorMapSpec(), name=name)
