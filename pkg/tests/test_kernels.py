"""The compiled and pure-Python kernels must agree bit for bit."""
import os

import numpy as np
import pytest

from kneadlab import _pykernels as py
from kneadlab._backend import BACKEND

ck = pytest.importorskip("kneadlab._ckernels")

FAMILIES = [(py.TENT, 2.0, 0.0), (py.TENT, 1.7, 0.2), (py.QUADRATIC, 1.5, 0.4),
            (py.QUADRATIC, 1.2, 0.0), (py.EX3_Q, 0.0, 0.0), (py.EX3_F, 0.0, 0.0),
            (py.EX3_G, 0.0, 0.0)]
AB = (1 / 3, 2 / 3)


@pytest.mark.skipif(os.environ.get("KNEADLAB_BACKEND", "").lower() == "python",
                    reason="fallback forced")
def test_backend_prefers_extension():
    assert BACKEND == "cython"


@pytest.mark.parametrize("fam", FAMILIES)
def test_eval_and_step(fam):
    rng = np.random.default_rng(7)
    for x, y in rng.uniform([-1, 0], [1, 1], size=(200, 2)):
        assert py.f_eval(*fam, y, x) == ck.f_eval(*fam, y, x)
        for tag in (0,):
            assert py.step(*fam, *AB, x, tag, y, 1e-12) == ck.step(*fam, *AB, x, tag, y, 1e-12)
    for tag in (-1, 1):
        assert py.step(*fam, *AB, 0.0, tag, 0.4, 1e-12) == ck.step(*fam, *AB, 0.0, tag, 0.4, 1e-12)


@pytest.mark.parametrize("fam", FAMILIES)
def test_orbit(fam):
    for x, tag in ((0.0, 1), (0.0, -1), (0.37, 0), (-0.81, 0)):
        a = py.orbit(*fam, *AB, x, tag, 0.29, 40, 1e-12)
        b = ck.orbit(*fam, *AB, x, tag, 0.29, 40, 1e-12)
        assert [list(v) for v in a] == [list(v) for v in b]


@pytest.mark.parametrize("fam", FAMILIES)
def test_branch_inverse(fam):
    for j in (-1, 1):
        for x in np.linspace(-1.2, 1.2, 41):
            for tag in ((0,) if x != 0 else (-1, 1)):
                for y in (0.0, 0.5, 1.0):
                    assert (py.branch_inverse(*fam, j, x, tag, y, 1e-13)
                            == ck.branch_inverse(*fam, j, x, tag, y, 1e-13))


@pytest.mark.parametrize("fam", FAMILIES)
def test_preimages(fam):
    for y in (0.0, 0.25, 0.9):
        a = py.preimages(*fam, *AB, y, 6, 1e-13)
        b = ck.preimages(*fam, *AB, y, 6, 1e-13)
        assert [(tuple(w), x, t) for w, x, t in a] == [(tuple(w), x, t) for w, x, t in b]


def test_basin_probe():
    fam = (py.QUADRATIC, 1.2, 0.0)
    for x in np.linspace(0, 1, 33):
        args = (*fam, [0.0], [1], float(x), 1 if x == 0 else 0, 1 / 6, 10000, 1e-9, 1e-12)
        assert py.basin_probe(*args) == ck.basin_probe(*args)
    args = (*fam, [0.0, 0.0], [1, -1], 0.3, 0, 0.3, 50, 1e-9, 1e-12)
    assert py.basin_probe(*args) == ck.basin_probe(*args)


def test_long_word_rejected_by_extension():
    with pytest.raises(ValueError):
        ck.basin_probe(py.QUADRATIC, 1.2, 0.0, [0.0] * 65, [1] * 65, 0.1, 0, 0.1, 10, 1e-9, 1e-12)
