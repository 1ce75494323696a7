"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

from kneadlab import _pykernels as py

try:
    from kneadlab import _ckernels as ck
except ImportError:
    ck = None

QUAD = (py.QUADRATIC, 1.5, 0.4)
AB = (1 / 3, 2 / 3)

CASES = {
    "orbit 20k steps": lambda k: k.orbit(*QUAD, *AB, 0.123, 0, 0.4, 20000, 1e-12),
    "branch_inverse x2000": lambda k: [k.branch_inverse(*QUAD, 1, -1 + i / 1000, 0, 0.3, 1e-13)
                                       for i in range(2000)],
    "preimages depth 10": lambda k: k.preimages(*QUAD, *AB, 0.3, 10, 1e-13),
    "basin_probe x200": lambda k: [k.basin_probe(py.QUADRATIC, 1.2, 0.0, [0.0], [1], i / 200, 1,
                                                 1 / 6, 10000, 1e-9, 1e-12) for i in range(200)],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print("%-22s %12s %12s %9s" % ("kernel", "python [s]", "cython [s]", "speedup"))
    for name, fn in CASES.items():
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        if ck is None:
            print("%-22s %12.4f %12s %9s" % (name, tp, "n/a", "n/a"))
            continue
        tc = min(timeit.repeat(lambda: fn(ck), number=1, repeat=args.repeat))
        print("%-22s %12.4f %12.4f %8.1fx" % (name, tp, tc, tp / tc))


if __name__ == "__main__":
    main()
