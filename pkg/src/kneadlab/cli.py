"""Command-line front end: ``kneadlab <subcommand> [options]``.

Models are built-in fixture names or ``[model.<name>]`` tables of a TOML
config; ``[run]`` holds default option values, and flags override both.
Exit status is 0 on success, 1 on a domain error and 2 on a config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import analysis, cantor, equivalence, symbolic
from .fixtures import FIXTURE_NAMES, fixture
from .model import (
    Branch,
    CantorMapSpec,
    Point,
    SignedCoordinate,
    ToyModel,
    UnimodalFamily,
    validate_model,
)


class ConfigError(Exception):
    pass


class DomainError(Exception):
    pass


# ---------------------------------------------------------------------------
# output


def fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    if v is None:
        return ""
    return str(v)


def _json(v: Any) -> str:
    if isinstance(v, dict):
        return "{" + ", ".join("%s: %s" % (_json(str(k)), _json(x)) for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json(x) for x in v) + "]"
    if isinstance(v, bool) or v is None:
        return {True: "true", False: "false", None: "null"}[v]
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isfinite(v):
            return "%.17g" % v
        return '"%s"' % fmt(v)
    s = str(v)
    out = ['"']
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ord(ch) < 0x20:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _jsonable(v: Any) -> Any:
    if isinstance(v, (SignedCoordinate, Branch, analysis.Stability)):
        return str(v)
    if isinstance(v, frozenset):
        return sorted(v)
    return v


@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]]
    meta: Optional[dict] = None

    def render(self, fmt_name: str) -> str:
        if fmt_name == "json":
            body: dict = {}
            if self.meta:
                body.update({k: _jsonable(v) for k, v in self.meta.items()})
            body["rows"] = [{c: _jsonable(x) for c, x in zip(self.columns, r)} for r in self.rows]
            return _json(body) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(x) if not isinstance(x, frozenset) else ";".join(sorted(x)) for x in r])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# config


_FAMILY_PARAMS = {"tent": ("s0", "s1"), "quadratic": ("c0", "c1")}


def model_from_table(name: str, table: dict) -> ToyModel:
    if not isinstance(table, dict):
        raise ConfigError("model.%s: expected a table" % name)
    kind = table.get("family")
    if kind not in ("tent", "quadratic", "example3-q", "example3-f", "example3-g"):
        raise ConfigError("model.%s.family: unknown family %r" % (name, kind))
    keys = _FAMILY_PARAMS.get(kind, ())
    try:
        params = [float(table.get(k, table.get("p%d" % i, 0.0))) for i, k in enumerate(keys)]
        a = float(table.get("a", 1.0 / 3.0))
        b = float(table.get("b", 2.0 / 3.0))
        zero_eps = float(table.get("zero_epsilon", 1e-12))
        root_tol = float(table.get("root_tol", 1e-13))
    except (TypeError, ValueError) as exc:
        raise ConfigError("model.%s: %s" % (name, exc)) from None
    if not 0.0 < a < b < 1.0:
        raise ConfigError("model.%s: need 0 < a < b < 1 (got a=%r, b=%r)" % (name, a, b))
    if zero_eps <= 0 or root_tol <= 0:
        raise ConfigError("model.%s: tolerances must be positive" % name)
    return ToyModel(UnimodalFamily(kind, *params), CantorMapSpec(a, b), zero_eps, root_tol,
                    name=name)


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("--config %s: %s" % (path, exc.strerror)) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("--config %s: %s" % (path, exc)) from None


class Settings:
    """Flag values layered over ``[run]`` values layered over defaults."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self.args = args
        self.config = config
        run = config.get("run", {})
        if not isinstance(run, dict):
            raise ConfigError("run: expected a table")
        self.run = run

    def get(self, key: str, default=None):
        v = getattr(self.args, key, None)
        if v is not None:
            return v
        return self.run.get(key, default)

    def count(self, key: str, default: int, minimum: int = 1) -> int:
        v = self.get(key, default)
        if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
            raise ConfigError("%s: expected an integer >= %d (got %r)" % (key, minimum, v))
        return v

    def real(self, key: str, default: float) -> float:
        v = self.get(key, default)
        try:
            return float(v)
        except (TypeError, ValueError):
            raise ConfigError("%s: expected a number (got %r)" % (key, v)) from None

    def unit(self, key: str, default: float) -> float:
        v = self.real(key, default)
        if not 0.0 <= v <= 1.0:
            raise ConfigError("%s: %r outside [0, 1]" % (key, v))
        return v

    def reals(self, key: str, default) -> Optional[list[float]]:
        v = self.get(key, default)
        if v is None:
            return None
        if isinstance(v, str):
            v = [s for s in v.split(",") if s.strip()]
        try:
            return [float(s) for s in v]
        except (TypeError, ValueError):
            raise ConfigError("%s: expected a list of numbers (got %r)" % (key, v)) from None

    def ints(self, key: str, default) -> list[int]:
        vals = self.reals(key, default) or []
        if any(x != int(x) or x < 1 for x in vals):
            raise ConfigError("%s: expected positive integers" % key)
        return [int(x) for x in vals]

    def model(self, key: str) -> ToyModel:
        name = self.get(key)
        if name is None:
            raise ConfigError("--%s is required" % key.replace("_", "-"))
        models = self.config.get("model", {})
        if name in models:
            return model_from_table(name, models[name])
        if name in FIXTURE_NAMES:
            return fixture(name)
        raise ConfigError("--%s: unknown model %r" % (key.replace("_", "-"), name))

    def y_grid(self, model: ToyModel, default_size: int, uniform: bool = False) -> list[float]:
        explicit = self.reals("y_values", None)
        if explicit is not None:
            if not explicit or any(not 0.0 <= y <= 1.0 for y in explicit):
                raise ConfigError("y_values: grid values must lie in [0, 1]")
            return explicit
        size = self.count("grid", default_size, minimum=2)
        if uniform:
            return [float(v) for v in np.linspace(0.0, 1.0, size)]
        return symbolic.default_y_grid(model, size)


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(s: Settings) -> Table:
    model = s.model("model")
    rep = validate_model(model, s.count("grid", 64))
    rows = [[c.name, c.passed, c.residual, c.detail] for c in rep.checks]
    if not rep.passed:
        s.domain_failure = "model %s fails validation" % model
    return Table(["check", "passed", "residual", "detail"], rows, {"gamma": rep.gamma})


def cmd_kneading(s: Settings) -> Table:
    model = s.model("model")
    depth = s.count("depth", 32)
    rows = []
    for y in s.y_grid(model, 33):
        for side in (Branch.MINUS, Branch.PLUS):
            rows.append([y, "0" + side.symbol, depth,
                         str(symbolic.kneading(model, y, side, depth))])
    return Table(["y", "side", "depth", "sequence"], rows)


def cmd_equiv(s: Settings) -> Table:
    F, G = s.model("model_a"), s.model("model_b")
    depth = s.count("depth", 32)
    grid = s.y_grid(F, 33)
    v = symbolic.kneading_equal(F, G, grid, depth, s.count("psi_depth", 40))
    mm = v.mismatch
    row = [v.all_equal, depth, len(grid)]
    row += ([mm.y, mm.psi_y, "0" + mm.side.symbol, mm.index, str(mm.symbol_f), str(mm.symbol_g)]
            if mm else [None] * 6)
    if mm:
        s.domain_failure = "not equivalent"
        text = ("first mismatch at y=%s (psi(y)=%s), critical point 0%s, index %d: %s vs %s\n"
                % (fmt(mm.y), fmt(mm.psi_y), mm.side.symbol, mm.index, mm.symbol_f, mm.symbol_g))
    else:
        text = "equivalent to depth %d\n" % depth
    t = Table(["all_equal", "depth", "grid_size", "y", "psi_y", "side", "index",
               "symbol_a", "symbol_b"], [row])
    t.text = text
    return t


def cmd_psi(s: Settings) -> Table:
    F, G = s.model("model_a"), s.model("model_b")
    depth = s.count("depth", 40)
    grid = s.y_grid(F, 65, uniform=True)
    rows = []
    for y in grid:
        pv = cantor.psi_extended_value(F.cantor, G.cantor, y, depth)
        rows.append([y, pv.value, pv.width, str(pv.code)])
    rep = cantor.verify_psi_conjugacy(F.cantor, G.cantor, grid, depth)
    return Table(["y", "psi_y", "certified_width", "code_prefix"], rows,
                 {"residual": rep.residual, "worst_y": rep.worst_y})


def cmd_partition(s: Settings) -> Table:
    model = s.model("model")
    y, n = s.unit("y", 0.5), s.count("n", 4)
    part = equivalence.preimage_set(model, y, n)
    return Table(["y", "n", "word", "x"], [[y, n, p.label, p.x] for p in part.points])


def cmd_conjugacy(s: Settings) -> Table:
    F, G = s.model("model_a"), s.model("model_b")
    y, n = s.unit("y", 0.5), s.count("n", 4)
    try:
        table = equivalence.build_Hn(F, G, y, n)
    except equivalence.CombinatorialInequivalenceError as exc:
        raise DomainError("%s (label %s)" % (exc, exc.label)) from None
    rows = [[label, xf, xg, table.psi_y] for label, xf, xg in table.pairs]
    samples = s.count("samples", 0, minimum=0)
    if samples:
        h = equivalence.PLConjugacy(table)
        for x in np.linspace(-1.0, 1.0, samples):
            xs = SignedCoordinate.of(x, Branch.PLUS)
            rows.append(["pl", xs, h(xs), table.psi_y])
    return Table(["label", "x_F", "x_G", "psi_y"], rows)


def _xy_grid(s: Settings, model: ToyModel) -> list[Point]:
    xs = np.linspace(-1.0, 1.0, s.count("x_grid", 65, minimum=2))
    ys = s.y_grid(model, 9, uniform=True)
    return [Point.of(x, y, Branch.PLUS) for y in ys for x in xs]


def cmd_converge(s: Settings) -> Table:
    F, G = s.model("model_a"), s.model("model_b")
    n, m = s.count("n", 4), s.count("m", 8)
    if m <= n:
        raise ConfigError("m: need m > n")
    try:
        est = equivalence.convergence_estimate(F, G, n, m, _xy_grid(s, F))
    except equivalence.CombinatorialInequivalenceError as exc:
        raise DomainError("%s (label %s)" % (exc, exc.label)) from None
    return Table(["n", "m", "sup_difference"], [[n, m, est]])


def cmd_equicont(s: Settings) -> Table:
    model = s.model("model")
    deltas = s.reals("deltas", [0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0])
    if any(d < 0 for d in deltas):
        raise ConfigError("deltas: must be >= 0")
    table = equivalence.equicontinuity_modulus(model, s.count("n_max", 6), deltas,
                                               s.y_grid(model, 9, uniform=True))
    return Table(["delta", "modulus"], [list(r) for r in table])


def cmd_density(s: Settings) -> Table:
    model = s.model("model")
    ns = s.ints("n_list", list(range(1, 11)))
    y = s.unit("y", 0.5)
    return Table(["n", "max_gap"], [list(r) for r in equivalence.density_report(model, y, ns)],
                 {"y": y})


def cmd_orbits(s: Settings) -> Table:
    model = s.model("model")
    recs = analysis.find_periodic_orbits(model, s.count("m_max", 3))
    rows = [[r.word, r.period, r.y_star, r.x_star, r.multiplier_A, r.multiplier_D,
             r.classification] for r in recs]
    return Table(["word", "period", "y_star", "x_star", "A", "D", "classification"], rows)


def cmd_singer(s: Settings) -> Table:
    model = s.model("model")
    steps = s.count("steps", 10000)
    word = s.get("word")
    if word is not None:
        recs = analysis.periodic_orbits_for_word(model, word)
        if not recs:
            raise DomainError("no periodic orbit follows word %r" % word)
    else:
        recs = [r for r in analysis.find_periodic_orbits(model, s.count("m_max", 3))
                if r.classification is analysis.Stability.strongly_attracting]
    rows = []
    for r in recs:
        rep = analysis.singer_check(model, r, steps)
        lo, hi = rep.fiber_interval
        rows.append([r.word, r.y_star, r.x_star, lo, hi, rep.touches, rep.probes,
                     rep.inconclusive])
    return Table(["word", "y_star", "x_star", "interval_lo", "interval_hi", "touches",
                  "probes", "inconclusive"], rows)


def cmd_cocycle(s: Settings) -> Table:
    model = s.model("model")
    x = s.real("x", 0.5)
    if not -1.0 <= x <= 1.0:
        raise ConfigError("x: %r outside [-1, 1]" % x)
    p = Point.of(x, s.unit("y", 0.2), s.get("side", "+"))
    rows = []
    for m in range(s.count("m", 3, minimum=0) + 1):
        c = analysis.cocycle(model, p, m)
        fd = analysis.jacobian_fd(model, p, m)
        rows.append([m, c.A, c.B, c.D, c.critical_hit, fd.matrix[0, 0], fd.matrix[0, 1],
                     fd.matrix[1, 1], fd.branch_violation])
    return Table(["m", "A", "B", "D", "critical_hit", "fd_A", "fd_B", "fd_D",
                  "fd_branch_violation"], rows)


def cmd_curve(s: Settings) -> Table:
    model = s.model("model")
    word = s.get("word")
    if not word or any(c not in "+-" for c in word):
        raise ConfigError("word: expected a non-empty string over '+' and '-'")
    curve = equivalence.trace_curve(model, word, s.y_grid(model, 33, uniform=True))
    return Table(["word", "w", "x", "fallback"],
                 [[curve.word, w, x, fb] for w, x, fb in curve.samples])


COMMANDS: dict[str, tuple[Callable[[Settings], Table], tuple[str, ...], str]] = {
    "validate": (cmd_validate, ("model", "grid"), "check the model hypotheses"),
    "kneading": (cmd_kneading, ("model", "depth", "grid", "y_values"), "kneading sequences"),
    "equiv": (cmd_equiv, ("model_a", "model_b", "depth", "grid", "y_values", "psi_depth"),
              "compare kneading sequences of two models"),
    "psi": (cmd_psi, ("model_a", "model_b", "depth", "grid", "y_values"),
            "base conjugacy between two Cantor maps"),
    "partition": (cmd_partition, ("model", "y", "n"), "labeled preimages on one fiber"),
    "conjugacy": (cmd_conjugacy, ("model_a", "model_b", "y", "n", "samples"),
                  "finite-depth conjugacy table"),
    "converge": (cmd_converge, ("model_a", "model_b", "n", "m", "grid", "x_grid", "y_values"),
                 "sup distance between two depths of the PL conjugacy"),
    "equicont": (cmd_equicont, ("model", "n_max", "deltas", "grid", "y_values"),
                 "modulus of continuity of y -> C_n(y)"),
    "density": (cmd_density, ("model", "y", "n_list"), "largest gap of C_n(y)"),
    "orbits": (cmd_orbits, ("model", "m_max"), "periodic orbits and their stability"),
    "singer": (cmd_singer, ("model", "m_max", "word", "steps"), "immediate basins"),
    "cocycle": (cmd_cocycle, ("model", "x", "y", "side", "m"), "derivative of F^m"),
    "curve": (cmd_curve, ("model", "word", "grid", "y_values"), "preimage curve over w"),
}

_OPTIONS = {
    "model": dict(help="model name (fixture or [model.<name>] table)"),
    "model_a": dict(help="first model"),
    "model_b": dict(help="second model"),
    "depth": dict(type=int, help="itinerary or coding depth"),
    "grid": dict(type=int, help="number of y grid points"),
    "y_values": dict(help="explicit comma-separated y grid"),
    "psi_depth": dict(type=int, help="coding depth for psi"),
    "y": dict(type=float, help="fiber coordinate"),
    "x": dict(type=float, help="x coordinate"),
    "side": dict(choices=["-", "+"], help="zero tag when x = 0"),
    "n": dict(type=int, help="preimage depth"),
    "m": dict(type=int, help="second depth or iterate count"),
    "samples": dict(type=int, help="number of PL samples on [-1, 1]"),
    "x_grid": dict(type=int, help="number of x grid points"),
    "n_max": dict(type=int, help="largest depth"),
    "deltas": dict(help="comma-separated delta values"),
    "n_list": dict(help="comma-separated depths"),
    "m_max": dict(type=int, help="largest period"),
    "word": dict(help="branch word over '+' and '-'"),
    "steps": dict(type=int, help="iteration budget per basin probe"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kneadlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, opts, helptext) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--format", choices=["text", "csv", "json"] if name == "equiv"
                       else ["csv", "json"], default=None)
        p.add_argument("--out", help="output path (default: standard output)")
        for opt in opts:
            p.add_argument("--" + opt.replace("_", "-"), dest=opt, default=None, **_OPTIONS[opt])
    return parser


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func = COMMANDS[args.command][0]
    try:
        s = Settings(args, load_config(args.config))
        s.domain_failure = None
        fmt_name = s.get("format", "text" if args.command == "equiv" else "csv")
        if fmt_name not in ("csv", "json") and not (args.command == "equiv" and fmt_name == "text"):
            raise ConfigError("format: unsupported value %r" % fmt_name)
        table = func(s)
    except ConfigError as exc:
        print("kneadlab %s: config error: %s" % (args.command, exc), file=sys.stderr)
        return 2
    except (DomainError, analysis.PreconditionError, cantor.PsiError,
            equivalence.CombinatorialInequivalenceError) as exc:
        print("kneadlab %s: %s" % (args.command, exc), file=sys.stderr)
        return 1
    text = table.text if fmt_name == "text" else table.render(fmt_name)
    out = s.get("out")
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print("kneadlab %s: config error: --out %s: %s" % (args.command, out, exc.strerror),
                  file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    if s.domain_failure:
        print("kneadlab %s: %s" % (args.command, s.domain_failure), file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
