"""Experiment driver: censuses, orbit counts, fits, sandwich checks and reports."""

from __future__ import annotations

import argparse
import bisect
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import census as C
from . import words as W
from .assoc import associate, associate_census, records_to_csv
from .hypalg import GeometryError
from .orbits import DEFAULT_SLACK, orbit_census
from .surface import (COMPACT, INFINITE, PRESETS, ArcClass, SurfaceModel, UndecidedError,
                      canonical_arc, preset, verify_pants)
from .words import WordError, conj_canonical

EXIT_OK, EXIT_CONFIG, EXIT_UNCERTIFIED = 0, 2, 3
COLUMNS = ("curve", "arc", "infinite_arc")


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ count tables


@dataclass
class CountTable:
    """Counts N(L) on a grid, one column per kind of object.

    ``lengths`` optionally keeps the sorted lengths behind a column, so that
    counts at lengths off the grid (up to ``reach``) can be read off.
    """

    surface: str
    seed: str
    grid: list[tuple]          # (L, N_curve, N_arc, N_infinite_arc or None)
    t: float | None = None
    slack: float = DEFAULT_SLACK
    lengths: dict = field(default_factory=dict)
    reach: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = sorted(tuple(r) + (None,) * (4 - len(r)) for r in self.grid)
        for name in COLUMNS:
            col = [v for v in self.column(name) if v is not None]
            if any(b < a for a, b in zip(col, col[1:])):
                raise ValueError(f"column {name} is not nondecreasing in L")

    @property
    def Ls(self) -> list[float]:
        return [r[0] for r in self.grid]

    def column(self, name: str) -> list:
        return [r[1 + COLUMNS.index(name)] for r in self.grid]

    def count(self, name: str, x: float) -> int:
        if x < 0:
            return 0
        if name in self.lengths:
            if x > self.reach[name] + 1e-9:
                raise ValueError(f"{name} counts only known up to L = {self.reach[name]}")
            return bisect.bisect_right(self.lengths[name], x + 1e-9)
        for L, *vals in self.grid:
            if abs(L - x) <= 1e-9:
                return vals[COLUMNS.index(name)]
        raise ValueError(f"no {name} count at L = {x}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\r\n")
        wr.writerow(["L", "N_curve", "N_arc", "N_infinite_arc"])
        for r in self.grid:
            wr.writerow([_num(r[0])] + ["" if v is None else v for v in r[1:]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, surface: str = "", seed: str = "") -> "CountTable":
        rows = list(csv.reader(io.StringIO(text)))
        grid = []
        for r in rows[1:]:
            if r:
                grid.append((float(r[0]),) + tuple(int(v) if v else None for v in r[1:]))
        return cls(surface, seed, grid)


def _num(x: float) -> str:
    return f"{x:.17g}"


def count_table(s: SurfaceModel, grid, arc_seed=None, curve_seed=None, inf_seed=None,
                curve_reach=None, slack=DEFAULT_SLACK, t=1.0, threads=1) -> CountTable:
    """Orbit counts on the grid. The curve column is computed out to
    ``curve_reach`` (default max grid) so off-grid curve counts are available."""
    grid = sorted(grid)
    top = grid[-1]
    lengths, reach = {}, {}
    jobs = (("curve", curve_seed, curve_reach or top), ("arc", arc_seed, top),
            ("infinite_arc", inf_seed, top))
    for name, seed, L in jobs:
        if seed is None:
            continue
        oc = orbit_census(s, seed, L, slack=slack, t=t, threads=threads)
        if not oc.frontier_exhausted:
            raise UndecidedError(f"{name} orbit search hit its budget")
        lengths[name], reach[name] = oc.lengths(), L
    rows = []
    for L in grid:
        rows.append((L,) + tuple(bisect.bisect_right(lengths[n], L + 1e-9) if n in lengths
                                 else None for n in COLUMNS))
    seeds = ";".join(str(x) for x in (curve_seed, arc_seed, inf_seed) if x is not None)
    return CountTable(s.name, seeds, rows, t, slack, lengths, reach)


def fit_exponent(table: CountTable, column: str, window=None) -> tuple[float, float]:
    """Least-squares slope of log N against log L, with its standard error.

    The default window is the upper half of the grid.
    """
    pts = [(L, n) for L, n in zip(table.Ls, table.column(column)) if n]
    if window is None:
        Ls = [L for L, _ in pts]
        window = (Ls[len(Ls) // 2], Ls[-1]) if Ls else (0, 0)
    pts = [(L, n) for L, n in pts if window[0] - 1e-9 <= L <= window[1] + 1e-9 and L > 0]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 grid points with N > 0 in the window, have {len(pts)}")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = len(pts) - 2
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    return float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0)))


@dataclass
class SandwichReport:
    rows: list[tuple]          # (L, lower, N_arc, upper, ok)
    k: int
    C: float

    @property
    def passed(self) -> bool:
        return all(r[-1] for r in self.rows)

    @property
    def failures(self) -> list[float]:
        return [r[0] for r in self.rows if not r[-1]]


def sandwich_report(arc_table: CountTable, curve_table: CountTable, k: int,
                    C: float) -> SandwichReport:
    """k N_curve(2L - C) <= N_arc(L) <= k N_curve(2L + C) at each grid L."""
    if arc_table.surface != curve_table.surface:
        raise ValueError("tables come from different surfaces")
    rows = []
    for L, n in zip(arc_table.Ls, arc_table.column("arc")):
        if n is None:
            raise ValueError("arc table has no arc column")
        lo = k * curve_table.count("curve", 2 * L - C)
        hi = k * curve_table.count("curve", 2 * L + C)
        rows.append((L, lo, n, hi, lo <= n <= hi))
    return SandwichReport(rows, k, C)


def basmajian_partial_sums(s: SurfaceModel, arc_census, boundary: int = 0) -> list[tuple]:
    """Running sums of 2 ln coth(l/2) over orthogeodesics at the given boundary.

    An arc with both ends on that boundary is counted once per end.
    """
    out, total = [], 0.0
    for r in sorted(arc_census.records):
        a = r.key
        ends = (a.end_i == boundary) + (a.end_j == boundary)
        if not ends:
            continue
        total += ends * 2 * math.log(1 / math.tanh(r.length / 2))
        out.append((r.length, total))
    return out


def basmajian_summary(s: SurfaceModel, sums, L: float, boundary: int = 0) -> dict:
    bl = s.boundary_lengths[boundary]
    last = sums[-1][1] if sums else 0.0
    mono = all(b[1] >= a[1] for a, b in zip(sums, sums[1:]))
    return {"L": L, "boundary_length": bl, "partial_sum": last,
            "coverage_fraction": last / bl, "monotone": mono,
            "within_bound": all(v <= bl + 1e-6 for _, v in sums)}


# ------------------------------------------------------------------ parsing helpers


def _default_kind(s: SurfaceModel) -> str:
    return COMPACT if s.boundary_words else INFINITE


def parse_key(s: SurfaceModel, key: str, kind: str | None = None):
    """``i:w:j`` is an arc, anything else a curve word."""
    letters = set(W.alphabet(s.rank))
    word = key.split(":")[1] if key.count(":") == 2 else key
    if not set(word) <= letters:
        raise ConfigError(f"bad key {key!r}: letters must come from {''.join(sorted(letters))}")
    try:
        if ":" in key:
            return canonical_arc(s, ArcClass.from_key(key, kind or _default_kind(s)))
        c = conj_canonical(key)
        if not c.word:
            raise ConfigError("trivial curve")
        return c
    except (ValueError, WordError) as e:
        raise ConfigError(f"bad key {key!r}: {e}") from None


def _census(s, kind, L, t, margin, threads):
    if kind == C.CURVE:
        return C.enumerate_curves(s, L, margin, threads=threads)
    if kind == C.COMPACT_ARC:
        return C.enumerate_compact_arcs(s, L, margin, threads=threads)
    if kind == C.INFINITE_ARC:
        return C.enumerate_infinite_arcs(s, L, t, margin, threads=threads)
    raise ConfigError(f"unknown census kind {kind!r}")


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _surface_json(s: SurfaceModel) -> str:
    return _dump_json(json.loads(s.to_json()))


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _emit(text: str, out):
    if out:
        _write(Path(out), text)
    else:
        sys.stdout.write(text)


def _cert_json(c) -> dict:
    return {"certified": c.certificate.certified, "note": c.certificate.note,
            "max_word_length_scanned": c.certificate.max_word_length_scanned,
            "min_length_last_strata": list(c.certificate.min_length_last_strata),
            "margin": c.certificate.margin, "count": len(c.records), "L": c.L}


# ------------------------------------------------------------------ config runs

CONFIG_KEYS = {
    "preset": str, "max_length": (int, float), "grid": list, "t": (int, float),
    "slack": (int, float), "margin": (int, float), "threads": int, "census": list,
    "seeds": dict, "basmajian": bool, "fit_window": list,
}
SEED_KINDS = ("curve", "arc", "infinite_arc")


def _line_of(text: str, key: str) -> int:
    needle = json.dumps(key)
    for n, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return n
    return 1


def load_config(text: str) -> dict:
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("line 1: config must be a JSON object")
    for key, val in cfg.items():
        where = f"line {_line_of(text, key)}"
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if isinstance(val, bool) and CONFIG_KEYS[key] is not bool:
            raise ConfigError(f"{where}: {key!r} has the wrong type")
        if not isinstance(val, CONFIG_KEYS[key]):
            raise ConfigError(f"{where}: {key!r} has the wrong type")
    if "preset" not in cfg:
        raise ConfigError("line 1: missing required key 'preset'")
    if cfg["preset"] not in PRESETS:
        raise ConfigError(f"line {_line_of(text, 'preset')}: unknown preset {cfg['preset']!r}")
    if "max_length" not in cfg and "grid" not in cfg:
        raise ConfigError("line 1: need 'max_length' or 'grid'")
    for kind in cfg.get("census", []):
        if kind not in (C.CURVE, C.COMPACT_ARC, C.INFINITE_ARC):
            raise ConfigError(f"line {_line_of(text, kind)}: unknown census kind {kind!r}")
    for kind in cfg.get("seeds", {}):
        if kind not in SEED_KINDS:
            raise ConfigError(f"line {_line_of(text, kind)}: unknown seed kind {kind!r}")
    t = cfg.get("t", 1.0)
    if not 0 < t <= 1:
        raise ConfigError(f"line {_line_of(text, 't')}: t must lie in (0, 1]")
    grid = cfg.get("grid")
    if grid is not None and (not grid or not all(isinstance(x, (int, float)) and x > 0
                                                 for x in grid)):
        raise ConfigError(f"line {_line_of(text, 'grid')}: grid must be positive numbers")
    return cfg


def run_config(cfg: dict, out: str | Path) -> dict:
    """Run a validated config and write a deterministic report bundle."""
    out = Path(out)
    s = preset(cfg["preset"])
    t = float(cfg.get("t", 1.0))
    slack = float(cfg.get("slack", DEFAULT_SLACK))
    margin = float(cfg.get("margin", C.DEFAULT_MARGIN))
    threads = int(cfg.get("threads", 1))
    grid = sorted(float(x) for x in cfg.get("grid", [])) or None
    L = float(cfg.get("max_length", grid[-1] if grid else 0))
    log = [f"preset {s.name}", f"t {t!r} slack {slack!r} margin {margin!r}"]
    summary = {"preset": s.name, "t": t, "slack": slack, "margin": margin,
               "max_length": L, "census": {}}
    _write(out / "surface.json", _surface_json(s))

    certified = True
    for kind in cfg.get("census", []):
        c = _census(s, kind, L, t, margin, threads)
        _write(out / f"census_{kind}.csv", c.to_csv())
        summary["census"][kind] = _cert_json(c)
        certified &= c.certificate.certified
        log.append(f"census {kind} L={L!r}: {len(c.records)} records, "
                   f"certified={c.certificate.certified}")
        if kind != C.CURVE:
            _write(out / f"association_{kind}.csv", records_to_csv(associate_census(s, c)))
            if kind == C.COMPACT_ARC and cfg.get("basmajian", False):
                sums = basmajian_partial_sums(s, c)
                buf = io.StringIO()
                wr = csv.writer(buf, lineterminator="\r\n")
                wr.writerow(["L", "partial_sum"])
                for x, v in sums:
                    wr.writerow([_num(x), _num(v)])
                _write(out / "basmajian.csv", buf.getvalue())
                summary["basmajian"] = basmajian_summary(s, sums, L)

    seeds = cfg.get("seeds", {})
    if seeds:
        parsed = {k: parse_key(s, v, INFINITE if k == "infinite_arc" else COMPACT)
                  for k, v in seeds.items()}
        if "arc" in parsed and "curve" not in parsed:
            parsed["curve"] = associate(s, parsed["arc"])
        grid = grid or [float(x) for x in range(1, int(L) + 1)]
        C_X = s.C_X
        reach = 2 * grid[-1] + C_X if "arc" in parsed else grid[-1]
        table = count_table(s, grid, parsed.get("arc"), parsed.get("curve"),
                            parsed.get("infinite_arc"), curve_reach=reach, slack=slack,
                            t=t, threads=threads)
        _write(out / "counts.csv", table.to_csv())
        fits = {}
        window = cfg.get("fit_window")
        for name in COLUMNS:
            try:
                slope, err = fit_exponent(table, name, window)
                fits[name] = {"slope": slope, "stderr": err}
            except ValueError as e:
                fits[name] = {"error": str(e)}
        fit_info = {"fits": fits, "window": window or "upper half of grid",
                    "seeds": {k: str(v) for k, v in parsed.items()}}
        if "arc" in parsed:
            ks = measured_k(s, parsed["arc"], parsed["curve"], grid[-1], C_X, slack)
            rep = sandwich_report(table, table, ks or 1, C_X)
            fit_info["sandwich"] = {"k": ks, "C": C_X, "passed": rep.passed,
                                    "failures": rep.failures,
                                    "rows": [list(r) for r in rep.rows]}
            certified &= ks is not None
        _write(out / "fit.json", _dump_json(fit_info))
        log.append(f"counts on {len(grid)} grid points")
    summary["certified"] = certified
    _write(out / "summary.json", _dump_json(summary))
    _write(out / "log.txt", "\n".join(log) + "\n")
    return summary


def measured_k(s: SurfaceModel, arc_seed, curve_seed, L: float, C_X: float,
               slack: float = DEFAULT_SLACK):
    """Fiber size of the association map from the arc orbit to the curve orbit.

    An arc over a curve of length <= 2L - C has length <= L, so those fibers
    are complete in the arc orbit up to L. Returns None if sizes differ or
    no curve is short enough. L is raised if needed so that the four
    length units below it contain curves.
    """
    from .orbits import measure
    # make sure some curves are short enough for their fibers to be complete
    L = max(L, (measure(s, curve_seed) + C_X) / 2 + 4)
    arcs = orbit_census(s, arc_seed, L, slack=slack)
    curves = orbit_census(s, curve_seed, 2 * L - C_X, slack=slack)
    fibers = {}
    for a in arcs.elements:
        fibers.setdefault(associate(s, a), []).append(a)
    sizes = {len(fibers.get(c, [])) for c in curves.elements}
    return sizes.pop() if len(sizes) == 1 else None


# ------------------------------------------------------------------ command line


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arccount", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, length=True):
        sp.add_argument("--preset", default="one_holed_torus")
        if length:
            sp.add_argument("--max-length", type=float, required=True)
        sp.add_argument("--t", type=float, default=1.0)
        sp.add_argument("--margin", type=float, default=C.DEFAULT_MARGIN)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out")

    sp = sub.add_parser("surface", help="print the surface model as JSON")
    common(sp, length=False)

    for name in ("census", "assoc", "basmajian"):
        sp = sub.add_parser(name)
        common(sp)
        if name != "basmajian":
            sp.add_argument("--kind", choices=(C.CURVE, C.COMPACT_ARC, C.INFINITE_ARC),
                            default=C.CURVE if name == "census" else None)

    for name in ("orbit", "count"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--seed-key", required=True)
        sp.add_argument("--slack", type=float, default=DEFAULT_SLACK)
        sp.add_argument("--kind", choices=(COMPACT, INFINITE))
        if name == "count":
            sp.add_argument("--grid", help="comma-separated L values")

    sp = sub.add_parser("fit", help="fit log N against log L from a count table CSV")
    sp.add_argument("--table", required=True)
    sp.add_argument("--column", choices=COLUMNS, default="arc")
    sp.add_argument("--window", help="lo,hi")
    sp.add_argument("--out")

    sp = sub.add_parser("verify-pants")
    common(sp, length=False)

    sp = sub.add_parser("run")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True)
    return p


def _surface(name):
    try:
        return preset(name)
    except GeometryError as e:
        raise ConfigError(str(e)) from None


def _main(args) -> int:
    if args.cmd == "run":
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from None
        summary = run_config(load_config(text), args.out)
        return EXIT_OK if summary["certified"] else EXIT_UNCERTIFIED

    if args.cmd == "fit":
        table = CountTable.from_csv(Path(args.table).read_text(encoding="utf-8"))
        window = tuple(float(x) for x in args.window.split(",")) if args.window else None
        try:
            slope, err = fit_exponent(table, args.column, window)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        _emit(_dump_json({"column": args.column, "slope": slope, "stderr": err,
                          "window": list(window) if window else "upper half of grid"}), args.out)
        return EXIT_OK

    s = _surface(args.preset)
    if args.cmd == "surface":
        _emit(_surface_json(s), args.out)
        return EXIT_OK
    if args.cmd == "verify-pants":
        try:
            rows = verify_pants(s)
        except GeometryError as e:
            raise ConfigError(str(e)) from None
        _emit(_dump_json(rows), args.out)
        return EXIT_OK if all(r["rel_error"] < 1e-9 for r in rows) else EXIT_UNCERTIFIED
    if args.cmd in ("census", "assoc", "basmajian"):
        kind = getattr(args, "kind", None) or (C.COMPACT_ARC if s.boundary_words
                                               else C.INFINITE_ARC)
        if args.cmd == "basmajian":
            kind = C.COMPACT_ARC
        if kind != C.CURVE and not (s.boundary_words if kind == C.COMPACT_ARC
                                    else s.cusp_words):
            raise ConfigError(f"{s.name} has no {kind.replace('_', ' ')}s")
        c = _census(s, kind, args.max_length, args.t, args.margin, args.threads)
        if args.cmd == "census":
            _emit(c.to_csv(), args.out)
        elif args.cmd == "assoc":
            _emit(records_to_csv(associate_census(s, c)), args.out)
        else:
            sums = basmajian_partial_sums(s, c)
            _emit(_dump_json({"partial_sums": [list(x) for x in sums],
                              **basmajian_summary(s, sums, args.max_length)}), args.out)
        if not c.certificate.certified:
            print(f"census not certified: {c.certificate.note}", file=sys.stderr)
            return EXIT_UNCERTIFIED
        return EXIT_OK
    seed = parse_key(s, args.seed_key, args.kind)
    if args.cmd == "orbit":
        oc = orbit_census(s, seed, args.max_length, slack=args.slack, t=args.t,
                          threads=args.threads)
        _emit(oc.to_csv(), args.out)
        return EXIT_OK if oc.frontier_exhausted else EXIT_UNCERTIFIED
    if args.cmd == "count":
        grid = ([float(x) for x in args.grid.split(",")] if args.grid
                else [float(x) for x in range(1, int(args.max_length) + 1)])
        if isinstance(seed, ArcClass) and seed.kind == COMPACT:
            kw = {"arc_seed": seed, "curve_seed": associate(s, seed),
                  "curve_reach": 2 * max(grid) + s.C_X}
        elif isinstance(seed, ArcClass):
            kw = {"inf_seed": seed}
        else:
            kw = {"curve_seed": seed}
        table = count_table(s, grid, slack=args.slack, t=args.t, threads=args.threads, **kw)
        _emit(table.to_csv(), args.out)
        return EXIT_OK
    raise ConfigError(f"unknown command {args.cmd}")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _main(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except UndecidedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNCERTIFIED


if __name__ == "__main__":
    sys.exit(main())
