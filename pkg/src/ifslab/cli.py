"""Command-line surface: scenario presets, config parsing, report emission.

Subcommands: entropy, overlaps, inverse, saturate, kv, cover, scan,
liouville.  Output files (CSV/JSON) are byte-deterministic for a fixed
config and version; wall-clock timing goes to stderr only.  Budget and
hypothesis failures exit nonzero with a machine-readable JSON object on
stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import io as iolib
from . import multiscale as ms
from . import presets
from .errors import ConfigError, IfslabError
from .exact import parse_scalar
from .families import (
    cover_sublevel,
    exceptional_cover,
    liouville_floor,
    near_root_scan,
)
from .ifs import (
    DEFAULT_BUDGET,
    delta_n,
    generation_measure,
    normalized_to_unit,
    rasterize_self_similar,
    sdim_measure,
    sdim_set,
    tagged_generation_measure,
)
from .measures import DyadicMeasure


def _load_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
    return cfg


def _cfg(cfg: dict, key: str, default=None, cast=None):
    v = cfg.get(key, default)
    if v is None:
        return None
    return cast(v) if cast else v


def _version_hash(cfg: dict) -> str:
    digest = hashlib.sha256(iolib.canonical_json(cfg).encode()).hexdigest()[:12]
    return "%s+%s" % (__version__, digest)


def _emit_report(outdir: Path, command: str, cfg: dict, summary: dict) -> None:
    report = {
        "command": command,
        "config": cfg,
        "backend": cfg.get("backend", "exact"),
        "version_hash": _version_hash(cfg),
        "summary": summary,
    }
    iolib.write_json(outdir / ("%s_report.json" % command), report)


def _emit_table(outdir: Path, name: str, rows: list[dict], columns: list[str],
                fmt: str) -> None:
    if fmt == "json":
        iolib.write_json(outdir / ("%s.json" % name),
                         [{k: row.get(k, "") for k in columns} for row in rows])
    else:
        iolib.write_csv(outdir / ("%s.csv" % name), rows, columns)


def _scenario_ifs(cfg: dict):
    if "ifs" in cfg:
        return iolib.ifs_from_json(cfg["ifs"])
    return presets.scenario_ifs(cfg.get("scenario", "cantor"),
                                cfg.get("params", {}))


def _scenario_measure(spec: dict, resolution: int) -> DyadicMeasure:
    if "measure_file" in spec:
        return iolib.measure_from_json(
            json.loads(Path(spec["measure_file"]).read_text()))
    return presets.scenario_measure(spec.get("scenario", "cantor"),
                                    spec.get("params", {}), resolution)


def _scenario_family(cfg: dict):
    if "family" in cfg:
        return iolib.family_from_json(cfg["family"])
    name = cfg.get("scenario", "bernoulli")
    lo = cfg.get("interval", ["1/2", "3/5"])[0]
    hi = cfg.get("interval", ["1/2", "3/5"])[1]
    if name == "bernoulli":
        return presets.bernoulli_family(lo, hi)
    if name == "gasket":
        return presets.gasket_family(lo, hi)
    if name == "sinai":
        return presets.sinai_family(lo, hi)
    raise ConfigError("unknown family scenario %r" % name)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_entropy(cfg: dict, outdir: Path, fmt: str, plot: bool) -> dict:
    ifs = _scenario_ifs(cfg)
    q = float(Fraction(cfg.get("q", "2")))
    n_lo, n_hi = cfg.get("n_range", [2, 8])
    budget = int(cfg.get("budget_atoms", DEFAULT_BUDGET))
    uniform = ifs.uniform_ratio() is not None
    log_r = -ifs.mean_log2_ratio() if not uniform else \
        -math.log2(abs(float(ifs.uniform_ratio())))
    rows = []
    for n in range(int(n_lo), int(n_hi) + 1):
        nprime = n * log_r
        fine, coarse = math.floor(q * nprime), math.floor(nprime)
        if uniform:
            nu = generation_measure(ifs, n, budget)
        else:
            nu = tagged_generation_measure(ifs, n, budget)
        cond = nu.conditional_entropy(fine, coarse) / nprime
        h_rate = nu.entropy(coarse) / nprime
        rows.append({"n": n, "nprime": nprime,
                     "cond_entropy_rate": cond, "H_rate": h_rate})
    summary = {"uniform_ratio": uniform, "q": q, "rows": len(rows)}
    resolution = cfg.get("resolution")
    if resolution and not ifs.contract_on_average:
        unit, _ = normalized_to_unit(ifs)
        rr = rasterize_self_similar(unit, int(resolution), budget=budget)
        summary["raster_H_rate"] = rr.measure.entropy_rate(int(resolution))
        summary["raster_boundary_mass"] = rr.boundary_mass
    _emit_table(outdir, "entropy_series", rows,
                ["n", "nprime", "cond_entropy_rate", "H_rate"], fmt)
    if plot:
        from . import plots

        plots.plot_series(outdir / "entropy_series.png",
                          [r["n"] for r in rows],
                          {"cond rate": [r["cond_entropy_rate"] for r in rows],
                           "H rate": [r["H_rate"] for r in rows]},
                          "n", "bits/level", "generation entropy rates")
    return summary


def cmd_overlaps(cfg: dict, outdir: Path, fmt: str, plot: bool) -> dict:
    if cfg.get("backend", "exact") != "exact":
        raise ConfigError("overlaps requires --backend exact")
    ifs = _scenario_ifs(cfg)
    n_lo, n_hi = cfg.get("n_range", [1, 8])
    budget = int(cfg.get("budget_atoms", DEFAULT_BUDGET))
    reports = [delta_n(ifs, n, budget) for n in range(int(n_lo), int(n_hi) + 1)]
    rows = iolib.overlap_rows(reports)
    _emit_table(outdir, "overlaps", rows,
                ["n", "delta", "delta_float", "log_rate", "exact_overlap"], fmt)
    if plot:
        from . import plots

        pts = [(r.n, r.log_rate) for r in reports
               if r.log_rate is not None and math.isfinite(r.log_rate)]
        if pts:
            plots.plot_series(outdir / "overlaps.png", [p[0] for p in pts],
                              {"-(1/n) log2 delta_n": [p[1] for p in pts]},
                              "n", "rate", "cylinder separation rate")
    return {"exact_overlap_found": any(r.exact_overlap for r in reports),
            "rows": len(rows)}


def _stats_rows(stats: ms.ComponentStats) -> list[dict]:
    return [{"level": ls.level, "weight_sum": ls.weight_sum,
             "mean_Hm": ls.mean_hm, "uniform_frac": ls.uniform_frac,
             "atomic_frac": ls.atomic_interval_frac, "mean_var": ls.mean_var}
            for ls in stats.per_level]


_STATS_COLS = ["level", "weight_sum", "mean_Hm", "uniform_frac",
               "atomic_frac", "mean_var"]


def cmd_inverse(cfg: dict, outdir: Path, fmt: str, plot: bool) -> dict:
    resolution = int(cfg.get("resolution", 12))
    m = int(cfg.get("m", 3))
    eps = float(Fraction(cfg.get("epsilon", "1/10")))
    lo, hi = cfg.get("levels", [0, resolution - m])
    levels = range(int(lo), int(hi) + 1)
    mu = _scenario_measure(cfg.get("mu", {"scenario": "lebesgue"}), resolution)
    nu = _scenario_measure(cfg.get("nu", {"scenario": "cantor"}), resolution)
    gap = ms.entropy_gap(mu, nu, resolution)
    mu_stats = ms.component_stats(mu, levels, m, eps, clip=True)
    nu_stats = ms.component_stats(nu, levels, m, eps, clip=True)
    dec = ms.find_decomposition(mu_stats, nu_stats, eps, entropy_gap=gap)
    _emit_table(outdir, "component_stats_mu", _stats_rows(mu_stats), _STATS_COLS, fmt)
    _emit_table(outdir, "component_stats_nu", _stats_rows(nu_stats), _STATS_COLS, fmt)
    _emit_table(outdir, "decomposition",
                [{"level": q, "assignment": a} for q, a in dec.assignment_rows()],
                ["level", "assignment"], fmt)
    if plot:
        from . import plots

        for tag, st in (("mu", mu_stats), ("nu", nu_stats)):
            plots.plot_level_fractions(
                outdir / ("components_%s.png" % tag),
                [(ls.level, ls.uniform_frac, ls.atomic_interval_frac, ls.mean_hm)
                 for ls in st.per_level],
                "component fractions (%s)" % tag)
    return {"entropy_gap": gap, "coverage": dec.coverage,
            "I_size": len(dec.I), "J_size": len(dec.J), "verdict": dec.verdict}


def cmd_saturate(cfg: dict, outdir: Path, fmt: str, plot: bool) -> dict:
    resolution = int(cfg.get("resolution", 12))
    k = int(cfg.get("k", 4))
    m = int(cfg.get("m", 3))
    delta = float(Fraction(cfg.get("delta", "1/10")))
    budget = int(cfg.get("budget_atoms", DEFAULT_BUDGET))
    mu = _scenario_measure(cfg.get("mu", {"scenario": "cantor"}), resolution)
    lo, hi = cfg.get("levels", [0, resolution - m])
    rep = ms.saturation_check(mu, k, m, delta, range(int(lo), int(hi) + 1),
                              budget=budget)
    rows = [{"level": r.level, "nu_uniform_frac": r.nu_uniform_frac,
             "mu_atomic_frac": r.mu_atomic_frac,
             "mean_component_var": r.mean_component_var} for r in rep.rows]
    _emit_table(outdir, "saturation", rows,
                ["level", "nu_uniform_frac", "mu_atomic_frac",
                 "mean_component_var"], fmt)
    if plot:
        from . import plots

        plots.plot_series(outdir / "saturation.png",
                          [r.level for r in rep.rows],
                          {"nu uniform frac": [r.nu_uniform_frac for r in rep.rows],
                           "mu atomic frac": [r.mu_atomic_frac for r in rep.rows],
                           "lambda_q": [r.mean_component_var for r in rep.rows]},
                          "level", "", "saturation of %d-fold self-convolution" % k)
    return {"k": k, "coverage": rep.coverage, "I": rep.I, "J": rep.J}


def cmd_kv(cfg: dict, outdir: Path, fmt: str, plot: bool) -> dict:
    level = int(cfg.get("resolution", 10))
    k_max = int(cfg.get("k_max", 6))
    budget = int(cfg.get("budget_atoms", DEFAULT_BUDGET))
    mu = _scenario_measure(cfg.get("mu", {"scenario": "cantor"}), level)
    nu = _scenario_measure(cfg.get("nu", {"scenario": "cantor"}), level)
    series = ms.kv_series(mu, nu, k_max, level, budget=budget)
    rows = [{"k": k, "H": h,
             "delta": series.deltas[k] if k < len(series.deltas) else ""}
            for k, h in enumerate(series.entropies)]
    _emit_table(outdir, "kv_series", rows, ["k", "H", "delta"], fmt)
    if plot:
        from . import plots

        plots.plot_series(outdir / "kv_series.png",
                          list(range(len(series.deltas))),
                          {"delta_k": series.deltas}, "k", "bits/level",
                          "entropy increments of repeated convolution")
    return {"monotone": series.monotone, "discrete_group": series.discrete_group,
            "linear_residual_scaled": series.linear_residual_scaled}


def cmd_cover(cfg: dict, outdir: Path, fmt: str, plot: bool) -> dict:
    k = int(cfg.get("k", 2))
    c = Fraction(cfg.get("c", "1/4"))
    if "polynomial" in cfg:
        F = [Fraction(x) for x in cfg["polynomial"]]
        J = [Fraction(x) for x in cfg.get("interval", ["0", "1"])]
        rho = Fraction(cfg.get("rho", "1/100"))
        rep = cover_sublevel(F, J, rho, c, k)
        obj = {
            "kind": "sublevel",
            "rho": str(rep.rho), "c": str(rep.c), "k": rep.k,
            "count": rep.count, "max_length": str(rep.max_length),
            "length_bound": str(rep.length_bound),
            "count_bound": rep.count_bound,
            "complement_certified": rep.complement_certified,
            "intervals": [[str(a), str(b)] for a, b in rep.intervals],
        }
        summary = {"count": rep.count,
                   "max_length": float(rep.max_length),
                   "certified": rep.complement_certified}
        pieces, interval = rep.intervals, J
    else:
        fam = _scenario_family(cfg)
        eps = Fraction(cfg.get("eps", "1/100"))
        n = int(cfg.get("n", 6))
        budget = int(cfg.get("budget_atoms", DEFAULT_BUDGET))
        rep = exceptional_cover(fam, eps, n, k, c, budget=budget,
                                assume_transversal=bool(cfg.get("assume_transversal")))
        obj = {
            "kind": "exceptional",
            "eps": str(rep.eps), "n": rep.n, "k": rep.k, "c": str(rep.c),
            "count": rep.count, "max_length": str(rep.max_length),
            "boxdim_estimate": rep.boxdim_estimate,
            "pairs_covered": rep.pairs_covered,
            "complement_certified": rep.complement_certified,
            "transversality": rep.transversality,
            "intervals": [[str(a), str(b)] for a, b in rep.intervals],
        }
        summary = {"count": rep.count, "boxdim_estimate": rep.boxdim_estimate,
                   "certified": rep.complement_certified}
        pieces, interval = rep.intervals, fam.interval
    iolib.write_json(outdir / "cover.json", obj)
    if plot and pieces:
        from . import plots

        plots.plot_cover(outdir / "cover.png", interval, pieces,
                         "sublevel cover (%d pieces)" % len(pieces))
    return summary


def cmd_scan(cfg: dict, outdir: Path, fmt: str, plot: bool) -> dict:
    name = cfg.get("scenario", "bernoulli")
    grid = cfg.get("grid", {"lo": "1/2", "hi": "5/8", "step": "1/32"})
    lo, hi, step = (Fraction(grid[key]) for key in ("lo", "hi", "step"))
    n = int(cfg.get("n", 6))
    budget = int(cfg.get("budget_atoms", DEFAULT_BUDGET))
    theta = cfg.get("theta")
    rows = []
    t = lo
    while t <= hi:
        if name == "bernoulli":
            ifs = presets.bernoulli_ifs(t)
        elif name == "gasket":
            ifs = presets.gasket_ifs(t)
        elif name == "sinai":
            ifs = presets.sinai_ifs(t)
        else:
            raise ConfigError("unknown scan scenario %r" % name)
        rep = delta_n(ifs, n, budget)
        row = {
            "t": str(t),
            "sdim_set": "" if ifs.contract_on_average else sdim_set(ifs),
            "sdim_measure": sdim_measure(ifs),
            "delta_n": "" if rep.delta is None else repr(rep.delta_float()),
            "log_rate": "" if rep.log_rate is None else repr(rep.log_rate),
            "exact_overlap": int(rep.exact_overlap),
        }
        if theta is not None:
            nr = near_root_scan(t, [n], Fraction(theta), budget)[0]
            row["near_root_min"] = repr(nr.min_abs)
            row["near_root_below_theta"] = int(nr.below_theta)
        rows.append(row)
        t += step
    cols = ["t", "sdim_set", "sdim_measure", "delta_n", "log_rate", "exact_overlap"]
    if theta is not None:
        cols += ["near_root_min", "near_root_below_theta"]
    _emit_table(outdir, "scan", rows, cols, fmt)
    if plot:
        from . import plots

        pts = [(float(Fraction(r["t"])), float(r["log_rate"]))
               for r in rows if r["log_rate"] != ""]
        if pts:
            plots.plot_series(outdir / "scan.png", [p[0] for p in pts],
                              {"-(1/n) log2 delta_n": [p[1] for p in pts]},
                              "t", "rate", "separation rate across parameters")
    return {"rows": len(rows),
            "exact_overlaps": sum(r["exact_overlap"] for r in rows)}


def cmd_liouville(cfg: dict, outdir: Path, fmt: str, plot: bool) -> dict:
    values = [parse_scalar(v) for v in cfg.get("values", ["1/3"])]
    n_lo, n_hi = cfg.get("n_range", [1, 10])
    height = int(cfg.get("height", 1))
    budget = int(cfg.get("budget_atoms", DEFAULT_BUDGET))
    cross = bool(cfg.get("cross_check")) and len(values) == 1
    theta = Fraction(cfg.get("theta", "1/2"))
    rows = []
    for n in range(int(n_lo), int(n_hi) + 1):
        floor = liouville_floor(values, n, height)
        row = {"n": n, "floor": repr(float(floor)), "floor_exact": str(floor)}
        if cross:
            nr = near_root_scan(values[0], [n], theta, budget)[0]
            row["min_nonzero"] = "" if nr.min_nonzero_abs is None \
                else repr(nr.min_nonzero_abs)
            row["theta_n"] = repr(nr.theta_n)
            row["below_theta"] = int(nr.below_theta)
        rows.append(row)
    cols = ["n", "floor", "floor_exact"]
    if cross:
        cols += ["min_nonzero", "theta_n", "below_theta"]
    _emit_table(outdir, "liouville", rows, cols, fmt)
    if plot:
        from . import plots

        plots.plot_series(outdir / "liouville.png",
                          [r["n"] for r in rows],
                          {"-log2 floor": [-math.log2(float(r["floor"]))
                                           for r in rows]},
                          "n", "bits", "separation floor")
    return {"rows": len(rows)}


_COMMANDS = {
    "entropy": cmd_entropy,
    "overlaps": cmd_overlaps,
    "inverse": cmd_inverse,
    "saturate": cmd_saturate,
    "kv": cmd_kv,
    "cover": cmd_cover,
    "scan": cmd_scan,
    "liouville": cmd_liouville,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ifslab",
        description="finite-scale entropy/overlap analysis of self-similar "
                    "measures")
    ap.add_argument("command", choices=sorted(_COMMANDS))
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--backend", choices=["exact", "float"], default=None)
    ap.add_argument("--budget-atoms", type=int, default=None)
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    ap.add_argument("--plot", action="store_true",
                    help="render figures next to the tables")
    ap.add_argument("--epsilon", default=None)
    ap.add_argument("--m", type=int, default=None)
    ap.add_argument("--levels", default=None, help="level range a..b")
    ap.add_argument("--resolution", type=int, default=None)
    ap.add_argument("--set", action="append", default=[],
                    metavar="KEY=VALUE", help="override a config entry")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.backend:
            cfg["backend"] = args.backend
        if args.budget_atoms:
            cfg["budget_atoms"] = args.budget_atoms
        if args.epsilon:
            cfg["epsilon"] = args.epsilon
        if args.m is not None:
            cfg["m"] = args.m
        if args.resolution is not None:
            cfg["resolution"] = args.resolution
        if args.levels:
            lo, _, hi = args.levels.partition("..")
            cfg["levels"] = [int(lo), int(hi)]
        for kv in args.set:
            key, _, value = kv.partition("=")
            try:
                cfg[key] = json.loads(value)
            except json.JSONDecodeError:
                cfg[key] = value
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        t0 = time.monotonic()
        summary = _COMMANDS[args.command](cfg, outdir, args.format, args.plot)
        elapsed = time.monotonic() - t0
        _emit_report(outdir, args.command, cfg, summary)
        print("%s: %s" % (args.command, iolib.canonical_json(summary)))
        print("elapsed: %.3fs" % elapsed, file=sys.stderr)
        return 0
    except IfslabError as e:
        sys.stderr.write(json.dumps(
            {"error": type(e).__name__, "message": str(e)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
