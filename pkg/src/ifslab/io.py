"""Serialization: measures, IFS/family configs, CSV and JSON report files.

All emission is deterministic: dict keys sorted, floats via repr, exact
scalars as strings, no timestamps.
"""

from __future__ import annotations

import csv
import io as _io
import json
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError
from .exact import AlgebraicNumber, parse_scalar, scalar_to_json
from .families import ParamFamily
from .ifs import Ifs, OverlapReport, SimilarityMap
from .measures import DyadicMeasure


# -- measures ---------------------------------------------------------------

def measure_to_json(mu: DyadicMeasure) -> dict:
    if mu.is_exact:
        cells = [[k, mu.cells[k].numerator, mu.cells[k].denominator]
                 for k in sorted(mu.cells)]
    else:
        cells = [[k, float(mu.cells[k])] for k in sorted(mu.cells)]
    return {"resolution": mu.resolution, "backend": mu.backend, "cells": cells}


def measure_from_json(obj: dict) -> DyadicMeasure:
    cells = {}
    for row in obj["cells"]:
        if len(row) == 3:
            cells[int(row[0])] = Fraction(int(row[1]), int(row[2]))
        else:
            cells[int(row[0])] = float(row[1])
    return DyadicMeasure(int(obj["resolution"]), cells)


# -- IFS configs --------------------------------------------------------------

def ifs_to_json(ifs: Ifs) -> dict:
    return {
        "maps": [{"r": scalar_to_json(m.ratio), "a": scalar_to_json(m.translation)}
                 for m in ifs.maps],
        "probs": [str(p) for p in ifs.probs],
        "contractOnAverage": ifs.contract_on_average,
    }


def ifs_from_json(obj: dict) -> Ifs:
    try:
        maps = [SimilarityMap(parse_scalar(m["r"]), parse_scalar(m["a"]))
                for m in obj["maps"]]
        probs = [Fraction(p) for p in obj.get("probs", [])] or None
    except (KeyError, ValueError) as e:
        raise ConfigError("bad IFS config: %s" % e) from e
    return Ifs(maps, probs, contract_on_average=bool(obj.get("contractOnAverage")))


def family_to_json(fam: ParamFamily) -> dict:
    return {
        "interval": [str(fam.interval[0]), str(fam.interval[1])],
        "symbols": [{"r": [str(c) for c in r], "a": [str(c) for c in a]}
                    for r, a in fam.symbols],
        "probs": [str(p) for p in fam.probs],
        "contractOnAverage": fam.contract_on_average,
    }


def family_from_json(obj: dict) -> ParamFamily:
    try:
        symbols = [([Fraction(c) for c in s["r"]], [Fraction(c) for c in s["a"]])
                   for s in obj["symbols"]]
        interval = tuple(Fraction(x) for x in obj["interval"])
        probs = [Fraction(p) for p in obj.get("probs", [])] or None
    except (KeyError, ValueError) as e:
        raise ConfigError("bad family config: %s" % e) from e
    return ParamFamily(interval, symbols, probs,
                       contract_on_average=bool(obj.get("contractOnAverage")))


# -- reports ------------------------------------------------------------------

def overlap_rows(reports: list[OverlapReport]) -> list[dict]:
    rows = []
    for r in reports:
        if r.delta is None:
            exact = ""
        elif isinstance(r.delta, Fraction):
            exact = str(r.delta)
        else:  # algebraic: the exact value lives in the JSON report
            exact = "algebraic"
        rows.append({
            "n": r.n,
            "delta": exact,
            "delta_float": "" if r.delta is None else repr(r.delta_float()),
            "log_rate": "" if r.log_rate is None else repr(r.log_rate),
            "exact_overlap": int(r.exact_overlap),
        })
    return rows


def write_csv(path, rows: list[dict], columns: list[str]) -> None:
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _fmt(row.get(k, "")) for k in columns})
    Path(path).write_text(buf.getvalue())


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, AlgebraicNumber):
        return repr(float(v))
    return str(v)


def write_json(path, obj) -> None:
    Path(path).write_text(canonical_json(obj) + "\n")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=_json_default)


def _json_default(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, AlgebraicNumber):
        return repr(float(v))
    raise TypeError("not JSON-serializable: %r" % type(v))
