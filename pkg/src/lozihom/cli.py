"""Command-line front end.

    lozihom [global flags] <command> [command flags]

Global flags (also accepted after the command): --tol, --depth, --out,
--format, --config.  A config file is flat ``key = value`` text; keys are the
long flag names with dashes or underscores.  Explicit flags beat the config
file, which beats the built-in defaults.

Exit status: 0 ok, 1 usage error, 2 computation error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional

from . import __version__
from .boundary import (
    CURVES,
    ENDPOINTS,
    load_table2,
    project_to_curve,
    scan_region,
    solve_endpoint,
    table1_relative,
    trace_curve,
    trace_named,
)
from .core import Params
from .errors import LoziError, TruncationError
from .intersect import check_last_tangency, homoclinic_on_fundamental
from .manifolds import MAX_VERTICES, ManifoldArc, stable_arc, unstable_arc
from .svg import DEFAULT_VIEWPORT, manifold_svg, raster_svg

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3

ENDPOINT_MATCH = 1e-6  # agreement with the endpoint table, per coordinate
TABLE1_MATCH = 1e-8  # relative residual required on traced samples

FORMATS = {
    "manifold": ("csv", "json", "svg"),
    "homoclinic": ("json",),
    "trace": ("csv", "json"),
    "endpoints": ("csv", "json"),
    "scan": ("csv", "json", "svg"),
    "verify-tables": ("text", "json"),
}

DEFAULTS = {
    "tol": None,  # per command; None lets the library pick its scale-aware default
    "depth": 8,
    "out": None,
    "format": None,
    "a": None,
    "b": None,
    "max_vertices": MAX_VERTICES,
    "viewport": ",".join(str(v) for v in DEFAULT_VIEWPORT),
    "curve": "C1",
    "curves": "C1..C6",
    "a_from": None,
    "a_to": None,
    "b_from": None,
    "b_to": None,
    "step": None,
    "samples": 60,
    "a_range": "1.0,1.8",
    "b_range": "0.05,0.95",
    "grid": "40x40",
    "workers": 1,
    "svg": None,
    "overlay": False,
    "table": "all",
    "on_curve": None,
    "snap_width": 5e-6,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(message)


# -- number formatting ------------------------------------------------------


def fmt_csv(v) -> str:
    """17 significant digits, enough to round-trip any binary64."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return _json_safe(obj.item())
    return obj


def dump_json(obj) -> str:
    # float repr is the shortest string that reads back to the same double
    return json.dumps(_json_safe(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_csv(header, rows, meta: Optional[dict] = None) -> str:
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([x if isinstance(x, str) else fmt_csv(x) for x in r])
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict, list[dict]]:
    """Inverse of :func:`write_csv`: (metadata, rows as dicts of strings)."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# ") and not body:
            k, _, v = line[2:].partition("=")
            meta[k] = v
        else:
            body.append(line)
    return meta, list(csv.DictReader(body))


def _emit(path: Optional[str], text: str, stdout) -> None:
    if path in (None, "-"):
        stdout.write(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- config -----------------------------------------------------------------


def read_config(path: str) -> dict:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.lstrip("-").replace("-", "_")
        if k not in DEFAULTS:
            raise UsageError(f"{path}:{n}: unknown key {k!r}")
        out[k] = v
    return out


_TYPES = {
    "tol": float,
    "depth": int,
    "a": float,
    "b": float,
    "max_vertices": int,
    "a_from": float,
    "a_to": float,
    "b_from": float,
    "b_to": float,
    "step": float,
    "samples": int,
    "workers": int,
    "snap_width": float,
}


def _coerce(key: str, value):
    if value is None or key not in _TYPES and key != "overlay":
        return value
    if key == "overlay":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes", "on")
    try:
        return _TYPES[key](value)
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {key}: {value!r}") from None


def resolve(ns: argparse.Namespace) -> dict:
    """Merge defaults < config file < explicit flags."""
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    cfg = read_config(ns.config) if getattr(ns, "config", None) else {}
    conf = dict(DEFAULTS)
    conf.update(cfg)
    conf.update(flags)
    conf = {k: _coerce(k, v) for k, v in conf.items()}
    conf["command"] = ns.command
    fmt = conf["format"] or FORMATS[ns.command][0]
    if fmt not in FORMATS[ns.command]:
        raise UsageError(f"format {fmt!r} not available for {ns.command} (use {', '.join(FORMATS[ns.command])})")
    conf["format"] = fmt
    if conf["tol"] is not None and not conf["tol"] > 0:
        raise UsageError("--tol must be positive")
    if conf["depth"] < 1:
        raise UsageError("--depth must be >= 1")
    return conf


def _params(conf) -> Params:
    if conf["a"] is None or conf["b"] is None:
        raise UsageError(f"{conf['command']} needs --a and --b")
    try:
        return Params(conf["a"], conf["b"])
    except LoziError as e:
        raise UsageError(str(e)) from None


def _pair(text: str, name: str) -> tuple[float, float]:
    try:
        lo, hi = (float(s) for s in str(text).split(","))
    except ValueError:
        raise UsageError(f"{name} must look like lo,hi") from None
    return lo, hi


def _curve_list(text: str) -> list[str]:
    text = str(text).replace(" ", "")
    if ".." in text:
        lo, hi = text.split("..")
        try:
            i, j = int(lo.lstrip("Cc")), int(hi.lstrip("Cc"))
        except ValueError:
            raise UsageError(f"bad curve range {text!r}") from None
        names = [f"C{k}" for k in range(i, j + 1)]
    else:
        names = [s.upper() for s in text.split(",") if s]
    for n in names:
        if n not in ENDPOINTS:
            raise UsageError(f"unknown curve {n} (known: {', '.join(ENDPOINTS)})")
    return names


# -- commands ---------------------------------------------------------------


def _arcs(params: Params, depth: int, max_vertices: int):
    """Stable and unstable arcs, backing off in depth when the vertex budget runs out."""
    meta = {"requested_depth": depth, "truncated": False}
    d = depth
    while True:
        try:
            U = unstable_arc(params, (d + 1) // 2, max_vertices)
            S = stable_arc(params, d, max_vertices)
            break
        except TruncationError as e:
            meta["truncated"] = True
            meta["truncation"] = str(e)
            d = min(d - 1, max(e.completed_depth, 0))
            if d < 1:
                raise
    meta["depth"] = d
    meta["unstable_vertices"] = len(U)
    meta["stable_vertices"] = len(S)
    return U, S, meta


def _arc_rows(arc: ManifoldArc):
    for k, (x, y) in enumerate(arc.line.vertices.tolist()):
        lab = arc.anchors.get(k)
        yield [x, y, "" if lab is None else str(lab), k in arc.breakpoints]


def _arc_json(arc: ManifoldArc) -> dict:
    return {
        "kind": arc.kind,
        "depth": arc.depth,
        "vertices": arc.line.vertices.tolist(),
        "anchors": {str(k): str(v) for k, v in sorted(arc.anchors.items())},
        "breakpoints": sorted(int(k) for k in arc.breakpoints),
    }


def _stem(conf, default: str) -> str:
    out = conf["out"] or default
    for ext in (".csv", ".json", ".svg"):
        if out.endswith(ext):
            return out[: -len(ext)]
    return out


def cmd_manifold(conf, stdout) -> int:
    params = _params(conf)
    U, S, meta = _arcs(params, conf["depth"], conf["max_vertices"])
    meta = {"a": params.a, "b": params.b, **meta}
    fmt = conf["format"]
    if fmt == "csv":
        stem = _stem(conf, "manifold")
        header = ["x", "y", "label", "breakpoint"]
        for arc, suffix in ((S, "stable"), (U, "unstable")):
            m = {**meta, "arc": suffix}
            _emit(f"{stem}_{suffix}.csv", write_csv(header, _arc_rows(arc), m), stdout)
    elif fmt == "json":
        doc = {"meta": meta, "stable": _arc_json(S), "unstable": _arc_json(U)}
        _emit(conf["out"], dump_json(doc), stdout)
    else:
        vp = _pair_list(conf["viewport"])
        anchors = []
        for arc in (S, U):
            for k, lab in sorted(arc.anchors.items()):
                x, y = arc.line.vertices[k]
                anchors.append((str(lab), float(x), float(y)))
        notes = [f"{k}={v}" for k, v in meta.items()]
        text = manifold_svg(S.line.vertices.tolist(), U.line.vertices.tolist(), anchors, vp, notes, __version__)
        _emit(conf["out"], text, stdout)
    return EXIT_OK


def _pair_list(text) -> tuple:
    try:
        vals = tuple(float(s) for s in str(text).split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4:
        raise UsageError("viewport must be xmin,xmax,ymin,ymax")
    return vals


def cmd_homoclinic(conf, stdout) -> int:
    params = quoted = _params(conf)
    depth, tol = conf["depth"], conf["tol"]
    if conf["on_curve"]:
        name = str(conf["on_curve"]).upper()
        if name not in CURVES:
            raise UsageError(f"no defining condition for {name}")
        spec = CURVES[name]
        coord = spec.sample_fix[0] if spec.sample_fix else ("a" if spec.sweep == "b" else "b")
        params = project_to_curve(spec.condition, quoted, coord, conf["snap_width"])
    fund = homoclinic_on_fundamental(params, depth, tol)
    rep = check_last_tangency(params, depth, tol)
    doc = {
        "a": params.a,
        "b": params.b,
        "quoted": None if params is quoted else {"a": quoted.a, "b": quoted.b, "curve": str(conf["on_curve"]).upper()},
        "depth": depth,
        "fundamental": {
            "has_homoclinic": bool(fund),
            "records": [r.as_dict() for r in fund],
        },
        "tangency": {
            "tol": rep.tol,
            "all_tangential": rep.all_tangential,
            "n_records": len(rep.records),
            "n_other": rep.n_other,
            "n_transversal": rep.n_transversal,
            "n_undetermined": rep.n_undetermined,
            "n_unstable_classification": rep.n_unstable,
            "records": [{**r.record.as_dict(), "orbit": r.orbit, "labels": list(r.labels)} for r in rep.records],
        },
    }
    _emit(conf["out"], dump_json(doc), stdout)
    return EXIT_OK


def cmd_trace(conf, stdout) -> int:
    name = conf["curve"].upper()
    if name not in CURVES:
        raise UsageError(f"no defining condition for {name} (traceable: {', '.join(CURVES)})")
    spec = CURVES[name]
    tol = conf["tol"] if conf["tol"] is not None else 1e-10
    lo = conf[f"{spec.sweep}_from"]
    hi = conf[f"{spec.sweep}_to"]
    other = "a" if spec.sweep == "b" else "b"
    if conf[f"{other}_from"] is not None or conf[f"{other}_to"] is not None:
        raise UsageError(f"{name} is swept in {spec.sweep}; use --{spec.sweep}-from/--{spec.sweep}-to")
    start = spec.start if lo is None else lo
    stop = spec.stop if hi is None else hi
    step = conf["step"] or abs(stop - start) / max(1, conf["samples"] - 1)
    if start == spec.start:
        bracket = spec.bracket
    else:
        # seed from the default trace at the nearest sample
        seed = trace_named(name, samples=conf["samples"], tol=tol)
        k = min(range(len(seed.samples)), key=lambda i: abs(seed.samples[i][1 if spec.sweep == "b" else 0] - start))
        x = seed.samples[k][0 if spec.sweep == "b" else 1]
        w = abs(spec.bracket[1] - spec.bracket[0]) / 4
        bracket = (x - w, x + w)
    tr = trace_curve(spec.condition, spec.sweep, start, stop, step, bracket, tol)
    n = int(name[1:])
    rows = [(a, b, r, table1_relative(n, a, b)) for (a, b), r in zip(tr.samples, tr.residuals)]
    meta = {
        "curve": name,
        "condition": str(spec.condition),
        "sweep": spec.sweep,
        "end_of_branch": tr.end_of_branch,
        "samples": len(rows),
    }
    if conf["format"] == "csv":
        text = write_csv(["a", "b", "residual", "table1_residual"], rows, meta)
    else:
        text = dump_json({**meta, "rows": [dict(zip(("a", "b", "residual", "table1_residual"), r)) for r in rows]})
    _emit(conf["out"], text, stdout)
    return EXIT_OK


def cmd_endpoints(conf, stdout) -> int:
    names = _curve_list(conf["curves"])
    ref = load_table2()
    tol = conf["tol"] if conf["tol"] is not None else 1e-9
    rows, worst = [], EXIT_OK
    for n in names:
        e = ENDPOINTS[n]
        a0, b0 = ref[n]
        try:
            a, b = solve_endpoint(e.cond1, e.cond2, e.box, tol, inner=e.inner)
        except LoziError as err:
            rows.append([n, None, None, None, None, f"error: {type(err).__name__}"])
            worst = max(worst, EXIT_COMPUTE)
            continue
        da, db = abs(a - a0), abs(b - b0)
        ok = da <= ENDPOINT_MATCH and db <= ENDPOINT_MATCH
        rows.append([n, a, b, da, db, "ok" if ok else "mismatch"])
        if not ok:
            worst = max(worst, EXIT_VERIFY)
    header = ["curve", "a_n", "b_n", "abs_da", "abs_db", "status"]
    if conf["format"] == "csv":
        text = write_csv(header, rows)
    else:
        text = dump_json({"match_tol": ENDPOINT_MATCH, "rows": [dict(zip(header, r)) for r in rows]})
    _emit(conf["out"], text, stdout)
    return worst


def _grid(text) -> tuple[int, int]:
    try:
        na, nb = (int(s) for s in str(text).lower().split("x"))
    except ValueError:
        raise UsageError("grid must look like 40x40") from None
    if na < 1 or nb < 1:
        raise UsageError("grid must be positive")
    return na, nb


def cmd_scan(conf, stdout) -> int:
    ar, br, grid = _pair(conf["a_range"], "--a-range"), _pair(conf["b_range"], "--b-range"), _grid(conf["grid"])
    try:
        Params(ar[0], br[0]), Params(ar[1], br[1])
    except LoziError as e:
        raise UsageError(f"scan corners must lie in the main region: {e}") from None
    res = scan_region(ar, br, grid, conf["depth"], conf["tol"], conf["workers"])
    val = {True: "1", False: "0", None: "unknown"}
    rows = [
        [float(a), float(b), val[res.cells[j][i]]]
        for j, b in enumerate(res.b_values)
        for i, a in enumerate(res.a_values)
    ]
    overlays = []
    svg_path = conf["svg"]
    fmt = conf["format"]
    if fmt == "svg" or svg_path:
        if conf["overlay"]:
            for n in CURVES:
                tr = trace_named(n, samples=40)
                overlays.append((n, tr.samples))
        svg_text = raster_svg(res.a_values.tolist(), res.b_values.tolist(), res.cells, overlays, __version__)
    if fmt == "svg":
        _emit(conf["out"], svg_text, stdout)
    else:
        meta = {"depth": conf["depth"], "grid": f"{grid[0]}x{grid[1]}", "unknown_cells": len(res.errors)}
        if fmt == "csv":
            text = write_csv(["a", "b", "homoclinic"], rows, meta)
        else:
            text = dump_json({**meta, "a": res.a_values.tolist(), "b": res.b_values.tolist(),
                              "cells": res.as_array().tolist(),
                              "errors": {f"{j},{i}": e for (j, i), e in sorted(res.errors.items())}})
        _emit(conf["out"], text, stdout)
        if svg_path:
            _emit(svg_path, svg_text, stdout)
    return EXIT_COMPUTE if res.errors else EXIT_OK


def verify_tables(table: str = "all", samples: int = 60) -> list[dict]:
    """One result per check: curve-table residuals along traces, then endpoints."""
    out = []
    if table in ("1", "all"):
        for n in CURVES:
            try:
                tr = trace_named(n, samples=samples)
                worst = max(tr.table1_residuals) if tr.samples else math.inf
                out.append({"check": f"table1 {n}", "value": worst, "limit": TABLE1_MATCH,
                            "samples": len(tr.samples), "pass": worst < TABLE1_MATCH})
            except LoziError as e:
                out.append({"check": f"table1 {n}", "value": None, "limit": TABLE1_MATCH,
                            "error": str(e), "pass": False})
    if table in ("2", "all"):
        ref = load_table2()
        for n, e in ENDPOINTS.items():
            try:
                a, b = solve_endpoint(e.cond1, e.cond2, e.box, inner=e.inner)
                dev = max(abs(a - ref[n][0]), abs(b - ref[n][1]))
                out.append({"check": f"table2 {n}", "value": dev, "limit": ENDPOINT_MATCH,
                            "pass": dev <= ENDPOINT_MATCH})
            except LoziError as err:
                out.append({"check": f"table2 {n}", "value": None, "limit": ENDPOINT_MATCH,
                            "error": str(err), "pass": False})
    return out


def cmd_verify_tables(conf, stdout) -> int:
    table = str(conf["table"]).lower()
    if table not in ("1", "2", "all"):
        raise UsageError("--table must be 1, 2 or all")
    results = verify_tables(table, conf["samples"])
    if conf["format"] == "json":
        text = dump_json({"results": results, "pass": all(r["pass"] for r in results)})
    else:
        lines = []
        for r in results:
            v = "n/a" if r["value"] is None else f"{r['value']:.3e}"
            extra = f"  ({r['error']})" if "error" in r else ""
            lines.append(f"{'PASS' if r['pass'] else 'FAIL'}  {r['check']:<10} max deviation {v} (limit {r['limit']:.0e}){extra}")
        n_pass = sum(r["pass"] for r in results)
        lines.append(f"{n_pass}/{len(results)} checks passed")
        text = "\n".join(lines) + "\n"
    _emit(conf["out"], text, stdout)
    return EXIT_OK if all(r["pass"] for r in results) else EXIT_VERIFY


COMMANDS = {
    "manifold": cmd_manifold,
    "homoclinic": cmd_homoclinic,
    "trace": cmd_trace,
    "endpoints": cmd_endpoints,
    "scan": cmd_scan,
    "verify-tables": cmd_verify_tables,
}


# -- argument parsing -------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps unset flags out of the namespace so config values survive
    S = argparse.SUPPRESS
    p.add_argument("--tol", default=S, help="geometric or solver tolerance")
    p.add_argument("--depth", default=S, help="number of map applications (default 8)")
    p.add_argument("--out", default=S, help="output path or stem; '-' or absent writes to stdout")
    p.add_argument("--format", default=S, help="csv, json, svg or text depending on the command")
    p.add_argument("--config", default=S, help="flat key=value file")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    p = _Parser(prog="lozihom", description="Manifolds, homoclinic tangencies and boundary curves of the Lozi map.")
    p.add_argument("--version", action="version", version=f"lozihom {__version__}")
    _global_flags(p)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        _global_flags(sp)
        return sp

    sp = add("manifold", "export stable and unstable arcs")
    sp.add_argument("--a", default=S)
    sp.add_argument("--b", default=S)
    sp.add_argument("--max-vertices", dest="max_vertices", default=S)
    sp.add_argument("--viewport", default=S, help="xmin,xmax,ymin,ymax for svg")

    sp = add("homoclinic", "homoclinic points and last-tangency report")
    sp.add_argument("--a", default=S)
    sp.add_argument("--b", default=S)
    sp.add_argument("--on-curve", dest="on_curve", default=S,
                    help="first move (a, b) onto this boundary curve (quoted pairs are rounded)")
    sp.add_argument("--snap-width", dest="snap_width", default=S, help="largest move allowed by --on-curve")

    sp = add("trace", "follow one boundary curve")
    sp.add_argument("--curve", default=S)
    for k in ("a-from", "a-to", "b-from", "b-to"):
        sp.add_argument(f"--{k}", dest=k.replace("-", "_"), default=S)
    sp.add_argument("--step", default=S)
    sp.add_argument("--samples", default=S)

    sp = add("endpoints", "solve curve corner points and compare with the reference table")
    sp.add_argument("--curves", default=S, help="C1..C6 or C1,C3")

    sp = add("scan", "rasterise the homoclinic region")
    sp.add_argument("--a-range", dest="a_range", default=S)
    sp.add_argument("--b-range", dest="b_range", default=S)
    sp.add_argument("--grid", default=S)
    sp.add_argument("--workers", default=S)
    sp.add_argument("--svg", default=S, help="also write an svg raster here")
    sp.add_argument("--overlay", action="store_const", const=True, default=S, help="draw traced curves on the svg")

    sp = add("verify-tables", "check the algebraic curve table and the endpoint table")
    sp.add_argument("--table", default=S)
    sp.add_argument("--samples", default=S)
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if not ns.command:
            raise UsageError("a command is required")
        conf = resolve(ns)
        return COMMANDS[ns.command](conf, stdout)
    except UsageError as e:
        stderr.write(f"lozihom: usage error: {e}\n")
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    except LoziError as e:
        stderr.write(f"lozihom: {type(e).__name__}: {e}\n")
        return EXIT_COMPUTE
    except OSError as e:
        stderr.write(f"lozihom: {e}\n")
        return EXIT_COMPUTE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
