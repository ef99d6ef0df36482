"""Deterministic artifact output: JSON, CSV and gnuplot scripts.

Floats are always rendered with 17 significant digits so identical runs
produce byte-identical files; no timestamps or machine identifiers are ever
embedded.  Every JSON artifact carries the resolved configuration it was
produced from.
"""

from __future__ import annotations

import math


def fmt(x) -> str:
    """17-significant-digit rendering of a float (round-trip exact)."""
    if isinstance(x, float) and not math.isfinite(x):
        return '"%s"' % repr(x)
    return format(float(x), ".17g")


def _json_fragment(obj, indent: int) -> str:
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt(obj)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f'{pad_in}"{k}": {_json_fragment(v, indent + 1)}'
                 for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = (pad_in + _json_fragment(v, indent + 1) for v in obj)
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def json_dumps(obj) -> str:
    """JSON with fixed float formatting and the dict's own key order."""
    return _json_fragment(obj, 0) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        fh.write(json_dumps(obj))


def write_csv(path, header, rows) -> None:
    """CSV with a header row; floats at 17 significant digits."""

    def cell(v):
        if isinstance(v, float):
            return format(v, ".17g")
        return str(v)

    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(cell(v) for v in row) + "\n")


def curve_to_csv(curve, path) -> None:
    write_csv(path, ["lambda", "mass", "a0", "energy"],
              [(s.lam, s.mass, s.height, s.energy) for s in curve.samples])


def region_to_csv(table, path) -> None:
    write_csv(path, ["p", "k", "s", "in_region", "c1", "c2", "c3", "overall"],
              [(r.p, r.k, r.s, int(r.in_region), r.c1, r.c2, r.c3, r.overall)
               for r in table.rows])


def write_plot_script(path, csv_name, *, title, xlabel, ylabel,
                      using="1:2", logx=False, logy=False) -> None:
    """Gnuplot script referencing a CSV produced alongside it."""
    lines = [
        "set datafile separator ','",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        "set key off",
        "set grid",
    ]
    if logx:
        lines.append("set logscale x")
    if logy:
        lines.append("set logscale y")
    lines.append(f"plot '{csv_name}' using {using} skip 1 with linespoints pt 7 ps 0.4")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
