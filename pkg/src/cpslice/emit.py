"""Deterministic chart output: JSON (canonical), SVG and ASCII.

Total degree ``x`` runs horizontally and filtration ``s`` vertically.
Classes whose Mackey functor vanishes are omitted unless ``keep_zero`` is
set; ids are preserved so differentials and extensions still resolve.
"""

from __future__ import annotations

import json
from html import escape

from .chart import Chart
from .mackey import describe_mackey


def _visible(chart: Chart, keep_zero: bool) -> list:
    return [c for c in chart.classes if keep_zero or not c.is_zero]


def chart_to_dict(chart: Chart, keep_zero: bool = False) -> dict:
    n, k = chart.case
    classes = []
    for c in _visible(chart, keep_zero):
        d = describe_mackey(c.mackey)
        e = describe_mackey(chart.e_infty[c.id].mackey) if chart.e_infty else d
        classes.append({
            "id": c.id, "x": c.x, "s": c.s, "t": c.t, "symbol": c.symbol, "origin": c.origin,
            "group_fixed": d["fixed"], "group_underlying": d["underlying"],
            "e_infty_fixed": e["fixed"], "e_infty_underlying": e["underlying"],
        })
    return {
        "p": chart.p,
        "V": str(chart.V),
        "coefficient": chart.M.name or "M",
        "case": {"n": str(n), "k": k},
        "classes": classes,
        "differentials": [{"r": d.r, "source": d.source, "target": d.target}
                          for d in chart.differentials],
        "extensions": [list(e.members) for e in chart.extensions],
    }


def emit_json(chart: Chart, keep_zero: bool = False) -> str:
    return json.dumps(chart_to_dict(chart, keep_zero), indent=2, ensure_ascii=False,
                      sort_keys=True) + "\n"


def _bounds(classes) -> tuple:
    if not classes:
        return 0, 0, 0, 0
    xs = [c.x for c in classes]
    ss = [c.s for c in classes]
    return min(xs), max(xs), min(ss), max(ss)


def emit_svg(chart: Chart, pitch: int = 48, keep_zero: bool = False) -> str:
    """Self-contained SVG; one grid unit is ``pitch`` pixels."""
    classes = _visible(chart, keep_zero)
    x0, x1, s0, s1 = _bounds(classes)
    margin = pitch
    width = (x1 - x0) * pitch + 2 * margin
    height = (s1 - s0) * pitch + 2 * margin

    def px(x, s):
        return margin + (x - x0) * pitch, margin + (s1 - s) * pitch

    # several classes on one grid point are fanned out horizontally
    slots = {}
    for c in classes:
        slots.setdefault((c.x, c.s), []).append(c.id)
    pos = {}
    for (x, s), ids in slots.items():
        cx, cy = px(x, s)
        for i, cid in enumerate(ids):
            pos[cid] = (cx + (i - (len(ids) - 1) / 2) * pitch * 0.3, cy)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" '
           'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#000"/></marker></defs>',
           '<g stroke="#ddd" stroke-width="1">']
    for x in range(x0, x1 + 1):
        a, top = px(x, s1)
        _, bot = px(x, s0)
        out.append(f'<line x1="{a}" y1="{top}" x2="{a}" y2="{bot}"/>')
    for s in range(s0, s1 + 1):
        left, b = px(x0, s)
        right, _ = px(x1, s)
        out.append(f'<line x1="{left}" y1="{b}" x2="{right}" y2="{b}"/>')
    out.append('</g>')
    out.append('<g font-family="serif" font-size="10" fill="#555" text-anchor="middle">')
    for x in range(x0, x1 + 1):
        a, b = px(x, s0)
        out.append(f'<text x="{a}" y="{b + pitch * 0.6:g}">{x}</text>')
    for s in range(s0, s1 + 1):
        a, b = px(x0, s)
        out.append(f'<text x="{a - pitch * 0.6:g}" y="{b}">{s}</text>')
    out.append('</g>')
    out.append('<g stroke="#000" stroke-width="1.5">')
    for e in chart.extensions:
        if all(i in pos for i in e.members):
            (ax, ay), (bx, by) = pos[e.members[0]], pos[e.members[-1]]
            out.append(f'<line class="extension" x1="{ax:g}" y1="{ay:g}" x2="{bx:g}" y2="{by:g}"/>')
    for d in chart.differentials:
        if d.source in pos and d.target in pos:
            (ax, ay), (bx, by) = pos[d.source], pos[d.target]
            out.append(f'<line class="differential" x1="{ax:g}" y1="{ay:g}" x2="{bx:g}" '
                       f'y2="{by:g}" marker-end="url(#arrow)"/>')
    out.append('</g>')
    out.append('<g font-family="serif" font-size="14" text-anchor="middle">')
    for c in classes:
        a, b = pos[c.id]
        out.append(f'<text class="class" x="{a:g}" y="{b + 5:g}" fill="#000" stroke="#fff" '
                   f'stroke-width="3" paint-order="stroke">{escape(c.symbol)}</text>')
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def emit_ascii(chart: Chart, keep_zero: bool = False) -> str:
    classes = _visible(chart, keep_zero)
    header = f"p={chart.p}  V={chart.V}  M={chart.M.name or 'M'}"
    if not classes:
        return header + "\n(empty)\n"
    x0, x1, s0, s1 = _bounds(classes)
    cells = {}
    for c in classes:
        cells.setdefault((c.x, c.s), []).append(c.symbol)
    width = max(4, max(len(",".join(v)) for v in cells.values()) + 1)
    lines = [header]
    for s in range(s1, s0 - 1, -1):
        row = "".join(",".join(cells.get((x, s), [])).ljust(width) for x in range(x0, x1 + 1))
        lines.append(f"{s:>4} | {row.rstrip()}")
    lines.append("     +" + "-" * (width * (x1 - x0 + 1)))
    lines.append("       " + "".join(str(x).ljust(width) for x in range(x0, x1 + 1)).rstrip())
    for d in chart.differentials:
        a, b = chart.cls(d.source), chart.cls(d.target)
        lines.append(f"d{d.r}: {a.symbol}@({a.x},{a.s}) -> {b.symbol}@({b.x},{b.s})")
    for e in chart.extensions:
        lines.append("extension: " + " < ".join(
            f"{chart.cls(i).symbol}@({chart.cls(i).x},{chart.cls(i).s})" for i in e.members))
    return "\n".join(lines) + "\n"
