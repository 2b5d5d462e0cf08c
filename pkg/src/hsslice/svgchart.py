"""Deterministic SVG charts of spectral sequence pages.

x is the stem and y the filtration.  One or two classes in a bidegree are
drawn as dots, three or more as a labelled rectangle.  Arrows are drawn only
for differentials recorded in the page dump.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

CELL = 22
MARGIN = 44
DOT = 3.5
LINE_COLOURS = {"rho*v1": "#8b4513", "rho^3*v2": "#1f6fb2", "rho^7*v3": "#2e8b57"}


@dataclass
class ChartSpec:
    page: str | None = None       # page name, default the last page of the dump
    weight: int = 0               # motivic weight, or the fixed b for RO-graded dumps
    vanishing_lines: bool = False
    structure_lines: bool = False
    x_range: tuple[int, int] | None = None
    y_range: tuple[int, int] | None = None


class ChartError(ValueError):
    pass


def select_page(dump: dict, name: str | None) -> dict:
    pages = dump.get("pages", [])
    if not pages:
        raise ChartError("the dump has no pages")
    if name is None:
        return pages[-1]
    for p in pages:
        if p["page"] == name:
            return p
    raise ChartError(f"no page {name!r}; available: {', '.join(p['page'] for p in pages)}")


def _points(page: dict, weight: int) -> dict[tuple[int, int], dict]:
    """(stem, filtration) -> {dim, d_rank} for one weight (or one fixed b)."""
    out: dict[tuple[int, int], dict] = {}
    for c in page.get("classes", page.get("degrees", [])):
        if "stem" in c:
            if c["weight"] != weight:
                continue
            key = (c["stem"], c["filtration"])
        else:
            if c["b"] != weight:
                continue
            key = (c["a"] + c["b"], c["s"])
        if c["dim"]:
            slot = out.setdefault(key, {"dim": 0, "d_rank": 0})
            slot["dim"] += c["dim"]
            slot["d_rank"] += c.get("d_rank", 0) or 0
    return out


def _fmt(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def render(dump: dict, spec: ChartSpec) -> str:
    page = select_page(dump, spec.page)
    pts = _points(page, spec.weight)
    r = page.get("r")
    if spec.x_range:
        x0, x1 = spec.x_range
    elif pts:
        x0, x1 = min(x for x, _ in pts), max(x for x, _ in pts)
    else:
        x0, x1 = 0, 8
    if spec.y_range:
        y0, y1 = spec.y_range
    elif pts:
        y0, y1 = min(y for _, y in pts), max(y for _, y in pts)
        if r:
            y1 = max(y1, max(y for _, y in pts) + r)
    else:
        y0, y1 = 0, 8
    x0, x1, y0, y1 = min(x0, 0), max(x1, x0 + 1), min(y0, 0), max(y1, y0 + 1)
    width = (x1 - x0) * CELL + 2 * MARGIN
    height = (y1 - y0) * CELL + 2 * MARGIN

    def X(x: float) -> str:
        return _fmt(MARGIN + (x - x0) * CELL)

    def Y(y: float) -> str:
        return _fmt(height - MARGIN - (y - y0) * CELL)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="9">',
           '<defs><marker id="arrow" markerWidth="6" markerHeight="6" refX="5" refY="3" '
           'orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#c0392b"/></marker></defs>',
           '<rect width="100%" height="100%" fill="white"/>']
    title = f"{dump.get('pipeline', '')} m={dump.get('m', '')} {page['page']} weight {spec.weight}".strip()
    out.append(f'<text x="{MARGIN}" y="16" font-size="12">{escape(title)}</text>')
    # grid and axes
    out.append('<g stroke="#e4e4e4" stroke-width="0.5">')
    for x in range(x0, x1 + 1):
        out.append(f'<line x1="{X(x)}" y1="{Y(y0)}" x2="{X(x)}" y2="{Y(y1)}"/>')
    for y in range(y0, y1 + 1):
        out.append(f'<line x1="{X(x0)}" y1="{Y(y)}" x2="{X(x1)}" y2="{Y(y)}"/>')
    out.append("</g>")
    out.append(f'<g stroke="black" stroke-width="1"><line x1="{X(x0)}" y1="{Y(y0)}" x2="{X(x1)}" '
               f'y2="{Y(y0)}"/><line x1="{X(x0)}" y1="{Y(y0)}" x2="{X(x0)}" y2="{Y(y1)}"/></g>')
    out.append('<g text-anchor="middle">')
    for x in range(x0, x1 + 1, 2):
        out.append(f'<text x="{X(x)}" y="{_fmt(float(Y(y0)) + 14)}">{x}</text>')
    out.append("</g>")
    out.append('<g text-anchor="end">')
    for y in range(y0, y1 + 1, 2):
        out.append(f'<text x="{_fmt(float(X(x0)) - 6)}" y="{_fmt(float(Y(y)) + 3)}">{y}</text>')
    out.append("</g>")
    if spec.vanishing_lines:
        lo, hi = max(x0, y0, -y1), min(x1, y1, -y0)
        out.append('<g stroke="#999" stroke-dasharray="4 3" stroke-width="0.8">')
        a, b = max(x0, y0), min(x1, y1)
        if a < b:
            out.append(f'<line x1="{X(a)}" y1="{Y(a)}" x2="{X(b)}" y2="{Y(b)}"/>')
        if lo < hi:
            out.append(f'<line x1="{X(lo)}" y1="{Y(-lo)}" x2="{X(hi)}" y2="{Y(-hi)}"/>')
        out.append("</g>")
    if spec.structure_lines:
        out.append('<g stroke-width="0.9">')
        for line in dump.get("structure_lines", []):
            if line.get("page") != page["page"]:
                continue
            s, t = line["source"], line["target"]
            if s[1] != spec.weight or t[1] != spec.weight:
                continue
            colour = LINE_COLOURS.get(line["element"], "#555")
            out.append(f'<line x1="{X(s[0])}" y1="{Y(s[2])}" x2="{X(t[0])}" y2="{Y(t[2])}" '
                       f'stroke="{colour}"/>')
        out.append("</g>")
    if r:
        out.append('<g stroke="#c0392b" stroke-width="0.9" marker-end="url(#arrow)">')
        for (x, y), slot in sorted(pts.items()):
            if slot["d_rank"]:
                out.append(f'<line x1="{X(x)}" y1="{Y(y)}" x2="{X(x - 1)}" y2="{Y(y + r)}"/>')
        out.append("</g>")
    out.append("<g>")
    for (x, y), slot in sorted(pts.items()):
        n = slot["dim"]
        if n >= 3:
            w = CELL * 0.7
            out.append(f'<rect x="{_fmt(float(X(x)) - w / 2)}" y="{_fmt(float(Y(y)) - 6)}" width="{_fmt(w)}" '
                       f'height="12" fill="white" stroke="black" stroke-width="0.8"/>')
            out.append(f'<text x="{X(x)}" y="{_fmt(float(Y(y)) + 3)}" text-anchor="middle">{n}</text>')
        else:
            offsets = [0.0] if n == 1 else [-4.0, 4.0]
            for dx in offsets:
                out.append(f'<circle cx="{_fmt(float(X(x)) + dx)}" cy="{Y(y)}" r="{_fmt(DOT)}" fill="black"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
