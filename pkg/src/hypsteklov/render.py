"""Plain SVG renderings of tilings, subgraphs, domains and sample sets in the Poincare disk."""
from __future__ import annotations

import numpy as np

from .domain import DomainModel
from .graphcore import GraphWithBoundary
from .hypgeo import geodesic_circle
from .tiling import HostGraph, Tiling

SIZE = 800.0


def _xy(z: complex) -> tuple[float, float]:
    # unit disk -> viewport, y pointing down
    h = SIZE / 2.0
    return h + h * z.real, h - h * z.imag


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _arc_to(p: complex, q: complex) -> str:
    """SVG path command drawing the geodesic from p to q (the pen is at p)."""
    x, y = _xy(q)
    circ = geodesic_circle(p, q) if abs(p - q) > 1e-12 else None
    if circ is None:
        return f"L {_fmt(x)} {_fmt(y)}"
    c, r = circ
    cross = ((p - c).conjugate() * (q - c)).imag
    # the y flip keeps the picture's orientation, and SVG sweep 1 is clockwise as seen
    sweep = 0 if cross > 0 else 1
    rr = r * SIZE / 2.0
    return f"A {_fmt(rr)} {_fmt(rr)} 0 0 {sweep} {_fmt(x)} {_fmt(y)}"


def polygon_path(zs) -> str:
    zs = [complex(z) for z in zs]
    x, y = _xy(zs[0])
    parts = [f"M {_fmt(x)} {_fmt(y)}"]
    for a, b in zip(zs, zs[1:] + zs[:1]):
        parts.append(_arc_to(a, b))
    parts.append("Z")
    return " ".join(parts)


def polyline_path(zs, closed: bool = False) -> str:
    pts = [_xy(complex(z)) for z in zs]
    s = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in pts)
    return s + (" Z" if closed else "")


class SvgCanvas:
    def __init__(self, size: float = SIZE):
        self.size = size
        self.items: list[str] = []
        h = size / 2.0
        self.items.append(f'<circle cx="{_fmt(h)}" cy="{_fmt(h)}" r="{_fmt(h)}" fill="none" stroke="#000" stroke-width="1"/>')

    def path(self, d: str, fill: str = "none", stroke: str = "#000", width: float = 0.5, opacity: float = 1.0):
        self.items.append(f'<path d="{d}" fill="{fill}" fill-opacity="{opacity}" stroke="{stroke}" stroke-width="{width}"/>')

    def circle(self, center: complex, radius: float, fill: str = "none", stroke: str = "#000", width: float = 0.5):
        x, y = _xy(center)
        self.items.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(radius * self.size / 2.0)}" '
                          f'fill="{fill}" stroke="{stroke}" stroke-width="{width}"/>')

    def dot(self, z: complex, r: float = 1.5, fill: str = "#000"):
        x, y = _xy(z)
        self.items.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" fill="{fill}"/>')

    def cross(self, z: complex, s: float = 3.0, stroke: str = "#c00"):
        x, y = _xy(z)
        self.items.append(f'<path d="M {_fmt(x - s)} {_fmt(y - s)} L {_fmt(x + s)} {_fmt(y + s)} '
                          f'M {_fmt(x - s)} {_fmt(y + s)} L {_fmt(x + s)} {_fmt(y - s)}" stroke="{stroke}" stroke-width="1"/>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(self.size)}" height="{_fmt(self.size)}" '
                f'viewBox="0 0 {_fmt(self.size)} {_fmt(self.size)}">')
        return "\n".join([head, *self.items, "</svg>"]) + "\n"


def draw_tiling(canvas: SvgCanvas, t: Tiling, fill_depth: bool = False) -> None:
    for tile in t.tiles:
        fill = "#ddd" if (fill_depth and tile.depth % 2) else "none"
        canvas.path(polygon_path(tile.triangle.zs), fill=fill, stroke="#888", width=0.4)


def draw_graph(canvas: SvgCanvas, G: GraphWithBoundary, host: HostGraph) -> None:
    pos = host.positions
    for a, b in G.edges:
        za, zb = pos[G.host_ids[a]], pos[G.host_ids[b]]
        x, y = _xy(za)
        canvas.path(f"M {_fmt(x)} {_fmt(y)} " + _arc_to(za, zb), stroke="#246", width=0.8)
    for i, h in enumerate(G.host_ids):
        if G.is_boundary(i):
            canvas.cross(pos[h])
        else:
            canvas.dot(pos[h], fill="#246")


def draw_domain(canvas: SvgCanvas, D: DomainModel) -> None:
    colors = {"triangle": "#9cf", "quad": "#fc9", "gon": "#9f9"}
    for p in D.pieces:
        canvas.path(polygon_path(p.vertices), fill=colors[p.kind], stroke="none", opacity=0.8)
    for c in D.curves:
        if c.kind == "circle":
            ec, er = c.primitives[0].circle.euclidean()
            canvas.circle(ec, er, fill="#fff", stroke="#000", width=0.7)
            continue
        pts = np.concatenate([prim.points(np.linspace(0, 1, 12, endpoint=False)) for prim in c.primitives])
        canvas.path(polyline_path(pts, closed=True), stroke="#000", width=0.7)


def draw_samples(canvas: SvgCanvas, dg) -> None:
    for z in dg.interior:
        canvas.dot(complex(z), r=0.6, fill="#06c")
    for z in dg.boundary:
        canvas.dot(complex(z), r=0.8, fill="#c00")


def tiling_svg(t: Tiling, host: HostGraph | None = None, G: GraphWithBoundary | None = None) -> str:
    c = SvgCanvas()
    draw_tiling(c, t, fill_depth=True)
    if G is not None and host is not None:
        draw_graph(c, G, host)
    return c.render()


def domain_svg(D: DomainModel, dg=None, show_tiling: bool = True) -> str:
    c = SvgCanvas()
    if show_tiling:
        draw_tiling(c, D.host.tiling)
    draw_domain(c, D)
    if dg is not None:
        draw_samples(c, dg)
    draw_graph(c, D.graph, D.host)
    return c.render()
