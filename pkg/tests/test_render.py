import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from hypsteklov.discretize import build_discretization
from hypsteklov.domain import build_domain
from hypsteklov.graphcore import ball_subgraph
from hypsteklov.hypgeo import geodesic_circle
from hypsteklov.render import SIZE, _arc_to, _xy, domain_svg, tiling_svg
from hypsteklov.tiling import generate_tiling


def test_tiling_svg_parses():
    t = generate_tiling(2, 3, 7, 3)
    root = ET.fromstring(tiling_svg(t))
    assert root.tag.endswith("svg")
    assert len(root.findall("{http://www.w3.org/2000/svg}path")) == len(t.tiles)


def test_domain_svg_parses(host237):
    G = ball_subgraph(host237, 0, 1)
    D = build_domain(G, host237)
    dg = build_discretization(D, D.constants.epsilon_max / 2)
    root = ET.fromstring(domain_svg(D, dg))
    assert len(list(root)) > len(D.pieces)


@pytest.mark.parametrize("p,q", [(0.1 + 0.2j, 0.5 - 0.1j), (0.5 - 0.1j, 0.1 + 0.2j), (-0.3 + 0.6j, 0.4 + 0.4j),
                                 (0.4 + 0.4j, -0.3 + 0.6j)])
def test_arc_sweep_matches_geometry(p, q):
    """The SVG arc must bulge toward the side where the geodesic actually lies."""
    cmd = _arc_to(p, q)
    m = re.match(r"A (\S+) \S+ 0 0 (\d) (\S+) (\S+)", cmd)
    assert m
    rr, sweep = float(m.group(1)), int(m.group(2))
    # reconstruct the two candidate circle centers on screen and pick the one the sweep selects
    (x0, y0), (x1, y1) = _xy(p), _xy(q)
    mx, my = (x0 + x1) / 2, (y0 + y1) / 2
    dx, dy = x1 - x0, y1 - y0
    half = np.hypot(dx, dy) / 2
    h = np.sqrt(max(rr * rr - half * half, 0.0))
    nx, ny = -dy / (2 * half), dx / (2 * half)
    cands = [(mx + h * nx, my + h * ny), (mx - h * nx, my - h * ny)]

    def sweep_of(c):
        # SVG sweep=1 is clockwise on screen (y down), i.e. positive cross product in screen coords
        cross = (x0 - c[0]) * (y1 - c[1]) - (y0 - c[1]) * (x1 - c[0])
        return 1 if cross > 0 else 0

    chosen = [c for c in cands if sweep_of(c) == sweep]
    c, r = geodesic_circle(p, q)
    true = _xy(c)
    assert np.hypot(chosen[0][0] - true[0], chosen[0][1] - true[1]) < 1e-2 * SIZE
