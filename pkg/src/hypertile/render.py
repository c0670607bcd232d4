"""SVG drawings of realized patches in the Poincare disk.

Each edge is the arc of the circle through its endpoints that meets the unit
circle at right angles, or a straight segment when that circle degenerates
into a diameter. Output is a pure function of its input, so repeated renders
are byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import Realization

PALETTE = (
    "#e6b33c", "#4c8cb5", "#d1604f", "#6aa56a", "#9b6fb8", "#d38ab4",
    "#6cc0c0", "#b38b5d", "#8f9a3e", "#c0c0c0",
)


@dataclass(frozen=True)
class SvgStyle:
    size: int = 800
    stroke: str = "#202020"
    stroke_width: float = 0.6
    background: str = "#ffffff"
    palette: tuple = PALETTE
    fill_faces: bool = True
    extra_colors: dict = field(default_factory=dict)  # face size -> color


def _fmt(x: float) -> str:
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def geodesic_circle(p: complex, q: complex, eps: float = 1e-12):
    """Center and radius of the circle orthogonal to the unit circle through
    p and q, or None when p, q and the origin are collinear."""
    det = p.real * q.imag - p.imag * q.real
    if abs(det) < eps:
        return None
    a = (abs(p) ** 2 + 1) / 2
    b = (abs(q) ** 2 + 1) / 2
    cx = (a * q.imag - b * p.imag) / det
    cy = (b * p.real - a * q.real) / det
    c = complex(cx, cy)
    return c, math.sqrt(max(abs(c) ** 2 - 1, 0.0))


class _Canvas:
    def __init__(self, size: int):
        self.half = size / 2
        self.scale = size / 2 - 4

    def xy(self, z: complex) -> str:
        return f"{_fmt(self.half + self.scale * z.real)},{_fmt(self.half - self.scale * z.imag)}"

    def segment(self, p: complex, q: complex) -> str:
        """Path command from p (current point) to q along the geodesic."""
        circ = geodesic_circle(p, q)
        if circ is None:
            return f"L{self.xy(q)}"
        c, r = circ
        cross = (p - c).real * (q - c).imag - (p - c).imag * (q - c).real
        # y is flipped on screen, so a counterclockwise arc becomes sweep 1
        sweep = 1 if cross > 0 else 0
        rs = _fmt(self.scale * r)
        return f"A{rs},{rs} 0 0 {sweep} {self.xy(q)}"


def face_colors(sizes, style: SvgStyle) -> dict:
    out = {}
    for i, k in enumerate(sorted(set(sizes))):
        out[k] = style.extra_colors.get(k, style.palette[i % len(style.palette)])
    return out


def render_svg(r: Realization, style: SvgStyle | None = None) -> str:
    style = style or SvgStyle()
    cv = _Canvas(style.size)
    pos = r.positions
    faces = r.faces
    colors = face_colors([len(c) for c in faces], style)
    n = style.size
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{n}" height="{n}" viewBox="0 0 {n} {n}">',
        f'<rect width="{n}" height="{n}" fill="{style.background}"/>',
        f'<circle cx="{_fmt(cv.half)}" cy="{_fmt(cv.half)}" r="{_fmt(cv.scale)}" fill="none" stroke="{style.stroke}" stroke-width="1"/>',
    ]
    if faces:
        out.append(f'<g stroke="{style.stroke}" stroke-width="{_fmt(style.stroke_width)}" stroke-linejoin="round">')
        for cyc in faces:
            pts = [pos[v] for v in cyc]
            d = [f"M{cv.xy(pts[0])}"]
            for i in range(len(pts)):
                d.append(cv.segment(pts[i], pts[(i + 1) % len(pts)]))
            d.append("Z")
            fill = colors[len(cyc)] if style.fill_faces else "none"
            out.append(f'<path d="{"".join(d)}" fill="{fill}" data-size="{len(cyc)}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_map(m, style: SvgStyle | None = None, ell=None) -> str:
    """Realize a map and render it."""
    from .geometry import realize

    return render_svg(realize(m, ell), style)
