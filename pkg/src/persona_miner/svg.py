"""Deterministic SVG renderers: cluster scatter plots and archetype path
diagrams. Byte output depends only on the inputs, so rendered files can be
hashed and diffed in tests."""

from __future__ import annotations

import math

import numpy as np

from .seqmine import PersonaReport

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
]
NOISE_COLOR = "#999999"
BRANCH_COLOR = "#9b59b6"


def _f(v: float) -> str:
    return f"{v:.3f}"


def render_cluster_scatter(points: np.ndarray, labels, width: int = 820,
                           height: int = 520) -> str:
    """Colored 2-D scatter with a legend of cluster id -> point count."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError(f"scatter input must be n x 2, got shape {points.shape}")
    labels = [int(v) for v in labels]
    if len(labels) != len(points):
        raise ValueError("labels must align with points")

    x0, y0, plot_w, plot_h = 40.0, 20.0, width - 220.0, height - 60.0
    xmin, xmax = float(points[:, 0].min()), float(points[:, 0].max())
    ymin, ymax = float(points[:, 1].min()), float(points[:, 1].max())

    def sx(x: float) -> float:
        if xmax == xmin:
            return x0 + plot_w / 2
        return x0 + (x - xmin) / (xmax - xmin) * plot_w

    def sy(y: float) -> float:
        if ymax == ymin:
            return y0 + plot_h / 2
        return y0 + (ymax - y) / (ymax - ymin) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(plot_w)}" height="{_f(plot_h)}" '
        'fill="none" stroke="#cccccc"/>',
    ]
    for (x, y), lab in zip(points, labels):
        color = NOISE_COLOR if lab < 0 else PALETTE[lab % len(PALETTE)]
        out.append(f'<circle class="pt" data-label="{lab}" cx="{_f(sx(float(x)))}" '
                   f'cy="{_f(sy(float(y)))}" r="3" fill="{color}"/>')

    counts: dict[int, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    ly = y0 + 10
    lx = x0 + plot_w + 20
    for lab in sorted(counts):
        color = NOISE_COLOR if lab < 0 else PALETTE[lab % len(PALETTE)]
        name = "noise" if lab < 0 else f"cluster {lab}"
        out.append(f'<rect class="legend-swatch" x="{_f(lx)}" y="{_f(ly - 9)}" '
                   f'width="10" height="10" fill="{color}"/>')
        out.append(f'<text class="legend" x="{_f(lx + 16)}" y="{_f(ly)}" '
                   f'font-size="12" font-family="sans-serif">{name}: {counts[lab]}</text>')
        ly += 18
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_path_diagram(report: PersonaReport, width: int = 640,
                        height: int = 560) -> str:
    """Nodes for every cluster on an archetype; one thick colored arrow chain
    per archetype, thin arrows for branches."""
    nodes = sorted({c for a in report.archetypes for c in a.items}
                   | {t for b in report.branches for t, _n in b.targets})
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    if not report.archetypes:
        out.append(f'<text x="{width / 2:.0f}" y="{height / 2:.0f}" text-anchor="middle" '
                   'font-size="16" font-family="sans-serif">no archetypes to display</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    cx, cy, radius = width / 2, height / 2 - 20, min(width, height) / 2 - 80
    pos = {}
    for i, node in enumerate(nodes):
        angle = -math.pi / 2 + 2 * math.pi * i / len(nodes)
        pos[node] = (cx + radius * math.cos(angle), cy + radius * math.sin(angle))

    def arrow(a: int, b: int, color: str, width_px: float, cls: str, offset: float) -> str:
        (xa, ya), (xb, yb) = pos[a], pos[b]
        dx, dy = xb - xa, yb - ya
        norm = math.hypot(dx, dy) or 1.0
        ux, uy = dx / norm, dy / norm
        px, py = -uy * offset, ux * offset
        # trim to the node circles, leave room for the arrowhead
        xa, ya = xa + ux * 22 + px, ya + uy * 22 + py
        xb, yb = xb - ux * 26 + px, yb - uy * 26 + py
        head = (f'{_f(xb)},{_f(yb)} {_f(xb - ux * 9 + uy * 4)},'
                f'{_f(yb - uy * 9 - ux * 4)} {_f(xb - ux * 9 - uy * 4)},'
                f'{_f(yb - uy * 9 + ux * 4)}')
        return (f'<line class="arrow {cls}" x1="{_f(xa)}" y1="{_f(ya)}" '
                f'x2="{_f(xb)}" y2="{_f(yb)}" stroke="{color}" '
                f'stroke-width="{width_px}"/>'
                f'<polygon class="head {cls}" points="{head}" fill="{color}"/>')

    for ai, arch in enumerate(report.archetypes):
        color = PALETTE[ai % len(PALETTE)]
        offset = (ai - (len(report.archetypes) - 1) / 2) * 5.0
        for a, b in zip(arch.items, arch.items[1:]):
            out.append(arrow(a, b, color, 4.0, "archetype", offset))
    for bp in report.branches:
        src = report.archetypes[bp.archetype_index].items[bp.position]
        for target, _count in bp.targets:
            if target in pos and src in pos and target != src:
                out.append(arrow(src, target, BRANCH_COLOR, 1.5, "branch", 0.0))

    for node in nodes:
        x, y = pos[node]
        out.append(f'<circle class="node" cx="{_f(x)}" cy="{_f(y)}" r="18" '
                   'fill="#f5f5f5" stroke="#333333" stroke-width="1.5"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(y + 4)}" text-anchor="middle" '
                   f'font-size="13" font-family="sans-serif">{node}</text>')

    ly = height - 18 - 16 * len(report.archetypes)
    for ai, arch in enumerate(report.archetypes):
        color = PALETTE[ai % len(PALETTE)]
        path = ">".join(str(c) for c in arch.items)
        out.append(f'<text class="legend" x="14" y="{_f(ly)}" font-size="12" '
                   f'font-family="sans-serif" fill="{color}">'
                   f'{arch.name}: {{{path}}} (support {arch.support})</text>')
        ly += 16
    out.append("</svg>")
    return "\n".join(out) + "\n"
