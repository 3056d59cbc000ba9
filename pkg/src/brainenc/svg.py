"""Minimal deterministic SVG builders for heatmaps, dendrograms and bar charts.

Hand-assembled markup instead of a plotting library so that byte-identical
inputs always produce byte-identical files (no embedded timestamps, font
paths or randomized element ids).
"""

from __future__ import annotations

from typing import Sequence


def _f(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


class SvgCanvas:
    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self._parts: list[str] = []

    def rect(self, x, y, w, h, fill, stroke="none"):
        self._parts.append(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0):
        self._parts.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def polyline(self, points, stroke="#000", width=1.0):
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self._parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def text(self, x, y, s, size=11, anchor="start", rotate=None, fill="#000"):
        transform = f' transform="rotate({_f(rotate)} {_f(x)} {_f(y)})"' if rotate else ""
        body = s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        self._parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="{_f(size)}" '
            f'text-anchor="{anchor}" fill="{fill}"{transform}>{body}</text>'
        )

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(self.width)}" '
            f'height="{_f(self.height)}" viewBox="0 0 {_f(self.width)} {_f(self.height)}">'
        )
        return head + "\n" + "\n".join(self._parts) + "\n</svg>\n"


def diverging_color(v: float) -> str:
    """Map [-1, 1] to a blue-white-red hex color."""
    v = max(-1.0, min(1.0, v))
    blue, white, red = (59, 76, 192), (255, 255, 255), (180, 4, 38)
    if v < 0:
        lo, hi, t = white, blue, -v
    else:
        lo, hi, t = white, red, v
    rgb = tuple(round(l + (h - l) * t) for l, h in zip(lo, hi))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def heatmap_svg(labels: Sequence[str], matrix, title: str = "") -> str:
    """Square labeled heatmap of a [-1, 1] similarity matrix."""
    n = len(labels)
    cell = 42
    margin_left, margin_top = 70, 50 if title else 30
    width = margin_left + n * cell + 20
    height = margin_top + n * cell + 60
    svg = SvgCanvas(width, height)
    if title:
        svg.text(margin_left + n * cell / 2, 22, title, size=14, anchor="middle")
    for i in range(n):
        svg.text(margin_left - 6, margin_top + i * cell + cell / 2 + 4, labels[i], anchor="end")
        svg.text(
            margin_left + i * cell + cell / 2,
            margin_top + n * cell + 16,
            labels[i],
            anchor="middle",
        )
        for j in range(n):
            v = float(matrix[i][j])
            x, y = margin_left + j * cell, margin_top + i * cell
            svg.rect(x, y, cell, cell, fill=diverging_color(v), stroke="#888")
            svg.text(x + cell / 2, y + cell / 2 + 3, f"{v:.2f}", size=9, anchor="middle")
    return svg.render()


def dendrogram_svg(leaf_labels: Sequence[str], segments, max_height: float, title: str = "") -> str:
    """Dendrogram from precomputed drawing segments.

    ``segments`` is a list of (x_left, h_left, x_right, h_right, h_merge)
    tuples in leaf-position/height coordinates (leaf i at x = i, height 0 at
    the baseline).
    """
    n = len(leaf_labels)
    step, plot_h = 60, 240
    margin_left, margin_top = 60, 50 if title else 30
    width = margin_left + max(n - 1, 1) * step + 80
    height = margin_top + plot_h + 60
    top = max(max_height, 1e-12)

    def sx(x):
        return margin_left + x * step

    def sy(h):
        return margin_top + plot_h * (1.0 - h / top)

    svg = SvgCanvas(width, height)
    if title:
        svg.text(margin_left + (n - 1) * step / 2, 22, title, size=14, anchor="middle")
    svg.line(margin_left - 20, sy(0), margin_left - 20, sy(top), stroke="#444")
    for t in range(5):
        h = top * t / 4
        svg.line(margin_left - 24, sy(h), margin_left - 16, sy(h), stroke="#444")
        svg.text(margin_left - 28, sy(h) + 4, f"{h:.3g}", size=9, anchor="end")
    for xl, hl, xr, hr, hm in segments:
        svg.polyline(
            [(sx(xl), sy(hl)), (sx(xl), sy(hm)), (sx(xr), sy(hm)), (sx(xr), sy(hr))],
            stroke="#1f5fa8",
            width=1.5,
        )
    for i, label in enumerate(leaf_labels):
        svg.text(sx(i), sy(0) + 16, label, anchor="middle")
    return svg.render()


def grouped_bars_svg(
    group_labels: Sequence[str],
    series_labels: Sequence[str],
    values,
    title: str = "",
    y_label: str = "",
) -> str:
    """Grouped bar chart: one group per x position, one bar per series."""
    palette = [
        "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860",
        "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd", "#777777",
    ]
    n_groups, n_series = len(group_labels), len(series_labels)
    bar_w = 9
    group_w = n_series * bar_w + 18
    plot_h = 220
    margin_left, margin_top = 60, 50 if title else 30
    width = margin_left + n_groups * group_w + 140
    height = margin_top + plot_h + 70
    vmax = max((max(row) for row in values), default=0.0)
    vmin = min((min(row) for row in values), default=0.0)
    top = max(vmax, 0.0) or 1.0
    bottom = min(vmin, 0.0)
    span = top - bottom or 1.0

    def sy(v):
        return margin_top + plot_h * (1.0 - (v - bottom) / span)

    svg = SvgCanvas(width, height)
    if title:
        svg.text(margin_left + n_groups * group_w / 2, 22, title, size=14, anchor="middle")
    svg.line(margin_left - 10, sy(bottom), margin_left - 10, sy(top), stroke="#444")
    for t in range(5):
        v = bottom + span * t / 4
        svg.line(margin_left - 14, sy(v), margin_left - 6, sy(v), stroke="#444")
        svg.text(margin_left - 18, sy(v) + 4, f"{v:.3g}", size=9, anchor="end")
    if y_label:
        svg.text(16, margin_top + plot_h / 2, y_label, size=11, anchor="middle", rotate=-90)
    zero_y = sy(0.0)
    svg.line(margin_left - 10, zero_y, margin_left + n_groups * group_w, zero_y, stroke="#999")
    for gi, glabel in enumerate(group_labels):
        gx = margin_left + gi * group_w
        for si in range(n_series):
            v = float(values[gi][si])
            x = gx + si * bar_w
            y0, y1 = sorted((zero_y, sy(v)))
            svg.rect(x, y0, bar_w - 1.5, max(y1 - y0, 0.0), fill=palette[si % len(palette)])
        svg.text(gx + (n_series * bar_w) / 2, margin_top + plot_h + 16, glabel, size=10, anchor="middle", rotate=35)
    legend_x = margin_left + n_groups * group_w + 16
    for si, slabel in enumerate(series_labels):
        y = margin_top + si * 16
        svg.rect(legend_x, y, 10, 10, fill=palette[si % len(palette)])
        svg.text(legend_x + 14, y + 9, slabel, size=10)
    return svg.render()
