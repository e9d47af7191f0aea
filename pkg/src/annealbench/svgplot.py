"""Minimal dependency-free SVG emission: one line chart, one heatmap.

Intentionally small: enough to eyeball sweep curves and distance maps
without pulling in a plotting stack.
"""

import math

__all__ = ["svg_line_chart", "svg_heatmap"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

# five-stop blue->yellow ramp, linearly interpolated
_RAMP = ((0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)),
         (0.75, (94, 201, 98)), (1.0, (253, 231, 37)))


def _ramp_color(t):
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(_RAMP, _RAMP[1:]):
        if t <= t1:
            f = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            return tuple(round(a + f * (b - a)) for a, b in zip(c0, c1))
    return _RAMP[-1][1]


def _ticks(lo, hi, n=5):
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo == hi:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + k * step for k in range(n)]


def svg_line_chart(path, x, series, title="", xlabel="", ylabel="",
                   width=640, height=420):
    """Write a line chart; ``series`` maps label -> list of y values."""
    margin = 60
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    xs = list(x)
    all_y = [v for ys in series.values() for v in ys if math.isfinite(v)]
    if not xs or not all_y:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_lo == x_hi:
        x_hi = x_lo + 1.0
    if y_lo == y_hi:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def px(v):
        return margin + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v):
        return height - margin - (v - y_lo) / (y_hi - y_lo) * plot_h

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="15" '
             f'font-family="sans-serif">{title}</text>']
    parts.append(f'<rect x="{margin}" y="{margin}" width="{plot_w}" height="{plot_h}" '
                 'fill="none" stroke="#444"/>')
    for tx in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{px(tx):.1f}" y1="{height - margin}" x2="{px(tx):.1f}" '
                     f'y2="{height - margin + 5}" stroke="#444"/>')
        parts.append(f'<text x="{px(tx):.1f}" y="{height - margin + 18}" text-anchor="middle" '
                     f'font-size="11" font-family="sans-serif">{tx:.3g}</text>')
    for ty in _ticks(y_lo, y_hi):
        parts.append(f'<line x1="{margin - 5}" y1="{py(ty):.1f}" x2="{margin}" '
                     f'y2="{py(ty):.1f}" stroke="#444"/>')
        parts.append(f'<text x="{margin - 8}" y="{py(ty):.1f}" text-anchor="end" '
                     f'font-size="11" font-family="sans-serif" dy="4">{ty:.3g}</text>')
    if xlabel:
        parts.append(f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" '
                     f'font-size="12" font-family="sans-serif">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{height / 2}" text-anchor="middle" font-size="12" '
                     f'font-family="sans-serif" transform="rotate(-90 16 {height / 2})">'
                     f'{ylabel}</text>')
    for k, (label, ys) in enumerate(series.items()):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(xs, ys)
                       if math.isfinite(b))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     'stroke-width="1.8"/>')
        ly = margin + 16 + 16 * k
        parts.append(f'<line x1="{width - margin - 90}" y1="{ly}" '
                     f'x2="{width - margin - 70}" y2="{ly}" stroke="{color}" '
                     'stroke-width="2"/>')
        parts.append(f'<text x="{width - margin - 64}" y="{ly + 4}" font-size="11" '
                     f'font-family="sans-serif">{label}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))


def svg_heatmap(path, grid, extent, title="", width=560, height=560):
    """Write a heatmap of a 2D array; extent = (x_lo, x_hi, y_lo, y_hi).

    grid[i][j] colors the cell at x index i, y index j; non-finite cells are
    drawn grey.
    """
    margin = 50
    rows = len(grid)
    cols = len(grid[0])
    finite = [v for row in grid for v in row if math.isfinite(v)]
    v_lo = min(finite) if finite else 0.0
    v_hi = max(finite) if finite else 1.0
    if v_lo == v_hi:
        v_hi = v_lo + 1.0
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    cell_w, cell_h = plot_w / rows, plot_h / cols
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="15" '
             f'font-family="sans-serif">{title} [{v_lo:.3g}, {v_hi:.3g}]</text>']
    for i in range(rows):
        for j in range(cols):
            v = grid[i][j]
            if math.isfinite(v):
                r, g, b = _ramp_color((v - v_lo) / (v_hi - v_lo))
                fill = f"rgb({r},{g},{b})"
            else:
                fill = "#bbbbbb"
            x0 = margin + i * cell_w
            y0 = height - margin - (j + 1) * cell_h
            parts.append(f'<rect x="{x0:.1f}" y="{y0:.1f}" width="{cell_w + 0.5:.1f}" '
                         f'height="{cell_h + 0.5:.1f}" fill="{fill}"/>')
    x_lo, x_hi, y_lo, y_hi = extent
    for frac, val in ((0.0, x_lo), (1.0, x_hi)):
        parts.append(f'<text x="{margin + frac * plot_w}" y="{height - margin + 16}" '
                     f'text-anchor="middle" font-size="11" font-family="sans-serif">'
                     f'{val:.3g}</text>')
    for frac, val in ((0.0, y_lo), (1.0, y_hi)):
        parts.append(f'<text x="{margin - 6}" y="{height - margin - frac * plot_h}" '
                     f'text-anchor="end" font-size="11" font-family="sans-serif" dy="4">'
                     f'{val:.3g}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
