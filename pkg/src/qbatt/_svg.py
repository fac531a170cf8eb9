"""Self-contained SVG rendering for sweep results: line charts and heatmaps.

No plotting dependency; output is a standalone 800x600 document with axes,
tick labels, a legend and a parameter-carrying title.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 75, 170, 50, 60

PALETTE = ("#1b6ca8", "#d1495b", "#66a182", "#edae49", "#574ae2", "#8d5a97", "#2e4057")


def _fmt(x: float) -> str:
    return f"{x:.4g}"


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class _Canvas:
    def __init__(self, title: str, x_label: str, y_label: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
            f'width="{WIDTH}" height="{HEIGHT}" font-family="Helvetica, Arial, sans-serif">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="24" font-size="15" text-anchor="middle">{_escape(title)}</text>',
            f'<text x="{(MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2}" y="{HEIGHT - 14}" '
            f'font-size="13" text-anchor="middle">{_escape(x_label)}</text>',
            f'<text x="18" y="{(MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2}" font-size="13" '
            f'text-anchor="middle" transform="rotate(-90 18 {(MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2})">'
            f"{_escape(y_label)}</text>",
        ]
        self.x0, self.x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
        self.y0, self.y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP

    def scales(self, xlo, xhi, ylo, yhi):
        if xhi - xlo == 0:
            xlo, xhi = xlo - 0.5, xhi + 0.5
        if yhi - ylo == 0:
            ylo, yhi = ylo - 0.5, yhi + 0.5
        pad = 0.05 * (yhi - ylo)
        ylo, yhi = ylo - pad, yhi + pad
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi

    def px(self, x):
        return self.x0 + (x - self.xlo) / (self.xhi - self.xlo) * (self.x1 - self.x0)

    def py(self, y):
        return self.y0 + (y - self.ylo) / (self.yhi - self.ylo) * (self.y1 - self.y0)

    def axes(self):
        self.parts.append(
            f'<rect x="{self.x0}" y="{self.y1}" width="{self.x1 - self.x0}" '
            f'height="{self.y0 - self.y1}" fill="none" stroke="#333" stroke-width="1"/>'
        )
        for x in _ticks(self.xlo, self.xhi):
            px = self.px(x)
            self.parts.append(f'<line x1="{px:.1f}" y1="{self.y0}" x2="{px:.1f}" y2="{self.y0 + 5}" stroke="#333"/>')
            self.parts.append(
                f'<text x="{px:.1f}" y="{self.y0 + 20}" font-size="11" text-anchor="middle">{_fmt(x)}</text>'
            )
        for y in _ticks(self.ylo, self.yhi):
            py = self.py(y)
            self.parts.append(f'<line x1="{self.x0 - 5}" y1="{py:.1f}" x2="{self.x0}" y2="{py:.1f}" stroke="#333"/>')
            self.parts.append(
                f'<text x="{self.x0 - 8}" y="{py + 4:.1f}" font-size="11" text-anchor="end">{_fmt(y)}</text>'
            )

    def legend(self, entries):
        lx = self.x1 + 12
        for i, (name, color) in enumerate(entries):
            ly = MARGIN_TOP + 16 + 20 * i
            self.parts.append(f'<rect x="{lx}" y="{ly - 9}" width="14" height="10" fill="{color}"/>')
            self.parts.append(f'<text x="{lx + 20}" y="{ly}" font-size="11">{_escape(name)}</text>')

    def finish(self) -> str:
        self.parts.append("</svg>")
        return "\n".join(self.parts)


def line_chart(series: list[tuple[str, list[float], list[float]]], title: str, x_label: str, y_label: str) -> str:
    """series: (name, xs, ys) per curve; one polyline and one legend entry each."""
    if not series or all(len(xs) == 0 for _, xs, _ in series):
        raise ValueError("nothing to plot")
    canvas = _Canvas(title, x_label, y_label)
    xlo = min(min(xs) for _, xs, _ in series)
    xhi = max(max(xs) for _, xs, _ in series)
    ylo = min(min(ys) for _, _, ys in series)
    yhi = max(max(ys) for _, _, ys in series)
    canvas.scales(xlo, xhi, ylo, yhi)
    canvas.axes()
    legend = []
    for i, (name, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{canvas.px(x):.2f},{canvas.py(y):.2f}" for x, y in zip(xs, ys))
        canvas.parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        legend.append((name, color))
    canvas.legend(legend)
    return canvas.finish()


def _diverging_color(v: float, vmax: float) -> str:
    """Blue-white-red scale centered at zero."""
    if vmax <= 0:
        vmax = 1.0
    u = max(-1.0, min(1.0, v / vmax))
    if u >= 0:
        r, g, b = 255, round(255 * (1 - u)), round(255 * (1 - u))
    else:
        r, g, b = round(255 * (1 + u)), round(255 * (1 + u)), 255
    return f"rgb({r},{g},{b})"


def heatmap(xs: list[float], ys: list[float], values: list[list[float]], title: str, x_label: str, y_label: str) -> str:
    """values[j][i] is the cell at (xs[i], ys[j]); diverging scale centered at 0."""
    if not xs or not ys:
        raise ValueError("nothing to plot")
    canvas = _Canvas(title, x_label, y_label)
    canvas.scales(min(xs), max(xs), min(ys), max(ys))
    vmax = max(abs(v) for row in values for v in row) or 1.0
    dx = (canvas.x1 - canvas.x0) / max(len(xs), 1)
    dy = (canvas.y0 - canvas.y1) / max(len(ys), 1)
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            cx = canvas.x0 + i * dx
            cy = canvas.y0 - (j + 1) * dy
            canvas.parts.append(
                f'<rect x="{cx:.2f}" y="{cy:.2f}" width="{dx + 0.5:.2f}" height="{dy + 0.5:.2f}" '
                f'fill="{_diverging_color(values[j][i], vmax)}"/>'
            )
    canvas.axes()
    canvas.legend(
        [(f"+{_fmt(vmax)}", _diverging_color(vmax, vmax)),
         ("0", _diverging_color(0.0, vmax)),
         (f"-{_fmt(vmax)}", _diverging_color(-vmax, vmax))]
    )
    return canvas.finish()
