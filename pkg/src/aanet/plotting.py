"""Minimal SVG line and bar charts, emitted as plain text."""

from __future__ import annotations

from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _scale(lo, hi, a, b):
    span = hi - lo or 1.0
    return lambda v: a + (v - lo) / span * (b - a)


def _frame(title, xlabel, ylabel, body, ylo, yhi):
    ticks = []
    sy = _scale(ylo, yhi, HEIGHT - MARGIN, MARGIN)
    for i in range(5):
        v = ylo + (yhi - ylo) * i / 4
        y = sy(v)
        ticks.append(f'<line x1="{MARGIN - 4}" y1="{y:.1f}" x2="{MARGIN}" y2="{y:.1f}" stroke="black"/>')
        ticks.append(f'<text x="{MARGIN - 6}" y="{y + 4:.1f}" font-size="10" text-anchor="end">{v:.3g}</text>')
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="24" font-size="14" text-anchor="middle">{escape(title)}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{HEIGHT / 2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 15 {HEIGHT / 2})">{escape(ylabel)}</text>',
        *ticks,
        *body,
        "</svg>",
        "",
    ])


def line_chart(series: dict, title="", xlabel="", ylabel="") -> str:
    """``series`` maps a name to ``(xs, ys)``."""
    xs = [x for x_, _ in series.values() for x in x_]
    ys = [y for _, y_ in series.values() for y in y_]
    if not xs:
        raise ValueError("line_chart needs at least one point")
    sx = _scale(min(xs), max(xs), MARGIN, WIDTH - MARGIN)
    ylo, yhi = min(ys + [0.0]), max(ys)
    sy = _scale(ylo, yhi, HEIGHT - MARGIN, MARGIN)
    body = []
    for i, (name, (x_, y_)) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(x_, y_))
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        body.append(f'<text x="{WIDTH - MARGIN + 4}" y="{MARGIN + 14 * i}" font-size="10" fill="{color}">'
                    f"{escape(str(name))}</text>")
    return _frame(title, xlabel, ylabel, body, ylo, yhi)


def bar_chart(labels, values, title="", xlabel="", ylabel="") -> str:
    labels, values = list(labels), [float(v) for v in values]
    if not values:
        raise ValueError("bar_chart needs at least one bar")
    ylo, yhi = min(values + [0.0]), max(values + [0.0])
    sy = _scale(ylo, yhi, HEIGHT - MARGIN, MARGIN)
    slot = (WIDTH - 2 * MARGIN) / len(values)
    body = []
    for i, (label, v) in enumerate(zip(labels, values)):
        x = MARGIN + i * slot + slot * 0.1
        top, base = sorted((sy(v), sy(0.0)))
        body.append(f'<rect x="{x:.1f}" y="{top:.1f}" width="{slot * 0.8:.1f}" height="{base - top:.1f}" '
                    f'fill="{PALETTE[0]}"/>')
        body.append(f'<text x="{x + slot * 0.4:.1f}" y="{HEIGHT - MARGIN + 12}" font-size="9" '
                    f'text-anchor="middle">{escape(str(label))}</text>')
    return _frame(title, xlabel, ylabel, body, ylo, yhi)
