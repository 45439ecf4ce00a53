"""Minimal SVG power-curve plots: axes, one polyline per series and a
dotted horizontal line at the nominal level."""

from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
PAD_L, PAD_R, PAD_T, PAD_B = 60, 150, 40, 50
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    step = (hi - lo) / count
    return [lo + i * step for i in range(count + 1)]


def power_curve(series, delta, x_label="x", y_label="rejection rate", title=""):
    """SVG text for ``series``, a mapping of name -> list of ``(x, rate)``."""
    pts = [p for s in series.values() for p in s]
    xs = [p[0] for p in pts] or [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    plot_w = WIDTH - PAD_L - PAD_R
    plot_h = HEIGHT - PAD_T - PAD_B

    def sx(v):
        return PAD_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        return PAD_T + (1 - v) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle">{escape(title)}</text>')
    x0, y0, x1, y1 = PAD_L, PAD_T + plot_h, PAD_L + plot_w, PAD_T
    out.append(f'<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>')
    for v in _ticks(0.0, 1.0):
        y = sy(v)
        out.append(f'<line x1="{x0 - 4}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{y + 4:.1f}" text-anchor="end">{v:.1f}</text>')
    xticks = sorted(set(xs)) if len(set(xs)) <= 10 else _ticks(x_lo, x_hi)
    for v in xticks:
        x = sx(v)
        out.append(f'<line x1="{x:.1f}" y1="{y0}" x2="{x:.1f}" y2="{y0 + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{y0 + 18}" text-anchor="middle">{v:g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(x_label)}</text>')
    out.append(
        f'<text x="15" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {(y0 + y1) / 2:.1f})">{escape(y_label)}</text>'
    )
    yd = sy(delta)
    out.append(f'<line x1="{x0}" y1="{yd:.1f}" x2="{x1}" y2="{yd:.1f}" stroke="gray" stroke-dasharray="2,4"/>')
    for i, (name, pts) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        pts = sorted(pts)
        coords = " ".join(f"{sx(a):.1f},{sy(b):.1f}" for a, b in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for a, b in pts:
            out.append(f'<circle cx="{sx(a):.1f}" cy="{sy(b):.1f}" r="2.5" fill="{color}"/>')
        ly = PAD_T + 16 * i + 8
        out.append(f'<line x1="{x1 + 15}" y1="{ly}" x2="{x1 + 35}" y2="{ly}" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{x1 + 40}" y="{ly + 4}">{escape(name or "rate")}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
