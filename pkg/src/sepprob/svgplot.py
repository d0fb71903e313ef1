"""Small static SVG emitter for scatter-plus-line plots.

Every plotted value is embedded as a ``data-x``/``data-y`` attribute on its
marker so tests and downstream tooling can read plot content without image
comparison.  Output is deterministic for identical inputs.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

_W, _H = 640, 440
_MARGIN = 56


def _ticks(lo: float, hi: float, n: int = 5):
    if hi == lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def scatter_with_line(
    points: list[tuple[float, float]],
    line: list[tuple[float, float]] | None = None,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> str:
    xs = [p[0] for p in points] + ([p[0] for p in line] if line else [])
    ys = [p[1] for p in points] + ([p[1] for p in line] if line else [])
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    padx = 0.05 * (xhi - xlo)
    pady = 0.05 * (yhi - ylo)
    xlo, xhi = xlo - padx, xhi + padx
    ylo, yhi = ylo - pady, yhi + pady

    def px(x):
        return _MARGIN + (x - xlo) / (xhi - xlo) * (_W - 2 * _MARGIN)

    def py(y):
        return _H - _MARGIN - (y - ylo) / (yhi - ylo) * (_H - 2 * _MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    # axes
    parts.append(
        f'<line x1="{_MARGIN}" y1="{_H - _MARGIN}" x2="{_W - _MARGIN}" y2="{_H - _MARGIN}" '
        'stroke="black"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" y2="{_H - _MARGIN}" stroke="black"/>'
    )
    for t in _ticks(xlo + padx, xhi - padx):
        parts.append(
            f'<text x="{px(t):.1f}" y="{_H - _MARGIN + 18}" text-anchor="middle" '
            f'font-size="11">{t:.4g}</text>'
        )
    for t in _ticks(ylo + pady, yhi - pady):
        parts.append(
            f'<text x="{_MARGIN - 6}" y="{py(t):.1f}" text-anchor="end" '
            f'font-size="11">{t:.4g}</text>'
        )
    parts.append(
        f'<text x="{_W / 2:.0f}" y="{_H - 12}" text-anchor="middle" font-size="12">'
        f"{escape(xlabel)}</text>"
    )
    parts.append(
        f'<text x="16" y="{_H / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_H / 2:.0f})">{escape(ylabel)}</text>'
    )
    if line:
        path = " ".join(
            f"{'M' if i == 0 else 'L'}{px(x):.2f},{py(y):.2f}" for i, (x, y) in enumerate(line)
        )
        parts.append(
            f'<path d="{path}" fill="none" stroke="#c23" stroke-width="1.5" class="fit-line" '
            f'data-x0="{line[0][0]!r}" data-y0="{line[0][1]!r}" '
            f'data-x1="{line[-1][0]!r}" data-y1="{line[-1][1]!r}"/>'
        )
    for x, y in points:
        parts.append(
            f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3.2" fill="#247" class="point" '
            f'data-x="{x!r}" data-y="{y!r}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
