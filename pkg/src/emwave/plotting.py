"""Dependency-free SVG line plots for diagnostic time series.

Plots are plain SVG text written directly, so nothing beyond the
standard library is needed.  Linear and logarithmic axes are supported;
in log-log mode reference guide lines with slopes -1, -(1 + gamma) and
-2 can be overlaid to compare measured decay against the expected
interior, exterior and derivative-improved rates.
"""

import math

from .errors import ConfigError, DataError
from .timeseries import read_timeseries

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f")
_GUIDE_COLOR = "#999999"

WIDTH = 640
HEIGHT = 440
MARGIN = {"left": 70, "right": 20, "top": 36, "bottom": 52}


def _transform(lo, hi, log):
    if log:
        if lo <= 0.0 or hi <= 0.0:
            raise DataError("logarithmic axis needs positive data")
        lo, hi = math.log10(lo), math.log10(hi)
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    lo -= 0.04 * span
    hi += 0.04 * span
    return lo, hi


def _ticks(lo, hi, log, count=5):
    if log:
        first = math.ceil(lo)
        last = math.floor(hi)
        if last >= first:
            stride = max(1, (last - first) // count + 1)
            return [(v, f"1e{v:d}") for v in range(first, last + 1, stride)]
    vals = []
    step = (hi - lo) / count
    for k in range(count + 1):
        v = lo + k * step
        vals.append((v, f"{v:.3g}"))
    return vals


def _esc(s):
    return (str(s).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def render_svg(series, xlabel="", ylabel="", title="", logx=False,
               logy=False, guides=()):
    """Render labeled (x, y) series to an SVG string.

    series: iterable of (label, xs, ys) with equal-length sequences.
    guides: iterable of (slope, label); each draws a power-law reference
    line through the first point of the first series (log-log only).
    """
    data = []
    for label, xs, ys in series:
        pts = [(float(x), float(y)) for x, y in zip(xs, ys)
               if _usable(x, logx) and _usable(y, logy)]
        if pts:
            data.append((label, pts))
    if not data:
        raise DataError("no plottable points in any series")

    all_x = [p[0] for _, pts in data for p in pts]
    all_y = [p[1] for _, pts in data for p in pts]
    xlo, xhi = _transform(min(all_x), max(all_x), logx)
    ylo, yhi = _transform(min(all_y), max(all_y), logy)

    px0 = MARGIN["left"]
    px1 = WIDTH - MARGIN["right"]
    py0 = HEIGHT - MARGIN["bottom"]
    py1 = MARGIN["top"]

    def sx(x):
        v = math.log10(x) if logx else x
        return px0 + (v - xlo) / (xhi - xlo) * (px1 - px0)

    def sy(y):
        v = math.log10(y) if logy else y
        return py0 + (v - ylo) / (yhi - ylo) * (py1 - py0)

    out = []
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
               f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">')
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    out.append(f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" '
               f'font-family="sans-serif" font-size="14">{_esc(title)}'
               '</text>')
    # axes
    out.append(f'<line x1="{px0}" y1="{py0}" x2="{px1}" y2="{py0}" '
               'stroke="black"/>')
    out.append(f'<line x1="{px0}" y1="{py0}" x2="{px0}" y2="{py1}" '
               'stroke="black"/>')
    for v, lab in _ticks(xlo, xhi, logx):
        x = px0 + (v - xlo) / (xhi - xlo) * (px1 - px0)
        if px0 <= x <= px1:
            out.append(f'<line x1="{x:.1f}" y1="{py0}" x2="{x:.1f}" '
                       f'y2="{py0 + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.1f}" y="{py0 + 18}" '
                       'text-anchor="middle" font-family="sans-serif" '
                       f'font-size="11">{_esc(lab)}</text>')
    for v, lab in _ticks(ylo, yhi, logy):
        y = py0 + (v - ylo) / (yhi - ylo) * (py1 - py0)
        if py1 <= y <= py0:
            out.append(f'<line x1="{px0 - 5}" y1="{y:.1f}" x2="{px0}" '
                       f'y2="{y:.1f}" stroke="black"/>')
            out.append(f'<text x="{px0 - 8}" y="{y + 4:.1f}" '
                       'text-anchor="end" font-family="sans-serif" '
                       f'font-size="11">{_esc(lab)}</text>')
    out.append(f'<text x="{(px0 + px1) / 2:.1f}" y="{HEIGHT - 12}" '
               'text-anchor="middle" font-family="sans-serif" '
               f'font-size="12">{_esc(xlabel)}</text>')
    out.append(f'<text x="16" y="{(py0 + py1) / 2:.1f}" '
               'text-anchor="middle" font-family="sans-serif" '
               f'font-size="12" transform="rotate(-90 16 '
               f'{(py0 + py1) / 2:.1f})">{_esc(ylabel)}</text>')

    # guide lines: y = y0 * (x / x0)^slope through the first data point
    if guides:
        if not (logx and logy):
            raise ConfigError("slope guides require log-log axes")
        x0, y0 = data[0][1][0]
        xa = 10.0 ** (xlo + 0.05 * (xhi - xlo))
        xb = 10.0 ** (xhi - 0.05 * (xhi - xlo))
        for slope, lab in guides:
            ya = y0 * (xa / x0) ** slope
            yb = y0 * (xb / x0) ** slope
            out.append(f'<line x1="{sx(xa):.1f}" y1="{sy(ya):.1f}" '
                       f'x2="{sx(xb):.1f}" y2="{sy(yb):.1f}" '
                       f'stroke="{_GUIDE_COLOR}" stroke-dasharray="5,4"/>')
            out.append(f'<text x="{sx(xb):.1f}" y="{sy(yb) - 4:.1f}" '
                       'text-anchor="end" font-family="sans-serif" '
                       f'font-size="10" fill="{_GUIDE_COLOR}">'
                       f'{_esc(lab)}</text>')

    for k, (label, pts) in enumerate(data):
        color = _PALETTE[k % len(_PALETTE)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline points="{path}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        ly = py1 + 14 * (k + 1)
        out.append(f'<line x1="{px1 - 120}" y1="{ly - 4:.1f}" '
                   f'x2="{px1 - 100}" y2="{ly - 4:.1f}" stroke="{color}" '
                   'stroke-width="2"/>')
        out.append(f'<text x="{px1 - 95}" y="{ly:.1f}" '
                   'font-family="sans-serif" font-size="11">'
                   f'{_esc(label)}</text>')
    out.append('</svg>')
    return "\n".join(out)


def _usable(v, log):
    v = float(v)
    if not math.isfinite(v):
        return False
    return v > 0.0 if log else True


def decay_guides(gamma):
    """Reference slopes for decay comparison: -1, -(1 + gamma), -2."""
    return ((-1.0, "slope -1"),
            (-1.0 - gamma, f"slope -{1.0 + gamma:g}"),
            (-2.0, "slope -2"))


def plot_timeseries(csv_path, columns, out_path, x_column="t", logx=False,
                    logy=False, guides=(), title=""):
    """Plot named columns of a diagnostic CSV against time (or another
    column) and write an SVG file.

    Missing columns raise a configuration error; if no finite points
    remain, no file is written and a data error is raised.
    """
    names, data, _ = read_timeseries(csv_path)
    missing = [c for c in list(columns) + [x_column] if c not in names]
    if missing:
        raise ConfigError(
            f"columns {missing} not in {csv_path}; available: {names}")
    xs = data[:, names.index(x_column)]
    series = [(c, xs, data[:, names.index(c)]) for c in columns]
    svg = render_svg(series, xlabel=x_column, ylabel=", ".join(columns),
                     title=title, logx=logx, logy=logy, guides=guides)
    with open(out_path, "w") as fh:
        fh.write(svg + "\n")
    return out_path
