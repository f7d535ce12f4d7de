"""Deterministic SVG emitters for heatmaps and log-log convergence curves.

Hand-rolled on purpose: the scenario runner promises byte-identical output
for identical configs, so the writers avoid timestamps, random ids and any
renderer state.  Heatmaps embed a base64 PNG (raster written by Pillow,
which emits no time chunk); curves are plain polylines.
"""

from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image

__all__ = ["heatmap_svg", "loglog_svg"]


def _diverging_rgb(x: np.ndarray) -> np.ndarray:
    """x in [-1, 1] -> blue-white-red, NaN -> light gray."""
    t = np.clip(x, -1.0, 1.0)
    r = np.where(t >= 0, 255, (1 + t) * 255)
    b = np.where(t <= 0, 255, (1 - t) * 255)
    g = (1 - np.abs(t)) * 255
    rgb = np.stack([r, g, b], axis=-1)
    rgb[~np.isfinite(x)] = (220, 220, 220)
    return rgb.astype(np.uint8)


def _sequential_rgb(x: np.ndarray) -> np.ndarray:
    """x in [0, 1] -> white-to-dark-violet ramp, NaN -> light gray."""
    t = np.clip(x, 0.0, 1.0)
    r = (255 * (1 - 0.75 * t)).astype(float)
    g = (255 * (1 - 0.95 * t)).astype(float)
    b = (255 * (1 - 0.45 * t)).astype(float)
    rgb = np.stack([r, g, b], axis=-1)
    rgb[~np.isfinite(x)] = (220, 220, 220)
    return rgb.astype(np.uint8)


def heatmap_svg(values: np.ndarray, mask: np.ndarray | None = None,
                title: str = "", diverging: bool | None = None,
                width: int = 560) -> str:
    """Render a (ny, nx) array as an SVG with an embedded PNG raster."""
    vals = np.array(values, dtype=float)
    if mask is not None:
        vals = np.where(mask, vals, np.nan)
    finite = vals[np.isfinite(vals)]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 1.0
    if diverging is None:
        diverging = lo < 0.0 < hi
    if diverging:
        scale = max(abs(lo), abs(hi)) or 1.0
        rgb = _diverging_rgb(vals / scale)
    else:
        span = (hi - lo) or 1.0
        rgb = _sequential_rgb((vals - lo) / span)
    img = Image.fromarray(rgb[::-1], mode="RGB")  # y axis upward
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    payload = base64.b64encode(buf.getvalue()).decode("ascii")
    ny, nx = vals.shape
    height = int(round(width * ny / nx))
    pad = 28
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{width + 2 * pad}" height="{height + 2 * pad + 18}">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n'
        f'<text x="{pad}" y="18" font-family="monospace" font-size="13">{title} '
        f'[min={lo:.6g} max={hi:.6g}]</text>\n'
        f'<image x="{pad}" y="{pad}" width="{width}" height="{height}" '
        f'preserveAspectRatio="none" image-rendering="pixelated" '
        f'href="data:image/png;base64,{payload}"/>\n'
        f'</svg>\n'
    )


def loglog_svg(series: dict[str, list[tuple[float, float]]], title: str = "",
               xlabel: str = "", ylabel: str = "",
               width: int = 560, height: int = 420) -> str:
    """Log-log polyline plot of one or more (x, y) series with y > 0, x > 0."""
    pad = 52
    colors = ["#1f4e9c", "#c23b22", "#2a7f3f", "#8d5fb3", "#b8860b", "#11767d"]
    pts = [(x, y) for s in series.values() for x, y in s if x > 0 and y > 0]
    if not pts:
        raise ValueError("nothing to plot")
    lx = np.log10([p[0] for p in pts])
    ly = np.log10([p[1] for p in pts])
    x0, x1 = float(lx.min()), float(lx.max())
    y0, y1 = float(ly.min()), float(ly.max())
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def sx(v):
        return pad + (np.log10(v) - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (np.log10(v) - y0) / (y1 - y0) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<text x="{pad}" y="20" font-family="monospace" font-size="13">{title}</text>',
           f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
           'fill="none" stroke="#888"/>']
    for k in range(int(np.floor(x0)), int(np.ceil(x1)) + 1):
        if x0 <= k <= x1:
            out.append(f'<line x1="{sx(10.0 ** k):.2f}" y1="{pad}" x2="{sx(10.0 ** k):.2f}" '
                       f'y2="{height - pad}" stroke="#ddd"/>')
            out.append(f'<text x="{sx(10.0 ** k):.2f}" y="{height - pad + 16}" '
                       f'font-family="monospace" font-size="11" text-anchor="middle">1e{k}</text>')
    for k in range(int(np.floor(y0)), int(np.ceil(y1)) + 1):
        if y0 <= k <= y1:
            out.append(f'<line x1="{pad}" y1="{sy(10.0 ** k):.2f}" x2="{width - pad}" '
                       f'y2="{sy(10.0 ** k):.2f}" stroke="#ddd"/>')
            out.append(f'<text x="{pad - 6}" y="{sy(10.0 ** k):.2f}" font-family="monospace" '
                       f'font-size="11" text-anchor="end">1e{k}</text>')
    for i, (name, data) in enumerate(sorted(series.items())):
        good = [(x, y) for x, y in data if x > 0 and y > 0]
        if not good:
            continue
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in good)
        color = colors[i % len(colors)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{path}"/>')
        for x, y in good:
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.6" fill="{color}"/>')
        out.append(f'<text x="{width - pad - 4}" y="{pad + 14 + 14 * i}" font-family="monospace" '
                   f'font-size="11" text-anchor="end" fill="{color}">{name}</text>')
    out.append(f'<text x="{width / 2:.0f}" y="{height - 8}" font-family="monospace" '
               f'font-size="11" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="14" y="{height / 2:.0f}" font-family="monospace" font-size="11" '
               f'text-anchor="middle" transform="rotate(-90 14 {height / 2:.0f})">{ylabel}</text>')
    out.append('</svg>')
    return "\n".join(out) + "\n"
