"""Text and SVG renderings of evolutions and path encodings."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..lattice import BinaryConfiguration

EMPTY, BALL = "○", "●"


def render_rows(rows: Sequence[BinaryConfiguration], lo: int | None = None,
                hi: int | None = None) -> str:
    """One text line per time step over a common site window."""
    if not rows:
        return ""
    if rows[0].boundary == "cyclic":
        return "\n".join("".join(BALL if b else EMPTY for b in r.sites) for r in rows)
    lo = min(r.start for r in rows) if lo is None else lo
    hi = max(r.stop for r in rows) if hi is None else hi
    return "\n".join("".join(BALL if r[n] else EMPTY for n in range(lo, hi + 1)) for r in rows)


def _num(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".") or "0"


def render_path_svg(paths: Sequence[tuple[Sequence[float], Sequence[float]]],
                    overlays: Sequence[tuple[Sequence[float], Sequence[float]]] = (),
                    width: int = 640, height: int = 320, ticks: int = 5) -> str:
    """Deterministic SVG 1.1: each path as a polyline, overlays in a second stroke.

    ``paths`` and ``overlays`` are ``(times, values)`` pairs.
    """
    if not paths or any(len(t) == 0 for t, _ in paths):
        raise ValueError("nothing to render")
    allt = np.concatenate([np.asarray(t, float) for t, _ in list(paths) + list(overlays)])
    allv = np.concatenate([np.asarray(v, float) for _, v in list(paths) + list(overlays)])
    t0, t1 = float(allt.min()), float(allt.max())
    v0, v1 = float(allv.min()), float(allv.max())
    if t1 == t0:
        t1 = t0 + 1
    if v1 == v0:
        v1 = v0 + 1
    pad = 30

    def sx(t):
        return pad + (t - t0) / (t1 - t0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - v0) / (v1 - v0) * (height - 2 * pad)

    def poly(t, v, colour, w):
        pts = " ".join(f"{_num(sx(a))},{_num(sy(b))}" for a, b in zip(t, v))
        return f'<polyline fill="none" stroke="{colour}" stroke-width="{w}" points="{pts}"/>'

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="#888"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="#888"/>']
    for k in range(ticks + 1):
        t = t0 + (t1 - t0) * k / ticks
        v = v0 + (v1 - v0) * k / ticks
        out.append(f'<text x="{_num(sx(t))}" y="{height - pad + 14}" font-size="10" '
                   f'text-anchor="middle">{_num(t)}</text>')
        out.append(f'<text x="{pad - 4}" y="{_num(sy(v))}" font-size="10" text-anchor="end">{_num(v)}</text>')
    for t, v in paths:
        out.append(poly(t, v, "#000", 1))
    for t, v in overlays:
        out.append(poly(t, v, "#c00", 1.5))
    out.append("</svg>")
    return "\n".join(out) + "\n"
