"""Static SVG plot emission: airfoil outlines, scatter plots, training curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.etree import ElementTree as ET

import numpy as np


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    kind: str = "line"  # "line" | "scatter"
    color: str = "#1f77b4"


@dataclass
class SvgPlot:
    series: list[Series]
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    width: int = 640
    height: int = 480
    equal_aspect: bool = False
    margins: tuple = field(default=(60, 20, 40, 50))  # left, right, top, bottom


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def render_svg(plot: SvgPlot, path) -> None:
    xs = np.concatenate([np.asarray(s.x, dtype=float).ravel() for s in plot.series])
    ys = np.concatenate([np.asarray(s.y, dtype=float).ravel() for s in plot.series])
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("non-finite plot coordinates")
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad_x = 0.05 * (x_hi - x_lo)
    pad_y = 0.05 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    ml, mr, mt, mb = plot.margins
    pw = plot.width - ml - mr
    ph = plot.height - mt - mb
    if plot.equal_aspect:
        sx = pw / (x_hi - x_lo)
        sy = ph / (y_hi - y_lo)
        s = min(sx, sy)
        x_mid, y_mid = (x_lo + x_hi) / 2, (y_lo + y_hi) / 2
        x_lo, x_hi = x_mid - pw / (2 * s), x_mid + pw / (2 * s)
        y_lo, y_hi = y_mid - ph / (2 * s), y_mid + ph / (2 * s)

    def px(v):
        return ml + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return mt + (y_hi - v) / (y_hi - y_lo) * ph

    root = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(plot.width),
        height=str(plot.height),
        viewBox=f"0 0 {plot.width} {plot.height}",
    )
    ET.SubElement(root, "rect", x="0", y="0", width=str(plot.width),
                  height=str(plot.height), fill="white")
    # axes
    axis_style = {"stroke": "black", "stroke-width": "1"}
    ET.SubElement(root, "line", x1=str(ml), y1=str(mt + ph), x2=str(ml + pw),
                  y2=str(mt + ph), **axis_style)
    ET.SubElement(root, "line", x1=str(ml), y1=str(mt), x2=str(ml),
                  y2=str(mt + ph), **axis_style)
    for tx in _ticks(x_lo, x_hi):
        x = px(tx)
        ET.SubElement(root, "line", x1=f"{x:.2f}", y1=str(mt + ph),
                      x2=f"{x:.2f}", y2=str(mt + ph + 5), **axis_style)
        t = ET.SubElement(root, "text", x=f"{x:.2f}", y=str(mt + ph + 18),
                          **{"text-anchor": "middle", "font-size": "11"})
        t.text = f"{tx:.4g}"
    for ty in _ticks(y_lo, y_hi):
        y = py(ty)
        ET.SubElement(root, "line", x1=str(ml - 5), y1=f"{y:.2f}",
                      x2=str(ml), y2=f"{y:.2f}", **axis_style)
        t = ET.SubElement(root, "text", x=str(ml - 8), y=f"{y + 4:.2f}",
                          **{"text-anchor": "end", "font-size": "11"})
        t.text = f"{ty:.4g}"
    if plot.title:
        t = ET.SubElement(root, "text", x=str(plot.width // 2), y=str(mt - 5),
                          **{"text-anchor": "middle", "font-size": "14"})
        t.text = plot.title
    if plot.xlabel:
        t = ET.SubElement(root, "text", x=str(ml + pw // 2),
                          y=str(plot.height - 8),
                          **{"text-anchor": "middle", "font-size": "12"})
        t.text = plot.xlabel
    if plot.ylabel:
        t = ET.SubElement(root, "text", x="15", y=str(mt + ph // 2),
                          transform=f"rotate(-90 15 {mt + ph // 2})",
                          **{"text-anchor": "middle", "font-size": "12"})
        t.text = plot.ylabel

    for i, series in enumerate(plot.series):
        sx = np.asarray(series.x, dtype=float).ravel()
        sy = np.asarray(series.y, dtype=float).ravel()
        if series.kind == "line":
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(sx, sy))
            ET.SubElement(root, "polyline", points=pts, fill="none",
                          stroke=series.color, **{"stroke-width": "1.5"})
        else:
            for a, b in zip(sx, sy):
                ET.SubElement(root, "circle", cx=f"{px(a):.2f}",
                              cy=f"{py(b):.2f}", r="3", fill=series.color)
        if series.label:
            t = ET.SubElement(root, "text", x=str(ml + pw - 5),
                              y=str(mt + 15 + 15 * i),
                              fill=series.color,
                              **{"text-anchor": "end", "font-size": "11"})
            t.text = series.label

    ET.ElementTree(root).write(path, xml_declaration=True, encoding="unicode")
