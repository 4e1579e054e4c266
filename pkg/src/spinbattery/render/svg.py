"""Deterministic SVG line plots of a charging series.

The output is a pure function of the series: no timestamps, no random ids,
fixed float formatting.
"""

from enum import StrEnum
from html import escape
from pathlib import Path

import numpy as np

from spinbattery.config.config import SVG_HEIGHT, SVG_WIDTH
from spinbattery.errors import DomainError, OutputError
from spinbattery.logger import get_logger
from spinbattery.metrics import ChargeTimeSeries

logger = get_logger("render.svg")

MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 56
MARGIN_BOTTOM = 48
TICKS = 5


class Metric(StrEnum):
    ERGOTROPY = "ergotropy"
    POWER = "power"


AXIS_LABELS = {
    Metric.ERGOTROPY: "ergotropy",
    Metric.POWER: "charging power",
}


class SvgBuilder:
    """Accumulates SVG elements into one document string."""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n',
            f'<svg version="1.1" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" xmlns="http://www.w3.org/2000/svg">\n',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n',
        ]

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str = "black"):
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="1"/>\n'
        )

    def polyline(self, points: np.ndarray, stroke: str):
        coordinates = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(
            f'<polyline points="{coordinates}" fill="none" stroke="{stroke}" '
            f'stroke-width="1.5"/>\n'
        )

    def text(
        self,
        x: float,
        y: float,
        string: str,
        anchor: str = "start",
        size: int = 12,
        extra: str = "",
    ):
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}"{extra}>{escape(string)}</text>\n'
        )

    def get_svg(self) -> str:
        return "".join(self.parts) + "</svg>\n"


def _tick_label(value: float) -> str:
    text = f"{value:.3g}"
    return "0" if text == "-0" else text


def _value_range(values: np.ndarray) -> tuple[float, float]:
    low = min(0.0, float(values.min()))
    high = float(values.max())
    if high - low < 1e-12:
        high = low + 1.0
    return low, high


def svg_document(series: ChargeTimeSeries, metric: Metric | str) -> str:
    """SVG text plotting `metric` against time, titled with the series label."""
    metric = Metric(metric)
    if len(series) < 2:
        raise DomainError(f"Plotting needs at least 2 samples, got {len(series)}")
    times = series.times
    values = getattr(series, str(metric))

    svg = SvgBuilder(SVG_WIDTH, SVG_HEIGHT)
    left, right = MARGIN_LEFT, SVG_WIDTH - MARGIN_RIGHT
    top, bottom = MARGIN_TOP, SVG_HEIGHT - MARGIN_BOTTOM
    t0, t1 = float(times[0]), float(times[-1])
    low, high = _value_range(values)

    def to_x(t):
        return left + (t - t0) / (t1 - t0) * (right - left)

    def to_y(v):
        return bottom - (v - low) / (high - low) * (bottom - top)

    svg.text(left, 20, series.label or str(metric), size=14, extra=' font-weight="bold"')
    if series.details:
        caption = "  ".join(f"{k}={v}" for k, v in series.details.items())
        svg.text(left, 38, caption, size=10)

    for t in np.linspace(t0, t1, TICKS):
        x = to_x(t)
        svg.line(x, bottom, x, bottom + 4)
        svg.text(x, bottom + 16, _tick_label(t), anchor="middle", size=10)
    for v in np.linspace(low, high, TICKS):
        y = to_y(v)
        svg.line(left - 4, y, left, y)
        svg.line(left, y, right, y, stroke="#dddddd")
        svg.text(left - 8, y + 3, _tick_label(v), anchor="end", size=10)

    svg.line(left, bottom, right, bottom)
    svg.line(left, top, left, bottom)

    svg.text((left + right) / 2, SVG_HEIGHT - 8, "t", anchor="middle")
    svg.text(
        16,
        (top + bottom) / 2,
        AXIS_LABELS[metric],
        anchor="middle",
        extra=f' transform="rotate(-90 16 {(top + bottom) / 2:.2f})"',
    )
    svg.polyline(np.column_stack([to_x(times), to_y(values)]), stroke="#1f77b4")
    return svg.get_svg()


def render_svg(series: ChargeTimeSeries, metric: Metric | str, path: str | Path) -> None:
    """Write the `metric` plot of `series` to `path`."""
    path = Path(path)
    document = svg_document(series, metric)
    try:
        path.write_text(document, encoding="utf-8")
    except OSError as e:
        raise OutputError(path, e) from e
    logger.debug(f"Rendered {metric} plot to {path}")
