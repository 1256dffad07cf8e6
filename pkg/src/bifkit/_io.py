"""Deterministic output emission: CSV, JSON, minimal SVG, content hashes.

All writers use fixed float formatting and fixed ordering so that repeated
runs with identical inputs produce byte-identical files; CSV floats carry
17 significant digits (lossless double round-trip).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "fmt_float",
    "csv_text",
    "json_text",
    "sha256_hex",
    "write_text",
    "SvgFigure",
]


def fmt_float(value: float) -> str:
    """17-significant-digit rendering; round-trips any double exactly."""
    return f"{float(value):.17g}"


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def csv_text(
    columns: Sequence[str],
    rows: Iterable[Sequence],
    schema_note: str | None = None,
) -> str:
    """CSV with a leading schema comment, LF newlines, fixed formatting."""
    lines = [f"# schema: {', '.join(columns)}" + (f" -- {schema_note}" if schema_note else "")]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def json_text(obj) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def sha256_hex(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def write_text(path: str, text: str) -> str:
    """Write UTF-8 text with LF newlines; returns the content hash."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return sha256_hex(text)


@dataclass
class SvgFigure:
    """Hand-rolled SVG scatter/line canvas over a fixed data window.

    Only the primitives the command-line reports need: polylines, labeled
    point markers, free annotations, and a rectangular frame with axis
    labels.  Coordinates are formatted with six significant digits, which
    keeps output deterministic and small.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    width: int = 640
    height: int = 480
    margin: int = 56
    title: str = ""
    elements: list[str] = field(default_factory=list)

    def _sx(self, x: float) -> float:
        span = self.x_max - self.x_min
        return self.margin + (x - self.x_min) / span * (self.width - 2 * self.margin)

    def _sy(self, y: float) -> float:
        span = self.y_max - self.y_min
        return (
            self.height
            - self.margin
            - (y - self.y_min) / span * (self.height - 2 * self.margin)
        )

    @staticmethod
    def _f(v: float) -> str:
        return f"{v:.6g}"

    def polyline(
        self, points: Sequence[Sequence[float]], color: str = "black", width: float = 1.5
    ) -> None:
        if len(points) < 2:
            return
        coords = " ".join(
            f"{self._f(self._sx(x))},{self._f(self._sy(y))}" for x, y in points
        )
        self.elements.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
            f'points="{coords}"/>'
        )

    def marker(self, x: float, y: float, label: str, color: str = "crimson") -> None:
        sx, sy = self._sx(x), self._sy(y)
        self.elements.append(
            f'<circle cx="{self._f(sx)}" cy="{self._f(sy)}" r="4" fill="{color}"/>'
        )
        self.elements.append(
            f'<text x="{self._f(sx + 6)}" y="{self._f(sy - 6)}" '
            f'font-size="12" font-family="monospace">{label}</text>'
        )

    def annotate(self, x: float, y: float, label: str, color: str = "gray") -> None:
        sx, sy = self._sx(x), self._sy(y)
        self.elements.append(
            f'<line x1="{self._f(sx)}" y1="{self._f(self.margin)}" '
            f'x2="{self._f(sx)}" y2="{self._f(self.height - self.margin)}" '
            f'stroke="{color}" stroke-dasharray="4 3" stroke-width="1"/>'
        )
        self.elements.append(
            f'<text x="{self._f(sx + 4)}" y="{self._f(sy)}" font-size="11" '
            f'font-family="monospace" fill="{color}">{label}</text>'
        )

    def render(self, x_label: str = "", y_label: str = "") -> str:
        frame = (
            f'<rect x="{self.margin}" y="{self.margin}" '
            f'width="{self.width - 2 * self.margin}" '
            f'height="{self.height - 2 * self.margin}" '
            'fill="none" stroke="black" stroke-width="1"/>'
        )
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            '<rect width="100%" height="100%" fill="white"/>',
            frame,
        ]
        if self.title:
            parts.append(
                f'<text x="{self.width // 2}" y="{self.margin - 16}" font-size="14" '
                f'font-family="monospace" text-anchor="middle">{self.title}</text>'
            )
        if x_label:
            parts.append(
                f'<text x="{self.width // 2}" y="{self.height - 12}" font-size="12" '
                f'font-family="monospace" text-anchor="middle">{x_label}</text>'
            )
        if y_label:
            parts.append(
                f'<text x="14" y="{self.height // 2}" font-size="12" '
                f'font-family="monospace" text-anchor="middle" '
                f'transform="rotate(-90 14 {self.height // 2})">{y_label}</text>'
            )
        parts.extend(self.elements)
        parts.append("</svg>")
        return "\n".join(parts) + "\n"
