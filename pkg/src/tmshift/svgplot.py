"""Deterministic SVG rendering of block maps: domains left, images right.

Output is plain string assembly with fixed-precision coordinates, so the
same map renders to byte-identical files on every run.
"""

from __future__ import annotations

from .cantor import CantorBlock, CantorPoint, PiecewiseBlockMap

_PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2",
    "#edc948", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
)

_SIZE = 400.0
_PAD = 20.0


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def _rect(x0: float, y0: float, block: CantorBlock, fill: str, opacity: str) -> str:
    b = block.radix
    w = _SIZE / b**block.x_depth
    h = _SIZE / b**block.y_depth
    x = x0 + _SIZE * block.x_offset / b**block.x_depth
    # SVG y grows downward; the unit square y axis grows upward.
    y = y0 + _SIZE - _SIZE * block.y_offset / b**block.y_depth - h
    return (
        f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'fill="{fill}" fill-opacity="{opacity}" stroke="#333333" stroke-width="1"/>'
    )


def _frame(x0: float, y0: float, label: str) -> list[str]:
    return [
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(_SIZE)}" height="{_fmt(_SIZE)}" '
        f'fill="none" stroke="#000000" stroke-width="1.5"/>',
        f'<text x="{_fmt(x0 + _SIZE / 2)}" y="{_fmt(y0 + _SIZE + 16)}" '
        f'font-family="monospace" font-size="13" text-anchor="middle">{label}</text>',
    ]


def render_blockmap(
    pm: PiecewiseBlockMap,
    orbit: tuple[CantorPoint, ...] = (),
    title: str = "",
) -> str:
    """Two unit squares: piece domains on the left, their images on the right.

    An optional orbit is scattered over the left square in iteration order.
    """
    left = _PAD
    right = _PAD + _SIZE + 2 * _PAD
    width = right + _SIZE + _PAD
    height = 2 * _PAD + _SIZE + 24
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(width)}" '
        f'height="{int(height)}" viewBox="0 0 {int(width)} {int(height)}">',
        f'<rect x="0" y="0" width="{int(width)}" height="{int(height)}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(width / 2)}" y="14" font-family="monospace" '
            f'font-size="13" text-anchor="middle">{title}</text>'
        )
    for i, piece in enumerate(pm.pieces):
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(_rect(left, _PAD, piece.domain, color, "0.55"))
        parts.append(_rect(right, _PAD, piece.image, color, "0.55"))
    for i, piece in enumerate(pm.pieces):
        b = pm.radix
        cx = left + _SIZE * (piece.domain.x_offset + 0.5) / b**piece.domain.x_depth
        cy = _PAD + _SIZE - _SIZE * (piece.domain.y_offset + 0.5) / b**piece.domain.y_depth
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-family="monospace" '
            f'font-size="11" text-anchor="middle">{i}</text>'
        )
    for p in orbit:
        px = left + _SIZE * float(p.x)
        py = _PAD + _SIZE - _SIZE * float(p.y)
        parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="2.2" '
            f'fill="#000000" fill-opacity="0.8"/>'
        )
    parts.extend(_frame(left, _PAD, "domains"))
    parts.extend(_frame(right, _PAD, "images"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
