"""Per-token index assignment for mixed text/image sequences.

Four schemes are supported: hard (flat 1D concatenation), unordered (one
shared index per image), spatial (multi-axis grid indices with offset
continuation), and circle (spatial text indices with image grids remapped
onto the projected circle).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .geometry import CipConfig, GridSpec, cip_transform, dual_frame_fusion


class LayoutError(ValueError):
    """Malformed sequence layout."""


@dataclass(frozen=True)
class TextSegment:
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise LayoutError(f"text run length must be >= 1, got {self.length}")

    @property
    def num_tokens(self) -> int:
        return self.length


@dataclass(frozen=True)
class ImageSegment:
    grid: GridSpec

    @property
    def num_tokens(self) -> int:
        return self.grid.num_tokens


Segment = Union[TextSegment, ImageSegment]

TEXT = "text"
IMAGE = "image"


@dataclass(frozen=True)
class Token:
    modality: str
    segment_id: int
    index: np.ndarray


@dataclass(frozen=True)
class IndexedSequence:
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def indices(self, modality: str | None = None) -> np.ndarray:
        """Stacked (N, 3) index array, optionally filtered by modality."""
        rows = [t.index for t in self.tokens if modality is None or t.modality == modality]
        if not rows:
            return np.zeros((0, 3))
        return np.stack(rows)


def parse_layout(text: str) -> list[Segment]:
    """Parse the compact layout grammar: `t<N>` text runs, `i<W>x<H>` images.

    Segments are comma-separated, e.g. "i3x3,t5".
    """
    segments: list[Segment] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise LayoutError(f"empty segment in layout {text!r}")
        try:
            if part.startswith("t"):
                segments.append(TextSegment(int(part[1:])))
            elif part.startswith("i"):
                w, h = part[1:].split("x")
                segments.append(ImageSegment(GridSpec(width=int(w), height=int(h))))
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise LayoutError(f"bad layout segment {part!r} (expected t<N> or i<W>x<H>)") from None
    if not segments:
        raise LayoutError("layout must contain at least one segment")
    return segments


def _scalar_tokens(segment_id: int, modality: str, values: range) -> list[Token]:
    return [
        Token(modality, segment_id, np.array([float(s)] * 3))
        for s in values
    ]


def assign_hard(segments: list[Segment]) -> IndexedSequence:
    """Consecutive scalar index per token, images flattened row-major."""
    tokens: list[Token] = []
    counter = 0
    for seg_id, seg in enumerate(segments):
        modality = TEXT if isinstance(seg, TextSegment) else IMAGE
        tokens.extend(_scalar_tokens(seg_id, modality, range(counter, counter + seg.num_tokens)))
        counter += seg.num_tokens
    return IndexedSequence(tuple(tokens))


def assign_unordered(segments: list[Segment]) -> IndexedSequence:
    """Scalar counter advancing by one per text token and one per whole image."""
    tokens: list[Token] = []
    counter = 0
    for seg_id, seg in enumerate(segments):
        if isinstance(seg, TextSegment):
            tokens.extend(_scalar_tokens(seg_id, TEXT, range(counter, counter + seg.length)))
            counter += seg.length
        else:
            index = np.array([float(counter)] * 3)
            tokens.extend(Token(IMAGE, seg_id, index.copy()) for _ in range(seg.num_tokens))
            counter += 1
    return IndexedSequence(tuple(tokens))


def assign_spatial(segments: list[Segment]) -> IndexedSequence:
    """Multi-axis indices: text (t,t,t); image token (row j, col i) gets
    (b, b+j, b+i) where b is the counter at the image start. The counter
    resumes one past the maximum component used, b + max(w, h)."""
    tokens: list[Token] = []
    counter = 0
    for seg_id, seg in enumerate(segments):
        if isinstance(seg, TextSegment):
            tokens.extend(_scalar_tokens(seg_id, TEXT, range(counter, counter + seg.length)))
            counter += seg.length
        else:
            base = counter
            grid = seg.grid
            for j in range(grid.height):
                for i in range(grid.width):
                    tokens.append(Token(IMAGE, seg_id, np.array([base, base + j, base + i], dtype=float)))
            counter = base + max(grid.width, grid.height)
    return IndexedSequence(tuple(tokens))


def assign_circle(segments: list[Segment], config: CipConfig) -> IndexedSequence:
    """Spatial text indices; image grids replaced by fused circle coordinates
    translated so the circle center sits at (b, b, b) on the text line."""
    tokens: list[Token] = []
    counter = 0
    for seg_id, seg in enumerate(segments):
        if isinstance(seg, TextSegment):
            tokens.extend(_scalar_tokens(seg_id, TEXT, range(counter, counter + seg.length)))
            counter += seg.length
        else:
            base = counter
            grid = seg.grid
            projected, centered = cip_transform(grid, config)
            fused = dual_frame_fusion(projected, centered, config.beta) + float(base)
            tokens.extend(Token(IMAGE, seg_id, row) for row in fused)
            counter = base + max(grid.width, grid.height)
    return IndexedSequence(tuple(tokens))


SCHEME_NAMES = ("hard", "unordered", "spatial", "circle")


def assign(scheme: str, segments: list[Segment], config: CipConfig | None = None) -> IndexedSequence:
    """Dispatch on scheme name; `config` is required for the circle scheme."""
    if scheme == "hard":
        return assign_hard(segments)
    if scheme == "unordered":
        return assign_unordered(segments)
    if scheme == "spatial":
        return assign_spatial(segments)
    if scheme == "circle":
        return assign_circle(segments, config if config is not None else CipConfig())
    raise LayoutError(f"unknown scheme {scheme!r}")
