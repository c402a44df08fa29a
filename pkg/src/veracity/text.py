"""Ingestion of precomputed token-embedding files.

The encoder that produces these files lives outside the pipeline; this
module only parses, validates, and relabels them as feature sequences.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MalformedEmbedding
from .features import FeatureSequence, Modality

CANONICAL_DIM = 768

_HEADER_RE = re.compile(r"^dim=(\d+) tokens=(\d+)$")


@dataclass
class EmbeddingMatrix:
    values: np.ndarray  # tokens x dim

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("embedding values must be 2-D")
        n, d = self.values.shape
        if n < 1 or d < 1:
            raise ValueError(f"embedding matrix must be at least 1x1, got {n}x{d}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("embedding values must be finite")

    @property
    def tokens(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def parse_embeddings(path: str | Path) -> EmbeddingMatrix:
    """Parse an embedding text file; comment lines (#...) are ignored."""
    path = Path(path)
    header: tuple[int, int] | None = None
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                m = _HEADER_RE.match(line)
                if not m:
                    raise MalformedEmbedding(
                        f"line {lineno}: expected header 'dim=<int> tokens=<int>'"
                    )
                dim, tokens = int(m.group(1)), int(m.group(2))
                if dim <= 0:
                    raise MalformedEmbedding(f"line {lineno}: dim must be positive, got {dim}")
                if tokens <= 0:
                    raise MalformedEmbedding(
                        f"line {lineno}: tokens must be positive, got {tokens}"
                    )
                header = (dim, tokens)
                continue
            cells = line.split()
            if len(cells) != header[0]:
                raise MalformedEmbedding(
                    f"line {lineno}: expected {header[0]} values, got {len(cells)}"
                )
            try:
                row = [float(c) for c in cells]
            except ValueError as e:
                raise MalformedEmbedding(f"line {lineno}: non-numeric value") from e
            if not all(math.isfinite(v) for v in row):
                raise MalformedEmbedding(f"line {lineno}: non-finite value")
            rows.append(row)

    if header is None:
        raise MalformedEmbedding("missing header line")
    if len(rows) != header[1]:
        raise MalformedEmbedding(f"header declares {header[1]} tokens, body has {len(rows)} rows")
    return EmbeddingMatrix(values=np.array(rows, dtype=np.float64))


def write_embeddings(path: str | Path, matrix: EmbeddingMatrix, comments: list[str] | None = None) -> None:
    """Serialize in the canonical text format (9 significant digits)."""
    lines = [f"# {c}" for c in (comments or [])]
    lines.append(f"dim={matrix.dim} tokens={matrix.tokens}")
    for row in matrix.values:
        lines.append(" ".join(f"{v:.9g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def embeddings_to_features(matrix: EmbeddingMatrix) -> FeatureSequence:
    """Pure relabeling: token axis becomes time, rate 0 (no wall clock)."""
    return FeatureSequence(modality=Modality.TEXT, frames=matrix.values, frame_rate=0.0)
