"""Label-embedding cache: load/save, lookup, and vector arithmetic.

Cache format, one record per line (UTF-8):

    <label text> TAB v1 v2 ... vN

Labels never contain TAB or newline (the generator replaces them with a
space).  All vectors in one file share the same dimension.
"""
from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class FormatError(Exception):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class DimensionMismatch(Exception):
    def __init__(self, expected: int, found: int, line: int | None = None):
        self.expected = expected
        self.found = found
        self.line = line
        at = f" at line {line}" if line is not None else ""
        super().__init__(f"expected dimension {expected}, found {found}{at}")


class ZeroVector(Exception):
    pass


class EmptyInput(Exception):
    pass


class EmbeddingStore:
    """Immutable label -> vector mapping with optional case-folded keys."""

    def __init__(self, entries: dict[str, np.ndarray], dim: int, case_folded: bool = False):
        self.entries = entries
        self.dim = dim
        self.case_folded = case_folded

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, label: str) -> np.ndarray | None:
        """Exact-key lookup; the probe is lowercased iff the store is case-folded.

        Absent keys return None, never a default vector.
        """
        if self.case_folded:
            label = label.lower()
        return self.entries.get(label)

    def scaled(self, factor: float) -> "EmbeddingStore":
        """A copy with every vector multiplied by ``factor`` (test utility)."""
        return EmbeddingStore(
            {k: v * factor for k, v in self.entries.items()}, self.dim, self.case_folded
        )


def load_store(path: str | Path, case_fold: bool = False) -> EmbeddingStore:
    """Read a cache file; dimension is fixed by the first record.

    With ``case_fold``, keys are lowercased at load and collisions keep the
    first record (logged).
    """
    entries: dict[str, np.ndarray] = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise FormatError(lineno, "missing TAB separator")
            label, _, vector_text = line.partition("\t")
            try:
                values = [float(v) for v in vector_text.split()]
            except ValueError as exc:
                raise FormatError(lineno, f"bad number: {exc}") from exc
            if not values:
                raise FormatError(lineno, "empty vector")
            if not all(math.isfinite(v) for v in values):
                raise FormatError(lineno, "non-finite value")
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise DimensionMismatch(dim, len(values), line=lineno)
            key = label.lower() if case_fold else label
            if key in entries:
                logger.warning("duplicate embedding key %r (line %d); keeping first", key, lineno)
                continue
            entries[key] = np.asarray(values, dtype=np.float64)
    return EmbeddingStore(entries, dim or 0, case_fold)


def write_store(store: EmbeddingStore, path: str | Path) -> None:
    """Write the cache format back out with shortest round-trip decimals."""
    with open(path, "w", encoding="utf-8") as fh:
        for label in sorted(store.entries):
            vec = store.entries[label]
            fh.write(label + "\t" + " ".join(repr(float(v)) for v in vec) + "\n")


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity dot(a,b)/(|a||b|), in [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(a.shape[0], b.shape[0])
    denom_sq = float(np.dot(a, a)) * float(np.dot(b, b))
    if denom_sq == 0.0:
        raise ZeroVector("cosine of a zero vector is undefined")
    value = float(np.dot(a, b)) / math.sqrt(denom_sq)
    return max(-1.0, min(1.0, value))


def mean_pool(vectors: Sequence[np.ndarray] | Iterable[np.ndarray]) -> np.ndarray:
    """Componentwise arithmetic mean of same-dimension vectors."""
    vs = list(vectors)
    if not vs:
        raise EmptyInput("mean_pool needs at least one vector")
    dim = len(vs[0])
    for v in vs[1:]:
        if len(v) != dim:
            raise DimensionMismatch(dim, len(v))
    return np.mean(np.stack([np.asarray(v, dtype=np.float64) for v in vs]), axis=0)
