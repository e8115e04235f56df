"""Word-vector store and averaged-embedding text similarity.

Vectors come from a plain text file (one token followed by its components
per line, whitespace separated), e.g. pre-trained 300-dimensional GloVe.
A text is represented by the mean of its in-vocabulary token vectors and
texts are compared by cosine similarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


class DimensionMismatch(ValueError):
    pass


@dataclass
class TextVector:
    """Mean token vector plus the fraction of tokens found in the store."""

    values: np.ndarray
    coverage: float


class WordVectorStore:
    """Immutable token -> vector map; all vectors share one dimension."""

    def __init__(self, dim: int = 300):
        self.dim = dim
        self.vectors: dict[str, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def add(self, token: str, vector: Iterable[float]) -> None:
        arr = np.asarray(list(vector), dtype=np.float64)
        if arr.shape != (self.dim,):
            raise DimensionMismatch(
                f"vector for {token!r} has length {arr.shape[0]}, store dim is {self.dim}"
            )
        self.vectors[token] = arr

    @classmethod
    def load(cls, path: str, vocabulary: set[str] | None = None) -> "WordVectorStore":
        """Load a whitespace-separated vector file.

        The dimension is inferred from the first line. `vocabulary`, when
        given, keeps only those tokens (bounds memory for large files).
        """
        store = None
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip().split()
                if len(parts) < 2:
                    continue
                token, values = parts[0], parts[1:]
                if store is None:
                    store = cls(dim=len(values))
                if vocabulary is not None and token not in vocabulary:
                    continue
                store.add(token, (float(v) for v in values))
        if store is None:
            raise ValueError(f"no vectors found in {path}")
        return store


def embed_text(store: WordVectorStore, tokens: list[str]) -> TextVector:
    """Mean of in-vocabulary token vectors; zero vector if none are known."""
    found = [store.vectors[t] for t in tokens if t in store.vectors]
    if not found:
        return TextVector(values=np.zeros(store.dim), coverage=0.0)
    return TextVector(
        values=np.mean(found, axis=0),
        coverage=len(found) / len(tokens),
    )


def cosine(a: TextVector | np.ndarray, b: TextVector | np.ndarray) -> float:
    """Cosine similarity; zero-norm inputs score 0 by convention."""
    va = a.values if isinstance(a, TextVector) else np.asarray(a, dtype=np.float64)
    vb = b.values if isinstance(b, TextVector) else np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise DimensionMismatch(f"dimensions differ: {va.shape} vs {vb.shape}")
    norm = np.linalg.norm(va) * np.linalg.norm(vb)
    if norm == 0.0:
        return 0.0
    return float(np.dot(va, vb) / norm)
