"""Word-vector loading, post pooling, and exact cosine top-K queries."""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .textprep import TokenizedText

logger = logging.getLogger(__name__)


class EmbeddingError(ValueError):
    """Fatal embedding-file problem (unreadable, empty, or wrong dimension)."""


@dataclass
class EmbeddingTable:
    """Token -> d-dimensional vector, loaded from GloVe-style text."""

    vectors: dict[str, np.ndarray]
    dim: int
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, token: str) -> np.ndarray | None:
        vec = self.vectors.get(token)
        if vec is None and token.startswith("#"):
            vec = self.vectors.get(token.lstrip("#"))
        return vec


def default_embeddings_path() -> Path:
    data = resources.files("misinfo_triage") / "data"
    return Path(str(data / "mini_glove_50d.txt"))


def load_embeddings(path: str | Path, expected_dim: int | None = None) -> EmbeddingTable:
    """Parse lines of ``token v1 v2 ... vd``.

    Wrong-arity or unparseable lines are skipped and counted; duplicate
    tokens keep their first occurrence. No valid lines, or a dimension
    mismatch against ``expected_dim``, is fatal.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise EmbeddingError(f"cannot read embeddings {path}: {exc}") from exc

    vectors: dict[str, np.ndarray] = {}
    dim: int | None = expected_dim
    skipped = 0
    for line in text.splitlines():
        parts = line.split()
        if len(parts) < 2:
            if line.strip():
                skipped += 1
            continue
        token = parts[0]
        if dim is not None and len(parts) - 1 != dim:
            skipped += 1
            continue
        try:
            values = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError:
            skipped += 1
            continue
        if dim is None:
            dim = len(values)
        if token in vectors:
            continue  # first occurrence wins
        vectors[token] = values

    if not vectors or dim is None:
        raise EmbeddingError(f"no valid embedding lines in {path}")
    if expected_dim is not None and dim != expected_dim:
        raise EmbeddingError(f"dimension mismatch: file has d={dim}, expected {expected_dim}")
    if skipped:
        logger.warning("load_embeddings: skipped %d malformed line(s) in %s", skipped, path)
    return EmbeddingTable(vectors=vectors, dim=dim, skipped=skipped)


@dataclass(frozen=True)
class PostVector:
    post_id: str
    vector: np.ndarray
    coverage: float  # fraction of tokens found in the table


def embed_post(t: TokenizedText, table: EmbeddingTable, post_id: str = "") -> PostVector:
    """Mean-pool the vectors of in-vocabulary tokens.

    Hashtag tokens are also tried with the '#' stripped. All-OOV posts get
    the zero vector with coverage 0 and are excluded from similarity
    candidacy downstream.
    """
    found = [vec for tok in t.tokens if (vec := table.get(tok)) is not None]
    if not t.tokens or not found:
        return PostVector(post_id=post_id, vector=np.zeros(table.dim), coverage=0.0)
    vector = np.mean(found, axis=0)
    return PostVector(post_id=post_id, vector=vector, coverage=len(found) / len(t.tokens))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """a.b / (|a||b|), defined as 0 when either norm is 0."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def top_k(
    query: PostVector,
    vectors: Mapping[str, PostVector],
    candidates: Iterable[str],
    k: int,
) -> list[tuple[str, float]]:
    """Exact top-k by cosine, descending; ties break by post id ascending.

    Zero-coverage candidates are excluded; fewer than k candidates returns
    them all. Linear scan with a bounded heap.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scored = []
    for cid in candidates:
        pv = vectors.get(cid)
        if pv is None or pv.coverage == 0.0:
            continue
        scored.append((-cosine(query.vector, pv.vector), cid))
    best = heapq.nsmallest(k, scored)
    return [(cid, -neg) for neg, cid in best]
