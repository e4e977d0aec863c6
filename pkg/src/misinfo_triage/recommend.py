"""Counter-message retrieval: filter by topic/entities/sentiment, rank by cosine.

Strict candidates must share the source post's topic, sentiment class, and
at least one (surface, type) entity pair. When strict filtering cannot fill
k slots, an explicit relaxation ladder may drop the entity requirement and
then the sentiment requirement; relaxed results are flagged and always rank
after stricter ones, regardless of similarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .corpus import AnnotatedPost, CorpusView, Label
from .embeddings import PostVector, top_k
from .entities import normalize_surface


class Relaxation(Enum):
    STRICT = "strict"
    ALLOW_ENTITY_DROP = "entity-drop"
    ALLOW_SENTIMENT_DROP = "sentiment-drop"

    @property
    def max_tier(self) -> int:
        return {"strict": 1, "entity-drop": 2, "sentiment-drop": 3}[self.value]


class PostNotFoundError(KeyError):
    pass


class UnannotatedSourceError(ValueError):
    pass


class QueryContractError(ValueError):
    """The query violates a precondition (e.g. rebuttals for a non-misleading post)."""


@dataclass(frozen=True)
class RecommendationQuery:
    post_id: str
    target_label: Label = Label.NON_MISLEADING
    k: int = 3
    relaxation: Relaxation = Relaxation.STRICT

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class MatchedCriteria:
    topic: bool
    entities: tuple[tuple[str, str], ...]
    sentiment: bool

    def to_json(self) -> dict:
        return {
            "topic": self.topic,
            "entities": [list(pair) for pair in self.entities],
            "sentiment": self.sentiment,
        }


@dataclass(frozen=True)
class Recommendation:
    post_id: str
    similarity: float
    matched_criteria: MatchedCriteria
    relaxed: bool

    def to_json(self) -> dict:
        return {
            "post_id": self.post_id,
            "similarity": self.similarity,
            "matched_criteria": self.matched_criteria.to_json(),
            "relaxed": self.relaxed,
        }


def entity_keys(post: AnnotatedPost) -> frozenset[tuple[str, str]]:
    """(normalized surface, type) pairs used for entity-overlap matching.

    The '#' prefix is stripped so a hashtag mention and a plain mention of
    the same entity count as an overlap.
    """
    if not post.entities:
        return frozenset()
    return frozenset(
        (normalize_surface(e.surface).lstrip("#"), e.etype.value) for e in post.entities
    )


def _require_annotated(post: AnnotatedPost) -> None:
    missing = []
    if post.label is Label.UNLABELED:
        missing.append("label")
    if post.topic is None:
        missing.append("topic")
    if post.entities is None:
        missing.append("entities")
    if post.sentiment is None:
        missing.append("sentiment")
    if missing:
        raise UnannotatedSourceError(f"unannotated source: missing {', '.join(missing)}")


def _tier_match(src: AnnotatedPost, cand: AnnotatedPost, target: Label, tier: int) -> bool:
    if cand.label is not target:
        return False
    if cand.topic is None or cand.sentiment is None:
        return False
    if cand.topic.name != src.topic.name:
        return False
    if tier <= 2 and cand.sentiment.label is not src.sentiment.label:
        return False
    if tier == 1 and not (entity_keys(src) & entity_keys(cand)):
        return False
    return True


def filter_candidates(
    src: AnnotatedPost, snapshot: CorpusView, target_label: Label
) -> set[str]:
    """Strict three-criteria candidate set (source excluded)."""
    _require_annotated(src)
    return {
        ap.id
        for ap in snapshot
        if ap.id != src.id and _tier_match(src, ap, target_label, tier=1)
    }


def _criteria_for(src: AnnotatedPost, cand: AnnotatedPost) -> MatchedCriteria:
    overlap = tuple(sorted(entity_keys(src) & entity_keys(cand)))
    return MatchedCriteria(
        topic=cand.topic is not None and cand.topic.name == src.topic.name,
        entities=overlap,
        sentiment=cand.sentiment is not None and cand.sentiment.label is src.sentiment.label,
    )


def recommend(
    query: RecommendationQuery,
    snapshot: CorpusView,
    vectors: Mapping[str, PostVector],
) -> list[Recommendation]:
    """Filter, rank by cosine, and fill up to k slots tier by tier.

    Tier 1 is the strict three-criteria match; tier 2 drops the entity
    requirement; tier 3 additionally drops sentiment. Tiers never
    interleave and ids never repeat, which also makes the result for k a
    prefix of the result for k+1.
    """
    src = snapshot.get(query.post_id)
    if src is None:
        raise PostNotFoundError(query.post_id)
    if query.target_label is Label.NON_MISLEADING and src.label is not Label.MISLEADING:
        raise QueryContractError("rebuttal queries require a misleading source post")
    _require_annotated(src)
    src_vec = vectors.get(src.id)
    if src_vec is None:
        raise UnannotatedSourceError("unannotated source: missing vector")

    results: list[Recommendation] = []
    chosen: set[str] = {src.id}
    for tier in range(1, query.relaxation.max_tier + 1):
        if len(results) >= query.k:
            break
        tier_ids = [
            ap.id
            for ap in snapshot
            if ap.id not in chosen and _tier_match(src, ap, query.target_label, tier)
        ]
        ranked = top_k(src_vec, vectors, tier_ids, query.k - len(results))
        for cid, similarity in ranked:
            cand = snapshot.get(cid)
            results.append(
                Recommendation(
                    post_id=cid,
                    similarity=similarity,
                    matched_criteria=_criteria_for(src, cand),
                    relaxed=tier > 1,
                )
            )
            chosen.add(cid)
    return results


def similar_misleading(
    post_id: str,
    k: int,
    snapshot: CorpusView,
    vectors: Mapping[str, PostVector],
    relaxation: Relaxation = Relaxation.STRICT,
) -> list[Recommendation]:
    """Echo discovery: the same pipeline aimed at misleading posts."""
    query = RecommendationQuery(
        post_id=post_id, target_label=Label.MISLEADING, k=k, relaxation=relaxation
    )
    return recommend(query, snapshot, vectors)
