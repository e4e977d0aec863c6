"""Shared fixtures: tiny corpora, hand-annotated posts, loaded resources."""

from __future__ import annotations

from datetime import datetime, timezone

import numpy as np
import pytest

from misinfo_triage.config import AppConfig
from misinfo_triage.corpus import AnnotatedPost, CorpusStore, Label, RawPost
from misinfo_triage.embeddings import PostVector
from misinfo_triage.entities import EntitySpan, EntityType
from misinfo_triage.pipeline import Resources, rebuild_snapshot
from misinfo_triage.sentiment import SentimentClass, SentimentScore
from misinfo_triage.topics import TopicLabel


def ts(day: int = 1, hour: int = 0, month: int = 1, year: int = 2021) -> datetime:
    return datetime(year, month, day, hour, tzinfo=timezone.utc)


def make_post(post_id: str, text: str = "hello world", day: int = 1, **kwargs) -> RawPost:
    return RawPost(id=post_id, text=text, timestamp=ts(day), **kwargs)


def sentiment_of(klass: SentimentClass, compound: float | None = None) -> SentimentScore:
    if compound is None:
        compound = {"positive": 0.5, "negative": -0.5, "neutral": 0.0}[klass.value]
    return SentimentScore(compound=compound, pos=0.3, neu=0.4, neg=0.3, label=klass)


def annotated(
    post_id: str,
    label: Label,
    topic: str,
    entity_pairs: list[tuple[str, EntityType]],
    klass: SentimentClass,
    text: str = "",
    day: int = 1,
) -> AnnotatedPost:
    """Hand-built fully annotated post for recommender/analytics fixtures."""
    spans = tuple(
        EntitySpan(surface=s, start=i, end=i + 1, etype=t, method="exact", score=1.0)
        for i, (s, t) in enumerate(entity_pairs)
    )
    return AnnotatedPost(
        post=make_post(post_id, text=text or f"text of {post_id}", day=day),
        label=label,
        label_confidence=1.0 if label is not Label.UNLABELED else None,
        label_source="human" if label is not Label.UNLABELED else None,
        topic=TopicLabel(name=topic),
        entities=spans,
        sentiment=sentiment_of(klass),
        vector_id=post_id,
    )


def store_of(posts) -> CorpusStore:
    store = CorpusStore()
    for ap in posts:
        store.add(ap)
    return store


def random_vectors(ids, dim: int = 16, seed: int = 7) -> dict[str, PostVector]:
    rng = np.random.default_rng(seed)
    return {
        pid: PostVector(post_id=pid, vector=rng.normal(size=dim), coverage=1.0) for pid in ids
    }


@pytest.fixture(scope="session")
def default_config() -> AppConfig:
    return AppConfig()


@pytest.fixture(scope="session")
def resources(default_config) -> Resources:
    return Resources.load(default_config)


@pytest.fixture(scope="session")
def sample_store(resources, default_config):
    from importlib import resources as ir

    store = CorpusStore()
    path = str(ir.files("misinfo_triage") / "data" / "sample_corpus.jsonl")
    result = store.ingest(path)
    assert not result.rejects
    return store


@pytest.fixture(scope="session")
def sample_snapshot(sample_store, resources, default_config):
    return rebuild_snapshot(sample_store, resources, default_config)
