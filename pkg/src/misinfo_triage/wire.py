"""JSON payload builders shared by the HTTP service and the CLI.

Keeping these in one place is what makes the CLI/service parity guarantee
hold: both layers serialize query results through the same functions.
"""

from __future__ import annotations

from .analytics import entity_cloud, timeline, topic_distribution
from .config import AppConfig
from .corpus import AnnotatedPost, Label, parse_label
from .pipeline import PipelineSnapshot, annotate_text
from .recommend import Relaxation, RecommendationQuery, recommend
from .topics import topic_report


def health_payload(snapshot: PipelineSnapshot) -> dict:
    return {"status": "ok", "snapshot_version": snapshot.version}


def post_payload(ap: AnnotatedPost) -> dict:
    return ap.to_json()


def posts_page_payload(
    snapshot: PipelineSnapshot,
    topic: str | None = None,
    label: str | None = None,
    page: int = 1,
    page_size: int = 20,
) -> dict:
    if page < 1:
        raise ValueError("page must be >= 1")
    if not 1 <= page_size <= 200:
        raise ValueError("page_size must be in [1, 200]")
    wanted: Label | None = None
    if label not in (None, ""):
        wanted = parse_label(label)
    posts = [
        ap
        for ap in snapshot.corpus
        if (topic in (None, "") or ap.topic_name() == topic)
        and (wanted is None or ap.label is wanted)
    ]
    start = (page - 1) * page_size
    items = posts[start : start + page_size]
    return {
        "total": len(posts),
        "page": page,
        "page_size": page_size,
        "items": [post_payload(ap) for ap in items],
    }


def stats_topics_payload(snapshot: PipelineSnapshot) -> dict:
    rows = topic_distribution(snapshot.corpus, snapshot.topic_lexicon)
    report = topic_report(snapshot.corpus.stats.per_topic, snapshot.corpus.stats.total)
    return {
        "total": snapshot.corpus.stats.total,
        "rows": [r.to_json() for r in rows],
        "report": [r.to_json() for r in report],
    }


def stats_entities_payload(snapshot: PipelineSnapshot, topic: str | None, n: int) -> dict:
    cloud = entity_cloud(snapshot.corpus, topic, n, snapshot.topic_lexicon)
    return cloud.to_json()


def stats_timeline_payload(
    snapshot: PipelineSnapshot, topic: str | None, granularity: str
) -> dict:
    series = timeline(snapshot.corpus, topic, granularity, snapshot.topic_lexicon)
    return series.to_json()


def parse_target(target: str) -> Label:
    label = parse_label(target)
    if label is Label.UNLABELED:
        raise ValueError("target must be misleading or non-misleading")
    return label


def recommendations_payload(
    snapshot: PipelineSnapshot,
    post_id: str,
    k: int = 3,
    target: str = "non-misleading",
    relaxation: str = "sentiment-drop",
) -> dict:
    query = RecommendationQuery(
        post_id=post_id,
        target_label=parse_target(target),
        k=k,
        relaxation=Relaxation(relaxation),
    )
    items = recommend(query, snapshot.corpus, snapshot.vectors)
    return {
        "source_id": post_id,
        "k": k,
        "target": query.target_label.value,
        "relaxation": query.relaxation.value,
        "items": [r.to_json() for r in items],
    }


def analyze_payload(snapshot: PipelineSnapshot, text: str, config: AppConfig) -> dict:
    return annotate_text(text, snapshot, config)
