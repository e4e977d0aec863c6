"""Panoramic-view aggregates: topic distributions, entity clouds, timelines.

Everything here is a pure function of a corpus snapshot, so results are
repeatable and cacheable per snapshot version.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Iterable

from .corpus import AnnotatedPost, CorpusView, Label
from .entities import normalize_surface
from .topics import UNKNOWN_TOPIC, TopicLexicon


class TopicNotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class TopicDistributionRow:
    topic: str
    misleading: int
    non_misleading: int
    unlabeled: int
    total: int
    percentage: float

    def to_json(self) -> dict:
        return {
            "topic": self.topic,
            "misleading": self.misleading,
            "non_misleading": self.non_misleading,
            "unlabeled": self.unlabeled,
            "total": self.total,
            "percentage": self.percentage,
        }


def topic_distribution(
    snapshot: CorpusView, lexicon: TopicLexicon | None = None
) -> list[TopicDistributionRow]:
    """Per-topic post counts split by label, sorted by total descending.

    When a lexicon is given, all of its topics appear (zero rows included)
    plus Unknown; row totals always partition the snapshot.
    """
    if len(snapshot) == 0:
        return []
    names: set[str] = set(snapshot.stats.per_topic)
    if lexicon is not None:
        names.update(lexicon.all_names())
    else:
        names.add(UNKNOWN_TOPIC)

    by_label: dict[str, dict[Label, int]] = {name: {} for name in names}
    for ap in snapshot:
        counts = by_label[ap.topic_name()]
        counts[ap.label] = counts.get(ap.label, 0) + 1

    total_posts = len(snapshot)
    rows = []
    for name in names:
        counts = by_label[name]
        m = counts.get(Label.MISLEADING, 0)
        nm = counts.get(Label.NON_MISLEADING, 0)
        ul = counts.get(Label.UNLABELED, 0)
        total = m + nm + ul
        rows.append(
            TopicDistributionRow(
                topic=name,
                misleading=m,
                non_misleading=nm,
                unlabeled=ul,
                total=total,
                percentage=round(100.0 * total / total_posts, 2),
            )
        )
    rows.sort(key=lambda r: (-r.total, r.topic))
    return rows


@dataclass(frozen=True)
class EntityCloudEntry:
    surface: str
    etype: str
    count: int

    def to_json(self) -> dict:
        return {"surface": self.surface, "type": self.etype, "count": self.count}


@dataclass(frozen=True)
class EntityCloud:
    topic: str | None
    misleading: tuple[EntityCloudEntry, ...]
    non_misleading: tuple[EntityCloudEntry, ...]

    def to_json(self) -> dict:
        return {
            "topic": self.topic,
            "misleading": [e.to_json() for e in self.misleading],
            "non_misleading": [e.to_json() for e in self.non_misleading],
        }


def _known_topics(snapshot: CorpusView, lexicon: TopicLexicon | None) -> set[str]:
    names = set(snapshot.stats.per_topic)
    names.add(UNKNOWN_TOPIC)
    if lexicon is not None:
        names.update(lexicon.all_names())
    return names


def _matching_posts(snapshot: CorpusView, topic: str | None) -> Iterable[AnnotatedPost]:
    if topic is None:
        return iter(snapshot)
    return (ap for ap in snapshot if ap.topic_name() == topic)


def _top_entities(posts: Iterable[AnnotatedPost], n: int) -> tuple[EntityCloudEntry, ...]:
    freq: dict[tuple[str, str], int] = {}
    for ap in posts:
        for span in ap.entities or ():
            key = (normalize_surface(span.surface), span.etype.value)
            freq[key] = freq.get(key, 0) + 1
    ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0][0], kv[0][1]))
    return tuple(
        EntityCloudEntry(surface=surface, etype=etype, count=count)
        for (surface, etype), count in ranked[:n]
    )


def entity_cloud(
    snapshot: CorpusView,
    topic: str | None = None,
    n: int = 50,
    lexicon: TopicLexicon | None = None,
) -> EntityCloud:
    """Top-N entity frequencies among a topic's posts, split by label.

    Ties order by surface then type; an unknown topic name is an error.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if topic is not None and topic not in _known_topics(snapshot, lexicon):
        raise TopicNotFoundError(topic)
    posts = list(_matching_posts(snapshot, topic))
    return EntityCloud(
        topic=topic,
        misleading=_top_entities((p for p in posts if p.label is Label.MISLEADING), n),
        non_misleading=_top_entities((p for p in posts if p.label is Label.NON_MISLEADING), n),
    )


GRANULARITIES = ("day", "week", "month")


@dataclass(frozen=True)
class TimeBucket:
    start: datetime
    misleading: int
    non_misleading: int
    unlabeled: int

    def to_json(self) -> dict:
        return {
            "start": self.start.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "misleading": self.misleading,
            "non_misleading": self.non_misleading,
            "unlabeled": self.unlabeled,
        }


@dataclass(frozen=True)
class TimeSeries:
    granularity: str
    buckets: tuple[TimeBucket, ...]

    def to_json(self) -> dict:
        return {
            "granularity": self.granularity,
            "buckets": [b.to_json() for b in self.buckets],
        }


def _bucket_start(ts: datetime, granularity: str) -> datetime:
    ts = ts.astimezone(timezone.utc)
    day = ts.replace(hour=0, minute=0, second=0, microsecond=0)
    if granularity == "day":
        return day
    if granularity == "week":
        return day - timedelta(days=day.weekday())  # weeks start Monday UTC
    if granularity == "month":
        return day.replace(day=1)
    raise ValueError(f"unknown granularity: {granularity!r}")


def _next_bucket(start: datetime, granularity: str) -> datetime:
    if granularity == "day":
        return start + timedelta(days=1)
    if granularity == "week":
        return start + timedelta(days=7)
    if start.month == 12:
        return start.replace(year=start.year + 1, month=1)
    return start.replace(month=start.month + 1)


def timeline(
    snapshot: CorpusView,
    topic: str | None = None,
    granularity: str = "day",
    lexicon: TopicLexicon | None = None,
) -> TimeSeries:
    """Contiguous zero-filled label-split counts over the matching posts."""
    if granularity not in GRANULARITIES:
        raise ValueError(f"unknown granularity: {granularity!r}")
    if topic is not None and topic not in _known_topics(snapshot, lexicon):
        raise TopicNotFoundError(topic)

    counts: dict[datetime, dict[Label, int]] = {}
    for ap in _matching_posts(snapshot, topic):
        start = _bucket_start(ap.post.timestamp, granularity)
        bucket = counts.setdefault(start, {})
        bucket[ap.label] = bucket.get(ap.label, 0) + 1
    if not counts:
        return TimeSeries(granularity=granularity, buckets=())

    buckets = []
    cursor, last = min(counts), max(counts)
    while cursor <= last:
        bucket = counts.get(cursor, {})
        buckets.append(
            TimeBucket(
                start=cursor,
                misleading=bucket.get(Label.MISLEADING, 0),
                non_misleading=bucket.get(Label.NON_MISLEADING, 0),
                unlabeled=bucket.get(Label.UNLABELED, 0),
            )
        )
        cursor = _next_bucket(cursor, granularity)
    return TimeSeries(granularity=granularity, buckets=tuple(buckets))
