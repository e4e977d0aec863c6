"""Post storage: ingestion, validation, deduplication, snapshots, persistence.

The store is the single source of truth. Writes are serialized behind a
lock; every read goes through an immutable point-in-time snapshot, so
annotated views can be handed to other threads safely. Persistence is
line-delimited JSON, one post per line, append-friendly and diffable.
"""

from __future__ import annotations

import csv
import json
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .entities import EntitySpan
from .sentiment import SentimentScore
from .textprep import tokenize
from .topics import UNKNOWN_TOPIC, TopicLabel


class Label(Enum):
    MISLEADING = "misleading"
    NON_MISLEADING = "non-misleading"
    UNLABELED = "unlabeled"


def parse_label(value) -> Label:
    """Map a wire label ("misleading" | "non-misleading" | empty) to Label."""
    if value is None:
        return Label.UNLABELED
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("", "unlabeled"):
            return Label.UNLABELED
        if v == "misleading":
            return Label.MISLEADING
        if v in ("non-misleading", "nonmisleading", "non_misleading"):
            return Label.NON_MISLEADING
    raise ValueError(f"invalid label: {value!r}")


class IngestError(Exception):
    """Fatal ingest failure (unreadable or structurally unusable file)."""


class DuplicateIdError(ValueError):
    pass


_EPOCH_RE = re.compile(r"-?\d+")


def parse_timestamp(value) -> datetime:
    """Parse RFC 3339 text or epoch seconds into a UTC instant (second resolution).

    Naive datetimes (no offset) are rejected; so is everything else.
    """
    if isinstance(value, bool):
        raise ValueError(f"invalid timestamp: {value!r}")
    if isinstance(value, (int, float)):
        return datetime.fromtimestamp(int(value), tz=timezone.utc)
    if isinstance(value, str):
        s = value.strip()
        if _EPOCH_RE.fullmatch(s):
            return datetime.fromtimestamp(int(s), tz=timezone.utc)
        try:
            dt = datetime.fromisoformat(s.replace("Z", "+00:00").replace("z", "+00:00"))
        except ValueError as exc:
            raise ValueError(f"invalid timestamp: {value!r}") from exc
        if dt.tzinfo is None:
            raise ValueError(f"timestamp lacks a UTC offset: {value!r}")
        return dt.astimezone(timezone.utc).replace(microsecond=0)
    raise ValueError(f"invalid timestamp: {value!r}")


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class RawPost:
    id: str
    text: str
    timestamp: datetime
    source: str = ""


@dataclass(frozen=True)
class AnnotatedPost:
    """A post plus all derived annotations; the system's unit of work.

    ``versions`` records which model/data version produced each annotation
    ("human" for feedback- or seed-derived values). Human labels always carry
    confidence 1.0.
    """

    post: RawPost
    label: Label = Label.UNLABELED
    label_confidence: float | None = None
    label_source: str | None = None
    topic: TopicLabel | None = None
    entities: tuple[EntitySpan, ...] | None = None
    sentiment: SentimentScore | None = None
    vector_id: str | None = None
    versions: Mapping[str, str] = field(default_factory=dict)

    @property
    def id(self) -> str:
        return self.post.id

    def topic_name(self) -> str:
        return self.topic.name if self.topic is not None else UNKNOWN_TOPIC

    def to_json(self) -> dict:
        return {
            "id": self.post.id,
            "text": self.post.text,
            "timestamp": format_timestamp(self.post.timestamp),
            "source": self.post.source,
            "label": None if self.label is Label.UNLABELED else self.label.value,
            "label_confidence": self.label_confidence,
            "label_source": self.label_source,
            "topic": self.topic.to_json() if self.topic is not None else None,
            "entities": [e.to_json() for e in self.entities] if self.entities is not None else None,
            "sentiment": self.sentiment.to_json() if self.sentiment is not None else None,
            "vector_id": self.vector_id,
            "versions": dict(self.versions),
        }


def _post_from_record(obj: Mapping) -> AnnotatedPost:
    """Build an AnnotatedPost from one ingest/persistence record.

    Annotation fields are optional; a bare label with no confidence is a
    human label (confidence 1.0). This keeps export -> ingest a lossless
    round trip.
    """
    post_id = obj.get("id")
    if not isinstance(post_id, str) or not post_id.strip():
        raise ValueError("missing or empty id")
    text = obj.get("text")
    if not isinstance(text, str) or not text.strip():
        raise ValueError("missing or empty text")
    if "timestamp" not in obj or obj["timestamp"] is None:
        raise ValueError("missing timestamp")
    ts = parse_timestamp(obj["timestamp"])
    source = obj.get("source") or ""
    if not isinstance(source, str):
        raise ValueError("source must be a string")

    label = parse_label(obj.get("label"))
    confidence = obj.get("label_confidence")
    label_source = obj.get("label_source")
    if label is not Label.UNLABELED:
        if confidence is None:
            confidence = 1.0
            label_source = label_source or "human"
        else:
            confidence = float(confidence)
            if not 0.0 <= confidence <= 1.0:
                raise ValueError(f"label_confidence out of range: {confidence}")
        if label_source == "human" and confidence != 1.0:
            raise ValueError("human labels must carry confidence 1.0")
    else:
        confidence = None
        label_source = None

    topic = TopicLabel.from_json(obj["topic"]) if obj.get("topic") else None
    entities = (
        tuple(EntitySpan.from_json(e) for e in obj["entities"])
        if obj.get("entities") is not None
        else None
    )
    sentiment = SentimentScore.from_json(obj["sentiment"]) if obj.get("sentiment") else None

    return AnnotatedPost(
        post=RawPost(id=post_id.strip(), text=text, timestamp=ts, source=source),
        label=label,
        label_confidence=confidence,
        label_source=label_source,
        topic=topic,
        entities=entities,
        sentiment=sentiment,
        vector_id=obj.get("vector_id"),
        versions=dict(obj.get("versions") or {}),
    )


@dataclass(frozen=True)
class CorpusStats:
    total: int
    per_label: dict[str, int]
    per_topic: dict[str, int]
    time_range: tuple[datetime, datetime] | None

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "per_label": dict(self.per_label),
            "per_topic": dict(self.per_topic),
            "time_range": [format_timestamp(self.time_range[0]), format_timestamp(self.time_range[1])]
            if self.time_range
            else None,
        }


def compute_stats(posts: Iterable[AnnotatedPost]) -> CorpusStats:
    total = 0
    per_label: dict[str, int] = {}
    per_topic: dict[str, int] = {}
    t_min: datetime | None = None
    t_max: datetime | None = None
    for ap in posts:
        total += 1
        per_label[ap.label.value] = per_label.get(ap.label.value, 0) + 1
        name = ap.topic_name()
        per_topic[name] = per_topic.get(name, 0) + 1
        ts = ap.post.timestamp
        t_min = ts if t_min is None or ts < t_min else t_min
        t_max = ts if t_max is None or ts > t_max else t_max
    time_range = (t_min, t_max) if t_min is not None and t_max is not None else None
    return CorpusStats(total=total, per_label=per_label, per_topic=per_topic, time_range=time_range)


@dataclass(frozen=True)
class CorpusView:
    """Read-only point-in-time view of the store. Safe to share across threads."""

    posts: Mapping[str, AnnotatedPost]
    stats: CorpusStats

    def __len__(self) -> int:
        return self.stats.total

    def __iter__(self) -> Iterator[AnnotatedPost]:
        return iter(self.posts.values())

    def get(self, post_id: str) -> AnnotatedPost | None:
        return self.posts.get(post_id)

    def ids(self) -> tuple[str, ...]:
        return tuple(self.posts)


@dataclass(frozen=True)
class RejectRecord:
    line: int
    reason: str

    def to_json(self) -> dict:
        return {"line": self.line, "reason": self.reason}


@dataclass(frozen=True)
class IngestResult:
    stats: CorpusStats
    ingested: int
    rejects: tuple[RejectRecord, ...]


class RelevanceMatch(Enum):
    NO_MATCH = "no-match"
    SINGLE_MATCH = "single-match"
    MULTI_MATCH = "multi-match"


def relevance_filter(post: RawPost, keywords: list[str]) -> RelevanceMatch:
    """Count distinct keywords present as normalized tokens in the post text.

    Single-keyword posts are the ones flagged for human relevance review.
    """
    if not keywords:
        raise ValueError("keywords must be non-empty")
    if any(k != k.lower() for k in keywords):
        raise ValueError("keywords must be lowercase")
    tokens = set(tokenize(post.text).tokens)
    tokens.update(t.lstrip("#") for t in tuple(tokens) if t.startswith("#"))
    count = sum(1 for k in set(keywords) if k in tokens)
    if count == 0:
        return RelevanceMatch.NO_MATCH
    if count == 1:
        return RelevanceMatch.SINGLE_MATCH
    return RelevanceMatch.MULTI_MATCH


class CorpusStore:
    """Single-writer post store. All mutation happens under one lock."""

    def __init__(self) -> None:
        self._posts: dict[str, AnnotatedPost] = {}
        self._lock = threading.RLock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._posts)

    def add(self, annotated: AnnotatedPost) -> None:
        with self._lock:
            if annotated.id in self._posts:
                raise DuplicateIdError(annotated.id)
            self._posts[annotated.id] = annotated

    def get(self, post_id: str) -> AnnotatedPost | None:
        with self._lock:
            return self._posts.get(post_id)

    def replace_all(self, posts: Iterable[AnnotatedPost]) -> None:
        """Swap in a freshly annotated corpus (same ids, new annotations)."""
        new = {ap.id: ap for ap in posts}
        with self._lock:
            self._posts = new

    def update(self, annotated: AnnotatedPost) -> None:
        with self._lock:
            if annotated.id not in self._posts:
                raise KeyError(annotated.id)
            self._posts[annotated.id] = annotated

    def snapshot(self) -> CorpusView:
        with self._lock:
            frozen = dict(self._posts)
        return CorpusView(posts=MappingProxyType(frozen), stats=compute_stats(frozen.values()))

    # -- ingestion -----------------------------------------------------------

    def ingest(
        self,
        path: str | Path,
        format: str = "jsonl",
        rejects_path: str | Path | None = None,
    ) -> IngestResult:
        """Load a JSONL or CSV file of posts.

        Malformed records land in the rejects report and never abort the
        batch; duplicate ids are resolved first-wins. An unreadable file or
        an unknown format is fatal.
        """
        path = Path(path)
        if format == "jsonl":
            records = self._iter_jsonl(path)
        elif format == "csv":
            records = self._iter_csv(path)
        else:
            raise IngestError(f"unknown ingest format: {format!r}")

        ingested = 0
        rejects: list[RejectRecord] = []
        with self._lock:
            for line_no, record, error in records:
                if error is not None:
                    rejects.append(RejectRecord(line=line_no, reason=error))
                    continue
                try:
                    ap = _post_from_record(record)
                except ValueError as exc:
                    rejects.append(RejectRecord(line=line_no, reason=str(exc)))
                    continue
                if ap.id in self._posts:
                    rejects.append(RejectRecord(line=line_no, reason=f"duplicate id: {ap.id}"))
                    continue
                self._posts[ap.id] = ap
                ingested += 1

        if rejects_path is not None:
            write_rejects(rejects, rejects_path)
        return IngestResult(
            stats=self.snapshot().stats, ingested=ingested, rejects=tuple(rejects)
        )

    @staticmethod
    def _iter_jsonl(path: Path):
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"cannot read {path}: {exc}") from exc
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                yield line_no, None, f"invalid json: {exc.msg}"
                continue
            if not isinstance(obj, dict):
                yield line_no, None, "record is not a json object"
                continue
            yield line_no, obj, None

    @staticmethod
    def _iter_csv(path: Path):
        try:
            handle = path.open(newline="", encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"cannot read {path}: {exc}") from exc
        with handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None:
                return  # empty file: zero records
            required = {"id", "text", "timestamp"}
            missing = required - set(reader.fieldnames)
            if missing:
                raise IngestError(f"csv missing required columns: {sorted(missing)}")
            for line_no, row in enumerate(reader, start=2):  # header is line 1
                record = {k: v for k, v in row.items() if k in
                          ("id", "text", "timestamp", "label", "source") and v not in (None, "")}
                yield line_no, record, None

    # -- persistence ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write one AnnotatedPost per line, insertion order, stable keys."""
        with self._lock:
            lines = [
                json.dumps(ap.to_json(), sort_keys=True, ensure_ascii=False)
                for ap in self._posts.values()
            ]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CorpusStore":
        store = cls()
        result = store.ingest(path, format="jsonl")
        if result.rejects:
            raise IngestError(
                f"store file {path} contains invalid records "
                f"(first: line {result.rejects[0].line}: {result.rejects[0].reason})"
            )
        return store


def write_rejects(rejects: Iterable[RejectRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(r.to_json(), sort_keys=True) for r in rejects]
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
