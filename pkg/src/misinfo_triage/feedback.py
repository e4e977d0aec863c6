"""Human feedback capture: a durable append-only log, merged at retrain time.

Feedback never mutates the live snapshot; it only feeds the next retrain.
Duplicates are stored as-is (log semantics) and deduplicated at merge time,
where the latest record per (post, field) wins.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import CorpusView, parse_label
from .entities import EntityType
from .sentiment import SentimentClass

FEEDBACK_FIELDS = ("label", "topic", "sentiment", "entity")


class FeedbackValidationError(ValueError):
    pass


class UnknownPostError(KeyError):
    pass


def validate_value(field: str, value, known_topics: Sequence[str]) -> None:
    """Check a proposed/prior value against its field's schema."""
    if field == "label":
        if value is not None:
            try:
                parse_label(value)
            except ValueError as exc:
                raise FeedbackValidationError(str(exc)) from exc
    elif field == "topic":
        if value is not None and value not in known_topics:
            raise FeedbackValidationError(f"unknown topic: {value!r}")
    elif field == "sentiment":
        if value is not None:
            try:
                SentimentClass(value)
            except ValueError as exc:
                raise FeedbackValidationError(f"invalid sentiment class: {value!r}") from exc
    elif field == "entity":
        if not isinstance(value, Mapping):
            raise FeedbackValidationError('entity feedback must be {"surface", "type"}')
        surface = value.get("surface")
        if not isinstance(surface, str) or not surface.strip():
            raise FeedbackValidationError("entity feedback needs a non-empty surface")
        try:
            EntityType(value.get("type"))
        except ValueError as exc:
            raise FeedbackValidationError(f"invalid entity type: {value.get('type')!r}") from exc
    else:
        raise FeedbackValidationError(f"unknown feedback field: {field!r}")


@dataclass(frozen=True)
class FeedbackRecord:
    id: str
    post_id: str
    field: str
    proposed: object
    prior: object
    submitted_at: str
    seq: int
    session: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "post_id": self.post_id,
            "field": self.field,
            "proposed": self.proposed,
            "prior": self.prior,
            "submitted_at": self.submitted_at,
            "seq": self.seq,
            "session": self.session,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "FeedbackRecord":
        return cls(
            id=obj["id"],
            post_id=obj["post_id"],
            field=obj["field"],
            proposed=obj.get("proposed"),
            prior=obj.get("prior"),
            submitted_at=obj["submitted_at"],
            seq=int(obj["seq"]),
            session=obj.get("session", ""),
        )


def validate_submission(
    post_id: str,
    field: str,
    proposed,
    prior,
    snapshot: CorpusView,
    known_topics: Sequence[str],
) -> None:
    """Submission-time checks: post exists, field/value schema, proposed != prior."""
    if snapshot.get(post_id) is None:
        raise UnknownPostError(post_id)
    if field not in FEEDBACK_FIELDS:
        raise FeedbackValidationError(f"unknown feedback field: {field!r}")
    validate_value(field, proposed, known_topics)
    if prior is not None:
        validate_value(field, prior, known_topics)
    if proposed == prior:
        raise FeedbackValidationError("proposed value must differ from prior")


class FeedbackLog:
    """Append-only JSONL log; survives restarts by replaying the file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._next_seq = 1 + max((r.seq for r in self.read_all()), default=0)

    def append(
        self, post_id: str, field: str, proposed, prior, session: str = ""
    ) -> FeedbackRecord:
        with self._lock:
            seq = self._next_seq
            self._next_seq += 1
            record = FeedbackRecord(
                id=f"fb-{seq:06d}",
                post_id=post_id,
                field=field,
                proposed=proposed,
                prior=prior,
                submitted_at=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
                seq=seq,
                session=session,
            )
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(record.to_json(), sort_keys=True, ensure_ascii=False))
                handle.write("\n")
            return record

    def read_all(self) -> list[FeedbackRecord]:
        if not self.path.exists():
            return []
        records = []
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                records.append(FeedbackRecord.from_json(json.loads(line)))
        return records

    def __len__(self) -> int:
        return len(self.read_all())


def merge_feedback(records: Iterable[FeedbackRecord]) -> dict[tuple[str, str], FeedbackRecord]:
    """Latest record per (post_id, field) wins; entity feedback keys on the
    surface as well, since several entity corrections can coexist."""
    merged: dict[tuple[str, str], FeedbackRecord] = {}
    for record in sorted(records, key=lambda r: r.seq):
        if record.field == "entity":
            surface = ""
            if isinstance(record.proposed, Mapping):
                surface = str(record.proposed.get("surface", "")).lower()
            key = (record.post_id, f"entity:{surface}")
        else:
            key = (record.post_id, record.field)
        merged[key] = record
    return merged
