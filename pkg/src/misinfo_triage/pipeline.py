"""Full-corpus annotation and the retrain loop.

One annotation pass tokenizes every post, self-trains the classifier from
human labels, assigns topics (with synonym rescue), recognizes entities,
scores sentiment, and embeds posts, producing an immutable
:class:`PipelineSnapshot`. Feedback records merge in as human overrides:
label/topic/sentiment corrections pin those fields, entity corrections
augment the gazetteer before recognition. Given the same inputs, seeds and
config, two runs produce identical annotations.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence

from . import classifier as clf
from .config import AppConfig
from .corpus import AnnotatedPost, CorpusStore, CorpusView, Label, compute_stats
from .embeddings import EmbeddingTable, PostVector, embed_post, load_embeddings
from .entities import EntityType, Gazetteer, augment, build_gazetteer, recognize
from .feedback import FeedbackRecord, merge_feedback
from .sentiment import (
    SentimentClass,
    SentimentLexicon,
    SentimentScore,
    load_lexicon,
    score as sentiment_score,
)
from .textprep import TokenizedText, tokenize
from .topics import TopicLabel, TopicLexicon, assign_topic, synonym_rescue
from types import MappingProxyType

logger = logging.getLogger(__name__)


def _short_hash(payload: str) -> str:
    return hashlib.sha1(payload.encode("utf-8")).hexdigest()[:10]


@dataclass(frozen=True)
class Resources:
    """Loaded model inputs shared by annotation runs."""

    topic_lexicon: TopicLexicon
    gazetteer: Gazetteer
    sentiment_lexicon: SentimentLexicon
    embeddings: EmbeddingTable

    @classmethod
    def load(cls, config: AppConfig) -> "Resources":
        return cls(
            topic_lexicon=TopicLexicon.load(config.topic_lexicon_path),
            gazetteer=build_gazetteer(config.gazetteer_paths),
            sentiment_lexicon=load_lexicon(
                config.sentiment_lexicon_path,
                config.boosters_raise_path,
                config.boosters_dampen_path,
                config.negations_path,
            ),
            embeddings=load_embeddings(config.embeddings_path, config.embeddings_dim),
        )


@dataclass(frozen=True)
class PipelineSnapshot:
    """Everything a query needs, pinned to one consistent version."""

    version: int
    corpus: CorpusView
    classifier: clf.ClassifierModel | None
    topic_lexicon: TopicLexicon
    gazetteer: Gazetteer
    sentiment_lexicon: SentimentLexicon
    embeddings: EmbeddingTable
    vectors: Mapping[str, PostVector]
    built_at: str
    feedback_applied: int = 0
    pseudo_labels: tuple[clf.PseudoLabel, ...] = ()

    @property
    def classifier_version(self) -> int:
        return self.classifier.version if self.classifier is not None else 0


def _gazetteer_version(g: Gazetteer) -> str:
    payload = json.dumps(sorted((k, v.value) for k, v in g.index.items()))
    return _short_hash(payload)


def _lexicon_version(lex: TopicLexicon) -> str:
    payload = json.dumps(
        [[e.name, sorted(e.keywords), sorted(e.synonyms)] for e in lex.entries]
    )
    return _short_hash(payload)


def _sentiment_version(lex: SentimentLexicon) -> str:
    payload = json.dumps(
        [sorted(lex.valences.items()), sorted(lex.boosters.items()), sorted(lex.negations)]
    )
    return _short_hash(payload)


@dataclass(frozen=True)
class _FeedbackOverrides:
    labels: Mapping[str, Label]
    topics: Mapping[str, str]
    sentiments: Mapping[str, SentimentClass]
    entity_additions: tuple[tuple[str, EntityType], ...]

    @classmethod
    def from_records(cls, records: Iterable[FeedbackRecord]) -> "_FeedbackOverrides":
        merged = merge_feedback(records)
        labels: dict[str, Label] = {}
        topics: dict[str, str] = {}
        sentiments: dict[str, SentimentClass] = {}
        entities: dict[str, EntityType] = {}
        for record in sorted(merged.values(), key=lambda r: r.seq):
            if record.field == "label":
                labels[record.post_id] = Label(record.proposed)
            elif record.field == "topic":
                topics[record.post_id] = str(record.proposed)
            elif record.field == "sentiment":
                sentiments[record.post_id] = SentimentClass(record.proposed)
            elif record.field == "entity":
                surface = str(record.proposed["surface"])
                entities[surface.lower()] = EntityType(record.proposed["type"])
        return cls(
            labels=labels,
            topics=topics,
            sentiments=sentiments,
            entity_additions=tuple(sorted(entities.items())),
        )

    def __len__(self) -> int:
        return (
            len(self.labels) + len(self.topics) + len(self.sentiments)
            + len(self.entity_additions)
        )


def annotate_corpus(
    view: CorpusView,
    resources: Resources,
    config: AppConfig,
    version: int = 1,
    feedback: Sequence[FeedbackRecord] = (),
) -> PipelineSnapshot:
    """Run every annotation stage over the corpus and build a snapshot.

    Human signals (seed labels from ingestion plus merged feedback) always
    beat model predictions and carry confidence 1.0.
    """
    overrides = _FeedbackOverrides.from_records(feedback)
    gazetteer = resources.gazetteer
    if overrides.entity_additions:
        gazetteer = augment(gazetteer, overrides.entity_additions)

    lex_version = _lexicon_version(resources.topic_lexicon)
    gaz_version = _gazetteer_version(gazetteer)
    sent_version = _sentiment_version(resources.sentiment_lexicon)

    tokenized: dict[str, TokenizedText] = {
        ap.id: tokenize(ap.post.text, config.prep) for ap in view
    }

    # --- labels: human seeds + feedback, model for the rest ----------------
    human_labels: dict[str, Label] = {
        ap.id: ap.label
        for ap in view
        if ap.label is not Label.UNLABELED and ap.label_source == "human"
    }
    for post_id, label in overrides.labels.items():
        if label is Label.UNLABELED:
            human_labels.pop(post_id, None)
        else:
            human_labels[post_id] = label

    vocabulary = clf.TfidfVocabulary.build(tokenized[pid].tokens for pid in tokenized)
    features = {pid: vocabulary.featurize(tokenized[pid].tokens) for pid in tokenized}

    model: clf.ClassifierModel | None = None
    pseudo: tuple[clf.PseudoLabel, ...] = ()
    seed_classes = set(human_labels.values())
    if len(seed_classes) == 2:
        labeled = [
            (pid, features[pid], human_labels[pid]) for pid in sorted(human_labels)
        ]
        unlabeled = [
            (pid, features[pid]) for pid in sorted(tokenized) if pid not in human_labels
        ]
        result = clf.self_train(
            labeled,
            unlabeled,
            vocabulary,
            cfg=config.self_train,
            train_config=config.train,
            version=version,
        )
        model = result.model
        pseudo = tuple(result.pseudo_labels)
    elif human_labels:
        logger.warning(
            "classifier not trained: only one labeled class present (%s)",
            ", ".join(sorted(l.value for l in seed_classes)),
        )

    annotated: dict[str, AnnotatedPost] = {}
    for ap in view:
        pid = ap.id
        tokens = tokenized[pid]
        versions: dict[str, str] = {}

        if pid in human_labels:
            label, confidence, source = human_labels[pid], 1.0, "human"
        elif model is not None:
            label, confidence = model.predict_vector(features[pid])
            source = f"model:{model.version}"
        else:
            label, confidence, source = Label.UNLABELED, None, None
        versions["label"] = source or "none"

        if pid in overrides.topics:
            topic = TopicLabel(name=overrides.topics[pid])
            versions["topic"] = "human"
        else:
            topic = assign_topic(tokens, resources.topic_lexicon)
            if topic.name == "Unknown":
                rescued = synonym_rescue(tokens, resources.topic_lexicon)
                if rescued is not None:
                    topic = rescued
            versions["topic"] = f"lexicon:{lex_version}"

        entities = tuple(recognize(tokens, gazetteer, config.fuzzy))
        versions["entities"] = f"gazetteer:{gaz_version}"

        sent = sentiment_score(tokens, resources.sentiment_lexicon)
        if pid in overrides.sentiments:
            sent = replace(sent, label=overrides.sentiments[pid])
            versions["sentiment"] = "human"
        else:
            versions["sentiment"] = f"lexicon:{sent_version}"

        annotated[pid] = AnnotatedPost(
            post=ap.post,
            label=label,
            label_confidence=confidence,
            label_source=source,
            topic=topic,
            entities=entities,
            sentiment=sent,
            vector_id=None,
            versions=versions,
        )

    vectors: dict[str, PostVector] = {}
    for pid, tokens in tokenized.items():
        pv = embed_post(tokens, resources.embeddings, post_id=pid)
        vectors[pid] = pv
        if pv.coverage > 0:
            annotated[pid] = replace(annotated[pid], vector_id=pid)

    corpus_view = CorpusView(
        posts=MappingProxyType(annotated), stats=compute_stats(annotated.values())
    )
    return PipelineSnapshot(
        version=version,
        corpus=corpus_view,
        classifier=model,
        topic_lexicon=resources.topic_lexicon,
        gazetteer=gazetteer,
        sentiment_lexicon=resources.sentiment_lexicon,
        embeddings=resources.embeddings,
        vectors=MappingProxyType(vectors),
        built_at=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        feedback_applied=len(overrides),
        pseudo_labels=pseudo,
    )


def annotate_text(text: str, snapshot: PipelineSnapshot, config: AppConfig) -> dict:
    """Ad-hoc annotation of arbitrary text against a snapshot's models.

    Nothing is persisted; the result mirrors a stored post's annotations.
    """
    tokens = tokenize(text, config.prep)
    payload: dict = {"text": text, "tokens": list(tokens.tokens)}

    if snapshot.classifier is not None:
        label, confidence = snapshot.classifier.predict(tokens.tokens)
        payload["label"] = label.value
        payload["label_confidence"] = confidence
    else:
        payload["label"] = None
        payload["label_confidence"] = None

    topic = assign_topic(tokens, snapshot.topic_lexicon)
    if topic.name == "Unknown":
        rescued = synonym_rescue(tokens, snapshot.topic_lexicon)
        if rescued is not None:
            topic = rescued
    payload["topic"] = topic.to_json()
    payload["entities"] = [e.to_json() for e in recognize(tokens, snapshot.gazetteer, config.fuzzy)]
    payload["sentiment"] = sentiment_score(tokens, snapshot.sentiment_lexicon).to_json()
    pv = embed_post(tokens, snapshot.embeddings)
    payload["embedding_coverage"] = pv.coverage
    return payload


def rebuild_snapshot(
    store: CorpusStore,
    resources: Resources,
    config: AppConfig,
    prior_version: int = 0,
    feedback: Sequence[FeedbackRecord] = (),
) -> PipelineSnapshot:
    """Annotate the current store contents as snapshot ``prior_version + 1``."""
    return annotate_corpus(
        store.snapshot(), resources, config, version=prior_version + 1, feedback=feedback
    )
