"""Topic discovery and assignment.

LDA fitted by collapsed Gibbs sampling discovers topic-word structure for a
human to name; runtime assignment matches posts against a curated lexicon of
per-topic keywords, with a second-pass synonym rescue for posts that would
otherwise stay Unknown.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .textprep import TokenizedText, ngrams

logger = logging.getLogger(__name__)

UNKNOWN_TOPIC = "Unknown"


class LexiconError(ValueError):
    """Topic lexicon failed validation."""


@dataclass(frozen=True)
class TopicEntry:
    name: str
    keywords: frozenset[str]
    synonyms: frozenset[str]


@dataclass(frozen=True)
class TopicLabel:
    name: str
    matched_terms: tuple[str, ...] = ()
    rescue: bool = False

    def to_json(self) -> dict:
        return {"name": self.name, "matched_terms": list(self.matched_terms), "rescue": self.rescue}

    @classmethod
    def from_json(cls, obj) -> "TopicLabel":
        return cls(
            name=obj["name"],
            matched_terms=tuple(obj.get("matched_terms", ())),
            rescue=bool(obj.get("rescue", False)),
        )


UNKNOWN_LABEL = TopicLabel(UNKNOWN_TOPIC)


@dataclass(frozen=True)
class TopicLexicon:
    """Ordered topic entries; order is the tie-breaking rule for assignment.

    "Unknown" is reserved: it never appears as an entry and never carries
    keywords.
    """

    entries: tuple[TopicEntry, ...]

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise LexiconError("topic names must be unique")
        for entry in self.entries:
            if entry.name == UNKNOWN_TOPIC:
                raise LexiconError('"Unknown" is reserved and may not be a lexicon entry')
            if not entry.name:
                raise LexiconError("empty topic name")
            for term in entry.keywords | entry.synonyms:
                if term != term.lower():
                    raise LexiconError(f"lexicon terms must be lowercase: {term!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    def all_names(self) -> tuple[str, ...]:
        return self.names + (UNKNOWN_TOPIC,)

    @classmethod
    def from_json(cls, raw: list) -> "TopicLexicon":
        entries = []
        for item in raw:
            entries.append(
                TopicEntry(
                    name=item["name"],
                    keywords=frozenset(k.lower() for k in item.get("keywords", [])),
                    synonyms=frozenset(s.lower() for s in item.get("synonyms", [])),
                )
            )
        return cls(entries=tuple(entries))

    @classmethod
    def load(cls, path: str | Path | None = None) -> "TopicLexicon":
        if path is None:
            data = resources.files("misinfo_triage") / "data"
            path = Path(str(data / "topic_lexicon.json"))
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise LexiconError(f"cannot read topic lexicon {path}: {exc}") from exc
        return cls.from_json(raw)


def _candidate_terms(t: TokenizedText) -> set[str]:
    terms = set(t.tokens)
    terms.update(tok.lstrip("#") for tok in t.tokens if tok.startswith("#"))
    terms.update(ngrams(t, 2))
    terms.update(ngrams(t, 3))
    terms.discard("")
    return terms


def _best_entry(
    terms: set[str], lex: TopicLexicon, term_set: Callable[[TopicEntry], frozenset[str]]
) -> tuple[TopicEntry, tuple[str, ...]] | None:
    best: tuple[TopicEntry, tuple[str, ...]] | None = None
    best_count = 0
    for entry in lex.entries:  # lexicon order breaks ties: earlier entry wins
        hits = tuple(sorted(term_set(entry) & terms))
        if len(hits) > best_count:
            best = (entry, hits)
            best_count = len(hits)
    return best


def assign_topic(t: TokenizedText, lex: TopicLexicon) -> TopicLabel:
    """Name the topic whose keywords hit the most distinct terms.

    Terms are unigrams (hashtag-stripped variants included) plus 2-/3-grams;
    no hits anywhere yields Unknown.
    """
    best = _best_entry(_candidate_terms(t), lex, lambda e: e.keywords)
    if best is None:
        return UNKNOWN_LABEL
    entry, hits = best
    return TopicLabel(name=entry.name, matched_terms=hits, rescue=False)


def synonym_rescue(t: TokenizedText, lex: TopicLexicon) -> TopicLabel | None:
    """Second-pass assignment over synonym sets for an Unknown post.

    Returns None when no synonym hits; the post stays Unknown.
    """
    best = _best_entry(_candidate_terms(t), lex, lambda e: e.synonyms)
    if best is None:
        return None
    entry, hits = best
    return TopicLabel(name=entry.name, matched_terms=hits, rescue=True)


def lda_stopwords() -> frozenset[str]:
    data = resources.files("misinfo_triage") / "data"
    path = Path(str(data / "lda_stopwords.txt"))
    return frozenset(
        w.strip() for w in path.read_text(encoding="utf-8").splitlines() if w.strip()
    )


@dataclass
class LdaModel:
    """Collapsed-Gibbs LDA state: integer count matrices plus hyperparameters.

    ``phi()`` and ``theta()`` expose smoothed point estimates; the raw counts
    stay available for bookkeeping checks and serialization.
    """

    num_topics: int
    alpha: float
    beta: float
    iterations: int
    seed: int
    vocab: dict[str, int]
    vocab_list: tuple[str, ...]
    topic_word: list[list[int]]
    topic_totals: list[int]
    doc_topic: list[list[int]]
    doc_lengths: list[int]
    assignments: list[list[int]] = field(repr=False, default_factory=list)

    def phi(self) -> np.ndarray:
        counts = np.asarray(self.topic_word, dtype=float)
        totals = np.asarray(self.topic_totals, dtype=float)[:, None]
        v = len(self.vocab_list)
        return (counts + self.beta) / (totals + self.beta * v)

    def theta(self) -> np.ndarray:
        counts = np.asarray(self.doc_topic, dtype=float)
        lengths = np.asarray(self.doc_lengths, dtype=float)[:, None]
        return (counts + self.alpha) / (lengths + self.alpha * self.num_topics)

    def top_words(self, topic: int, n: int) -> list[str]:
        """The n highest-probability words of a topic, ties lexicographic."""
        if not 0 <= topic < self.num_topics:
            raise ValueError(f"topic {topic} out of range")
        if n < 1:
            raise ValueError("n must be >= 1")
        row = self.phi()[topic]
        order = sorted(range(len(self.vocab_list)), key=lambda w: (-row[w], self.vocab_list[w]))
        return [self.vocab_list[w] for w in order[:n]]

    def word_totals(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for w, idx in self.vocab.items():
            totals[w] = sum(self.topic_word[t][idx] for t in range(self.num_topics))
        return totals

    def to_json(self) -> dict:
        return {
            "num_topics": self.num_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "seed": self.seed,
            "vocab": list(self.vocab_list),
            "topic_word": self.topic_word,
            "doc_topic": self.doc_topic,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LdaModel":
        vocab_list = tuple(obj["vocab"])
        topic_word = [list(map(int, row)) for row in obj["topic_word"]]
        doc_topic = [list(map(int, row)) for row in obj["doc_topic"]]
        return cls(
            num_topics=int(obj["num_topics"]),
            alpha=float(obj["alpha"]),
            beta=float(obj["beta"]),
            iterations=int(obj["iterations"]),
            seed=int(obj["seed"]),
            vocab={w: i for i, w in enumerate(vocab_list)},
            vocab_list=vocab_list,
            topic_word=topic_word,
            topic_totals=[sum(row) for row in topic_word],
            doc_topic=doc_topic,
            doc_lengths=[sum(row) for row in doc_topic],
        )


def fit_lda(
    docs: Sequence[Sequence[str]],
    num_topics: int = 12,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 500,
    seed: int = 0,
    on_sweep: Callable[[LdaModel, int], None] | None = None,
) -> LdaModel:
    """Fit LDA by sequential collapsed Gibbs sampling, deterministic per seed.

    Empty documents are skipped with a warning (their theta rows stay at the
    prior); an all-empty corpus is an error. ``on_sweep`` runs after every
    full sweep, mainly so tests can audit count conservation.
    """
    if num_topics < 2:
        raise ValueError("num_topics must be >= 2")
    if len(docs) == 0:
        raise ValueError("corpus is empty")
    if alpha is None:
        alpha = 50.0 / num_topics
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")

    vocab: dict[str, int] = {}
    doc_ids: list[list[int]] = []
    n_empty = 0
    for tokens in docs:
        ids = []
        for tok in tokens:
            if tok not in vocab:
                vocab[tok] = len(vocab)
            ids.append(vocab[tok])
        if not ids:
            n_empty += 1
        doc_ids.append(ids)
    if n_empty:
        logger.warning("fit_lda: skipping %d empty document(s)", n_empty)
    if not vocab:
        raise ValueError("corpus contains no tokens")

    n_docs = len(doc_ids)
    n_words = len(vocab)
    rng = random.Random(seed)

    topic_word = [[0] * n_words for _ in range(num_topics)]
    topic_totals = [0] * num_topics
    doc_topic = [[0] * num_topics for _ in range(n_docs)]
    assignments: list[list[int]] = []
    for d, ids in enumerate(doc_ids):
        zs = []
        for w in ids:
            t = rng.randrange(num_topics)
            zs.append(t)
            topic_word[t][w] += 1
            topic_totals[t] += 1
            doc_topic[d][t] += 1
        assignments.append(zs)

    model = LdaModel(
        num_topics=num_topics,
        alpha=alpha,
        beta=beta,
        iterations=iterations,
        seed=seed,
        vocab=vocab,
        vocab_list=tuple(sorted(vocab, key=vocab.get)),
        topic_word=topic_word,
        topic_totals=topic_totals,
        doc_topic=doc_topic,
        doc_lengths=[len(ids) for ids in doc_ids],
        assignments=assignments,
    )

    v_beta = n_words * beta
    weights = [0.0] * num_topics
    for sweep in range(iterations):
        for d, ids in enumerate(doc_ids):
            zs = assignments[d]
            ndt = doc_topic[d]
            for pos, w in enumerate(ids):
                t_old = zs[pos]
                ndt[t_old] -= 1
                topic_word[t_old][w] -= 1
                topic_totals[t_old] -= 1

                total = 0.0
                for t in range(num_topics):
                    total += (ndt[t] + alpha) * (topic_word[t][w] + beta) / (
                        topic_totals[t] + v_beta
                    )
                    weights[t] = total
                r = rng.random() * total
                t_new = 0
                while weights[t_new] < r:
                    t_new += 1

                zs[pos] = t_new
                ndt[t_new] += 1
                topic_word[t_new][w] += 1
                topic_totals[t_new] += 1
        if on_sweep is not None:
            on_sweep(model, sweep)
    return model


@dataclass(frozen=True)
class TopicReportRow:
    topic: str
    count: int
    percentage: float

    def to_json(self) -> dict:
        return {"topic": self.topic, "count": self.count, "percentage": self.percentage}


def topic_report(per_topic: dict[str, int], total: int) -> list[TopicReportRow]:
    """Rows of (topic, count, percent-of-total) sorted by count descending.

    Percentages are rounded to two decimals; ties order by topic name so the
    report is deterministic.
    """
    if total <= 0:
        return []
    rows = [
        TopicReportRow(topic=name, count=count, percentage=round(100.0 * count / total, 2))
        for name, count in per_topic.items()
    ]
    rows.sort(key=lambda r: (-r.count, r.topic))
    return rows
