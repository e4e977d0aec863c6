"""Gazetteer-driven entity recognition with fuzzy matching and pattern rules.

The recognizer scans 3-/2-/1-grams longest-match-first against an immutable
gazetteer, falls back to bounded-edit-distance fuzzy lookup for uncovered
tokens, then applies pattern rules (dates, money, cardinals, and the
contextual "johnson" rule). VAC_TYPE is a first-class entity type for
vaccine names and their common misspellings.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .textprep import TokenizedText

logger = logging.getLogger(__name__)


class EntityType(Enum):
    VAC_TYPE = "VAC_TYPE"
    PERSON = "PERSON"
    ORG = "ORG"
    GPE = "GPE"
    CARDINAL = "CARDINAL"
    MONEY = "MONEY"
    NORP = "NORP"
    EVENT = "EVENT"
    DATE = "DATE"
    OTHER = "OTHER"


class GazetteerError(ValueError):
    """Seed-file validation failure."""


@dataclass(frozen=True)
class EntitySpan:
    surface: str
    start: int
    end: int
    etype: EntityType
    method: str  # "exact" | "fuzzy" | "rule"
    score: float

    def to_json(self) -> dict:
        return {
            "surface": self.surface,
            "start": self.start,
            "end": self.end,
            "type": self.etype.value,
            "method": self.method,
            "score": self.score,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "EntitySpan":
        return cls(
            surface=obj["surface"],
            start=int(obj["start"]),
            end=int(obj["end"]),
            etype=EntityType(obj["type"]),
            method=obj.get("method", "exact"),
            score=float(obj.get("score", 1.0)),
        )


def normalize_surface(surface: str) -> str:
    return " ".join(surface.lower().split())


@dataclass(frozen=True)
class Gazetteer:
    """Normalized surface -> type map; every surface is also indexed under
    its space-stripped variant so multi-word names match their run-together
    spellings."""

    index: Mapping[str, EntityType]

    def lookup(self, surface: str) -> EntityType | None:
        key = normalize_surface(surface)
        for candidate in (key, key.replace(" ", "")):
            etype = self.index.get(candidate)
            if etype is not None:
                return etype
        if key.startswith("#"):
            bare = key.lstrip("#")
            for candidate in (bare, bare.replace(" ", "")):
                etype = self.index.get(candidate)
                if etype is not None:
                    return etype
        return None

    def __contains__(self, surface: str) -> bool:
        return self.lookup(surface) is not None

    def __len__(self) -> int:
        return len(self.index)

    def surfaces(self) -> tuple[str, ...]:
        return tuple(sorted(self.index))

    def vac_surfaces(self) -> tuple[str, ...]:
        return tuple(sorted(k for k, v in self.index.items() if v is EntityType.VAC_TYPE))


@dataclass(frozen=True)
class FuzzyConfig:
    max_edit: int = 1
    min_len: int = 4   # shortest gazetteer surface eligible for edit matching
    affix_min: int = 5  # shortest token eligible for the VAC_TYPE prefix/suffix rule


DEFAULT_FUZZY = FuzzyConfig()


def _merge_entry(index: dict[str, EntityType], surface: str, etype: EntityType) -> None:
    existing = index.get(surface)
    if existing is None or existing is etype:
        index[surface] = etype
        return
    if existing is EntityType.VAC_TYPE:
        logger.warning("gazetteer conflict for %r: keeping VAC_TYPE over %s", surface, etype.value)
        return
    if etype is EntityType.VAC_TYPE:
        logger.warning("gazetteer conflict for %r: VAC_TYPE wins over %s", surface, existing.value)
    else:
        logger.warning(
            "gazetteer conflict for %r: %s overrides %s", surface, etype.value, existing.value
        )
    index[surface] = etype


def _add_with_variants(index: dict[str, EntityType], surface: str, etype: EntityType) -> None:
    key = normalize_surface(surface)
    _merge_entry(index, key, etype)
    stripped = key.replace(" ", "")
    if stripped != key:
        _merge_entry(index, stripped, etype)


def _parse_seed_file(path: Path) -> list[tuple[str, EntityType]]:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GazetteerError(f"cannot read gazetteer seed {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise GazetteerError(f"gazetteer seed {path} must be a JSON array")
    seen: dict[str, EntityType] = {}
    entries: list[tuple[str, EntityType]] = []
    for item in raw:
        try:
            surface = normalize_surface(item["surface"])
            etype = EntityType(item["type"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GazetteerError(f"bad gazetteer entry in {path}: {item!r}") from exc
        if not surface:
            raise GazetteerError(f"empty surface in {path}")
        if surface in seen and seen[surface] is not etype:
            raise GazetteerError(
                f"conflicting types for {surface!r} within {path}: "
                f"{seen[surface].value} vs {etype.value}"
            )
        seen[surface] = etype
        entries.append((surface, etype))
    return entries


def default_seed_paths() -> list[Path]:
    data = resources.files("misinfo_triage") / "data"
    return [Path(str(data / "gazetteer_vac_seed.json")), Path(str(data / "gazetteer_extra.json"))]


def build_gazetteer(seed_paths: Sequence[str | Path] | None = None) -> Gazetteer:
    """Merge seed files in order; VAC_TYPE wins cross-file conflicts,
    otherwise the later file does (with a logged warning)."""
    paths = [Path(p) for p in seed_paths] if seed_paths is not None else default_seed_paths()
    index: dict[str, EntityType] = {}
    for path in paths:
        for surface, etype in _parse_seed_file(path):
            _add_with_variants(index, surface, etype)
    return Gazetteer(index=index)


def augment(g: Gazetteer, labeled: Iterable[tuple[str, EntityType]]) -> Gazetteer:
    """Return a new gazetteer with the labeled surfaces added.

    Labeled data overrides existing entries outright (it is the human
    correction channel); conflicting duplicates within one batch are a
    validation error. The input gazetteer is unchanged.
    """
    batch: dict[str, EntityType] = {}
    for surface, etype in labeled:
        key = normalize_surface(surface)
        if not key:
            raise GazetteerError("empty surface in augmentation batch")
        if key in batch and batch[key] is not etype:
            raise GazetteerError(
                f"conflicting types for {key!r} within augmentation batch: "
                f"{batch[key].value} vs {etype.value}"
            )
        batch[key] = etype
    index = dict(g.index)
    for key, etype in batch.items():
        index[key] = etype
        stripped = key.replace(" ", "")
        if stripped != key:
            index[stripped] = etype
    return Gazetteer(index=index)


def levenshtein(a: str, b: str, bound: int) -> int:
    """Edit distance, short-circuiting to bound+1 once it cannot stay <= bound."""
    if abs(len(a) - len(b)) > bound:
        return bound + 1
    if a == b:
        return 0
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        best = cur[0]
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
            best = min(best, cur[j])
        if best > bound:
            return bound + 1
        prev = cur
    return prev[-1]


def fuzzy_match(
    token: str, g: Gazetteer, cfg: FuzzyConfig = DEFAULT_FUZZY
) -> tuple[EntityType, float] | None:
    """Near-miss lookup for a single token that had no exact hit.

    Tries bounded edit distance against gazetteer surfaces of length >=
    ``min_len`` first (nearest surface wins, ties broken lexicographically),
    then the VAC_TYPE prefix/suffix rule for tokens of length >=
    ``affix_min``. Scores: 1 - distance/len(token) for edit matches,
    len(token)/len(surface) for affix matches.
    """
    best: tuple[int, str] | None = None
    for surface in g.surfaces():
        if len(surface) < cfg.min_len:
            continue
        dist = levenshtein(token, surface, cfg.max_edit)
        if dist == 0 or dist > cfg.max_edit:
            continue
        if best is None or (dist, surface) < best:
            best = (dist, surface)
    if best is not None:
        dist, surface = best
        return g.index[surface], 1.0 - dist / max(len(token), 1)

    if len(token) >= cfg.affix_min:
        for surface in g.vac_surfaces():
            if len(surface) > len(token) and (
                surface.startswith(token) or surface.endswith(token)
            ):
                return EntityType.VAC_TYPE, len(token) / len(surface)
    return None


_MONTHS = {
    "january", "february", "march", "april", "may", "june", "july",
    "august", "september", "october", "november", "december",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec",
}
_YEAR_RE = re.compile(r"(19|20)\d{2}")
_NUMERIC_RE = re.compile(r"\d+")
_CURRENCY_RE = re.compile(r"[$£€]")
_MAGNITUDE_WORDS = {"million", "millions", "billion", "billions"}
_MONEY_WORDS = {
    "dollar", "dollars", "usd", "cash", "money", "cost", "costs", "price",
    "prices", "paid", "pay", "spent", "spend", "worth", "fund", "funding",
}
_VACCINE_CONTEXT = {"vaccine", "vaccines"}
_JOHNSON_WINDOW = 3


def _money_context(tokens: Sequence[str], i: int, raw: str) -> bool:
    lo, hi = max(0, i - 3), min(len(tokens), i + 4)
    if any(tokens[j] in _MONEY_WORDS for j in range(lo, hi)):
        return True
    return bool(_CURRENCY_RE.search(raw))


def _currency_adjacent(raw: str, digits: str) -> bool:
    return bool(re.search(_CURRENCY_RE.pattern + r"\s?" + re.escape(digits), raw))


def recognize(
    t: TokenizedText, g: Gazetteer, fuzzy_cfg: FuzzyConfig = DEFAULT_FUZZY
) -> list[EntitySpan]:
    """Detect non-overlapping typed spans, ordered by start index.

    Pass order: exact gazetteer n-grams (3/2/1, longest first, left to
    right), fuzzy single tokens, then rules. The bare token "johnson" is
    excluded from fuzzy matching: it types as VAC_TYPE only within
    ``_JOHNSON_WINDOW`` tokens of another VAC_TYPE hit or the word
    "vaccine(s)", and as PERSON otherwise.
    """
    tokens = t.tokens
    n = len(tokens)
    covered = [False] * n
    spans: list[EntitySpan] = []

    def claim(span: EntitySpan) -> None:
        spans.append(span)
        for k in range(span.start, span.end):
            covered[k] = True

    # exact pass
    i = 0
    while i < n:
        if covered[i]:
            i += 1
            continue
        matched = False
        for size in (3, 2, 1):
            if i + size > n or any(covered[i : i + size]):
                continue
            surface = " ".join(tokens[i : i + size])
            etype = g.lookup(surface)
            if etype is not None:
                claim(EntitySpan(surface, i, i + size, etype, "exact", 1.0))
                i += size
                matched = True
                break
        if not matched:
            i += 1

    # fuzzy pass over uncovered single tokens
    for i in range(n):
        if covered[i]:
            continue
        token = tokens[i].lstrip("#")
        if not token or token == "johnson" or _NUMERIC_RE.fullmatch(token):
            continue
        hit = fuzzy_match(token, g, fuzzy_cfg)
        if hit is not None:
            etype, fscore = hit
            claim(EntitySpan(tokens[i], i, i + 1, etype, "fuzzy", fscore))

    # rule pass
    def vac_nearby(i: int) -> bool:
        lo, hi = i - _JOHNSON_WINDOW, i + _JOHNSON_WINDOW
        for s in spans:
            if s.etype is EntityType.VAC_TYPE and s.start <= hi and s.end - 1 >= lo:
                return True
        return any(
            tokens[j] in _VACCINE_CONTEXT
            for j in range(max(0, lo), min(n, hi + 1))
        )

    for i in range(n):
        if covered[i]:
            continue
        token = tokens[i]
        if token == "johnson":
            etype = EntityType.VAC_TYPE if vac_nearby(i) else EntityType.PERSON
            claim(EntitySpan(token, i, i + 1, etype, "rule", 1.0))
        elif token in _MONTHS or _YEAR_RE.fullmatch(token):
            claim(EntitySpan(token, i, i + 1, EntityType.DATE, "rule", 1.0))
        elif token in _MAGNITUDE_WORDS:
            etype = EntityType.MONEY if _money_context(tokens, i, t.raw) else EntityType.CARDINAL
            claim(EntitySpan(token, i, i + 1, etype, "rule", 1.0))
        elif _NUMERIC_RE.fullmatch(token):
            etype = EntityType.MONEY if _currency_adjacent(t.raw, token) else EntityType.CARDINAL
            claim(EntitySpan(token, i, i + 1, etype, "rule", 1.0))

    spans.sort(key=lambda s: s.start)
    return spans


def load_gold(path: str | Path) -> dict[str, list[tuple[int, int, EntityType]]]:
    """Read a JSONL gold file of {"id", "spans": [{"start","end","type"}]}."""
    gold: dict[str, list[tuple[int, int, EntityType]]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        gold[obj["id"]] = [
            (int(s["start"]), int(s["end"]), EntityType(s["type"])) for s in obj["spans"]
        ]
    return gold


def _as_triples(spans: Iterable) -> set[tuple[int, int, EntityType]]:
    out = set()
    for s in spans:
        if isinstance(s, EntitySpan):
            out.add((s.start, s.end, s.etype))
        else:
            start, end, etype = s
            out.add((int(start), int(end), EntityType(etype) if not isinstance(etype, EntityType) else etype))
    return out


def evaluate(
    predicted: Mapping[str, Iterable], gold: Mapping[str, Iterable]
) -> dict[str, float]:
    """Span-level exact-match metrics (boundaries and type must agree).

    Accuracy is matched/gold spans. Precision is macro-averaged over types
    that were predicted, recall over types present in gold, and F1 is the
    harmonic mean of those two macro values.
    """
    gold_total = 0
    matched_total = 0
    per_type_pred: dict[EntityType, int] = {}
    per_type_gold: dict[EntityType, int] = {}
    per_type_match: dict[EntityType, int] = {}

    for post_id, gold_spans in gold.items():
        gtriples = _as_triples(gold_spans)
        ptriples = _as_triples(predicted.get(post_id, ()))
        gold_total += len(gtriples)
        matched = gtriples & ptriples
        matched_total += len(matched)
        for _, _, etype in gtriples:
            per_type_gold[etype] = per_type_gold.get(etype, 0) + 1
        for _, _, etype in ptriples:
            per_type_pred[etype] = per_type_pred.get(etype, 0) + 1
        for _, _, etype in matched:
            per_type_match[etype] = per_type_match.get(etype, 0) + 1
    for post_id, pred_spans in predicted.items():
        if post_id not in gold:
            for _, _, etype in _as_triples(pred_spans):
                per_type_pred[etype] = per_type_pred.get(etype, 0) + 1

    if gold_total == 0:
        raise ValueError("empty gold set")

    precisions = [
        per_type_match.get(t, 0) / count for t, count in per_type_pred.items() if count > 0
    ]
    recalls = [per_type_match.get(t, 0) / count for t, count in per_type_gold.items() if count > 0]
    precision = sum(precisions) / len(precisions) if precisions else 0.0
    recall = sum(recalls) / len(recalls) if recalls else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return {
        "accuracy": matched_total / gold_total,
        "precision": precision,
        "recall": recall,
        "f1": f1,
    }
