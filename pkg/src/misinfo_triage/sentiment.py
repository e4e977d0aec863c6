"""Rule-augmented lexicon sentiment scoring.

Valence lookups come from a plain TSV lexicon; modifier rules (negation,
boosters, ALL-CAPS emphasis, exclamation emphasis, "but"-clause reweighting)
adjust per-token valences before the raw sum is squashed into a compound
score in [-1, 1]. All rule constants live in :class:`SentimentConstants`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Mapping

from .textprep import TokenizedText


class SentimentClass(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class SentimentConstants:
    """Every tunable the scorer uses, in one block.

    Negation flips and damps (multiply by -0.74); each booster in the
    preceding window shifts magnitude by +/-0.293; an ALL-CAPS sentiment
    token gains 0.733 toward its sign; up to 4 exclamation marks add 0.292
    each toward the sign of the raw sum; the compound squash constant is 15;
    class thresholds sit at +/-0.05. Tokens after "but" weigh 1.5x, before
    it 0.5x.
    """

    negation_damp: float = -0.74
    booster_step: float = 0.293
    caps_emphasis: float = 0.733
    exclaim_step: float = 0.292
    max_exclaim: int = 4
    normalization: float = 15.0
    positive_threshold: float = 0.05
    negative_threshold: float = -0.05
    negation_window: int = 3
    booster_window: int = 3
    but_before: float = 0.5
    but_after: float = 1.5


DEFAULT_CONSTANTS = SentimentConstants()


@dataclass(frozen=True)
class SentimentScore:
    compound: float
    pos: float
    neu: float
    neg: float
    label: SentimentClass

    def to_json(self) -> dict:
        return {
            "compound": self.compound,
            "pos": self.pos,
            "neu": self.neu,
            "neg": self.neg,
            "class": self.label.value,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "SentimentScore":
        return cls(
            compound=float(obj["compound"]),
            pos=float(obj["pos"]),
            neu=float(obj["neu"]),
            neg=float(obj["neg"]),
            label=SentimentClass(obj["class"]),
        )


NEUTRAL_SCORE = SentimentScore(0.0, 0.0, 1.0, 0.0, SentimentClass.NEUTRAL)


@dataclass(frozen=True)
class SentimentLexicon:
    """Immutable valence table plus booster deltas and negation tokens."""

    valences: Mapping[str, float]
    boosters: Mapping[str, float]
    negations: frozenset[str]

    def valence(self, token: str) -> float:
        v = self.valences.get(token)
        if v is None and token.startswith("#"):
            v = self.valences.get(token.lstrip("#"))
        return v if v is not None else 0.0


def _read_lines(path: Path) -> list[str]:
    lines = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


def load_lexicon(
    lexicon_path: str | Path | None = None,
    boosters_raise_path: str | Path | None = None,
    boosters_dampen_path: str | Path | None = None,
    negations_path: str | Path | None = None,
    constants: SentimentConstants = DEFAULT_CONSTANTS,
) -> SentimentLexicon:
    """Load the valence TSV and the newline-delimited modifier lists.

    Any path left as None falls back to the packaged data files.
    """
    data = resources.files("misinfo_triage") / "data"
    lex_path = Path(lexicon_path) if lexicon_path else Path(str(data / "sentiment_lexicon.tsv"))
    raise_path = (
        Path(boosters_raise_path) if boosters_raise_path else Path(str(data / "boosters_raise.txt"))
    )
    dampen_path = (
        Path(boosters_dampen_path)
        if boosters_dampen_path
        else Path(str(data / "boosters_dampen.txt"))
    )
    neg_path = Path(negations_path) if negations_path else Path(str(data / "negations.txt"))

    valences: dict[str, float] = {}
    for line in _read_lines(lex_path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"bad lexicon line (want token<TAB>valence): {line!r}")
        token, valence = parts[0].strip().lower(), float(parts[1])
        if not math.isfinite(valence):
            raise ValueError(f"non-finite valence for {token!r}")
        valences[token] = valence

    boosters: dict[str, float] = {}
    for word in _read_lines(raise_path):
        boosters[word.lower()] = constants.booster_step
    for word in _read_lines(dampen_path):
        boosters[word.lower()] = -constants.booster_step

    negations = frozenset(w.lower() for w in _read_lines(neg_path))
    return SentimentLexicon(valences=valences, boosters=boosters, negations=negations)


def _sign(x: float) -> float:
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


def score(
    t: TokenizedText,
    lex: SentimentLexicon,
    constants: SentimentConstants = DEFAULT_CONSTANTS,
) -> SentimentScore:
    """Score one tokenized post.

    Booster and negation tokens act only as modifiers (they contribute a
    zero valence of their own). Modifier order per token: caps emphasis,
    boosters in the preceding window, negation flip/damp, then the
    "but"-clause weight.
    """
    tokens = t.tokens
    but_idx = tokens.index("but") if "but" in tokens else None

    valences: list[float] = []
    for i, token in enumerate(tokens):
        if token in lex.boosters or token in lex.negations:
            valences.append(0.0)
            continue
        v = lex.valence(token)
        if v == 0.0:
            valences.append(0.0)
            continue
        base_sign = _sign(v)
        if i in t.caps:
            v += constants.caps_emphasis * base_sign
        lo = max(0, i - constants.booster_window)
        for j in range(lo, i):
            delta = lex.boosters.get(tokens[j])
            if delta is not None:
                v += delta * base_sign
        lo = max(0, i - constants.negation_window)
        if any(tokens[j] in lex.negations for j in range(lo, i)):
            v *= constants.negation_damp
        if but_idx is not None and i != but_idx:
            v *= constants.but_before if i < but_idx else constants.but_after
        valences.append(v)

    raw = sum(valences)
    if raw != 0.0:
        raw += _sign(raw) * min(t.exclamations, constants.max_exclaim) * constants.exclaim_step

    compound = raw / math.sqrt(raw * raw + constants.normalization)
    compound = max(-1.0, min(1.0, compound))

    pos_mass = sum(v + 1.0 for v in valences if v > 0)
    neg_mass = sum(abs(v) + 1.0 for v in valences if v < 0)
    neu_mass = float(sum(1 for v in valences if v == 0))
    total = pos_mass + neg_mass + neu_mass
    if total == 0:
        pos, neu, neg = 0.0, 1.0, 0.0
    else:
        pos, neu, neg = pos_mass / total, neu_mass / total, neg_mass / total

    return SentimentScore(
        compound=compound,
        pos=pos,
        neu=neu,
        neg=neg,
        label=classify(compound, constants),
    )


def classify(compound: float, constants: SentimentConstants = DEFAULT_CONSTANTS) -> SentimentClass:
    """Three-way class from the compound score; boundaries are inclusive."""
    if compound >= constants.positive_threshold:
        return SentimentClass.POSITIVE
    if compound <= constants.negative_threshold:
        return SentimentClass.NEGATIVE
    return SentimentClass.NEUTRAL
