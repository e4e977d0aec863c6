"""Deterministic text normalization and tokenization shared by all models.

Hashtags are kept (minus case) because they carry signal for the rest of
the pipeline; URLs and user mentions are noise and are dropped. Caps and
exclamation/question counts are captured here so the sentiment scorer can
operate on a single canonical input.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")


@dataclass(frozen=True)
class PrepOptions:
    """Tokenizer switches, exposed through the app config."""

    url_strip: bool = True
    mention_strip: bool = True
    keep_hashtags: bool = True


DEFAULT_OPTIONS = PrepOptions()


@dataclass(frozen=True)
class TokenizedText:
    """Lowercased tokens plus the surface metadata downstream rules need.

    ``caps`` holds indices of tokens that were written in ALL CAPS (at least
    two letters). ``exclamations``/``questions`` count the marks seen in the
    text after URL/mention removal, before punctuation stripping.
    """

    raw: str
    tokens: tuple[str, ...]
    hashtags: tuple[str, ...]
    caps: frozenset[int]
    exclamations: int
    questions: int

    def __len__(self) -> int:
        return len(self.tokens)


def _clean_chunk(chunk: str, keep_hashtags: bool) -> str | None:
    """Strip punctuation from one whitespace-separated chunk.

    Keeps an optional leading ``#`` and apostrophes between word characters;
    everything else non-alphanumeric is removed.
    """
    hashtag = chunk.startswith("#")
    body = chunk[1:] if hashtag else chunk
    body = body.replace("’", "'")
    body = "".join(ch for ch in body if ch.isalnum() or ch == "'")
    body = body.strip("'")
    if not body:
        return None
    if hashtag and keep_hashtags:
        return "#" + body
    return body


def tokenize(raw: str, options: PrepOptions = DEFAULT_OPTIONS) -> TokenizedText:
    """Turn raw post text into a :class:`TokenizedText`.

    Pipeline: NFC-normalize, drop URLs and @mentions, count ``!``/``?``,
    split on whitespace, strip punctuation per chunk, lowercase. Empty
    input yields an empty token list.
    """
    text = unicodedata.normalize("NFC", raw)
    if options.url_strip:
        text = _URL_RE.sub(" ", text)
    if options.mention_strip:
        text = _MENTION_RE.sub(" ", text)

    exclamations = text.count("!")
    questions = text.count("?")

    tokens: list[str] = []
    caps: set[int] = set()
    for chunk in text.split():
        cleaned = _clean_chunk(chunk, options.keep_hashtags)
        if cleaned is None:
            continue
        body = cleaned.lstrip("#")
        if len(body) >= 2 and body.isupper():
            caps.add(len(tokens))
        tokens.append(cleaned.lower())

    return TokenizedText(
        raw=raw,
        tokens=tuple(tokens),
        hashtags=tuple(t for t in tokens if t.startswith("#")),
        caps=frozenset(caps),
        exclamations=exclamations,
        questions=questions,
    )


def ngrams(t: TokenizedText | tuple[str, ...], n: int) -> list[str]:
    """Contiguous n-grams joined by single spaces, order preserving.

    ``n`` larger than the token count yields an empty list.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tokens = t.tokens if isinstance(t, TokenizedText) else tuple(t)
    return [" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]
