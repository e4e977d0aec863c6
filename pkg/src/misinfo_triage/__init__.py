"""Misinformation triage: annotate a social-media corpus and recommend rebuttals."""

__version__ = "0.1.0"

from .corpus import AnnotatedPost, CorpusStore, CorpusView, Label, RawPost
from .recommend import Recommendation, RecommendationQuery, Relaxation

__all__ = [
    "AnnotatedPost",
    "CorpusStore",
    "CorpusView",
    "Label",
    "RawPost",
    "Recommendation",
    "RecommendationQuery",
    "Relaxation",
    "__version__",
]
