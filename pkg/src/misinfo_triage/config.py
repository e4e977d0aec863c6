"""Application configuration: one JSON file, packaged-data fallbacks.

Every key is optional; unset data paths fall back to the files shipped in
``misinfo_triage/data``. The CONCIERGE_CONFIG environment variable can point
at a config file when no --config flag is given.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .classifier import SelfTrainConfig, TrainConfig
from .entities import FuzzyConfig
from .textprep import PrepOptions

ENV_VAR = "CONCIERGE_CONFIG"


def _data_file(name: str) -> str:
    return str(resources.files("misinfo_triage") / "data" / name)


@dataclass(frozen=True)
class LdaParams:
    num_topics: int = 12
    alpha: float | None = None  # None -> 50/T
    beta: float = 0.01
    iterations: int = 500
    seed: int = 0


@dataclass(frozen=True)
class AppConfig:
    data_dir: str = "concierge_data"
    store_path: str | None = None        # default: <data_dir>/corpus.jsonl
    rejects_path: str | None = None      # default: <data_dir>/rejects.jsonl
    feedback_log: str | None = None      # default: <data_dir>/feedback.jsonl
    model_path: str | None = None        # default: <data_dir>/classifier.json

    topic_lexicon_path: str = field(default_factory=lambda: _data_file("topic_lexicon.json"))
    gazetteer_paths: tuple[str, ...] = field(
        default_factory=lambda: (
            _data_file("gazetteer_vac_seed.json"),
            _data_file("gazetteer_extra.json"),
        )
    )
    sentiment_lexicon_path: str = field(default_factory=lambda: _data_file("sentiment_lexicon.tsv"))
    boosters_raise_path: str = field(default_factory=lambda: _data_file("boosters_raise.txt"))
    boosters_dampen_path: str = field(default_factory=lambda: _data_file("boosters_dampen.txt"))
    negations_path: str = field(default_factory=lambda: _data_file("negations.txt"))

    embeddings_path: str = field(default_factory=lambda: _data_file("mini_glove_50d.txt"))
    embeddings_dim: int = 50

    host: str = "127.0.0.1"
    port: int = 8765
    default_k: int = 3
    seed: int = 0

    train: TrainConfig = TrainConfig()
    self_train: SelfTrainConfig = SelfTrainConfig()
    fuzzy: FuzzyConfig = FuzzyConfig()
    lda: LdaParams = LdaParams()
    prep: PrepOptions = PrepOptions()

    def resolve(self, key: str, default_name: str) -> Path:
        value = getattr(self, key)
        if value is not None:
            return Path(value)
        return Path(self.data_dir) / default_name

    @property
    def store_file(self) -> Path:
        return self.resolve("store_path", "corpus.jsonl")

    @property
    def rejects_file(self) -> Path:
        return self.resolve("rejects_path", "rejects.jsonl")

    @property
    def feedback_file(self) -> Path:
        return self.resolve("feedback_log", "feedback.jsonl")

    @property
    def model_file(self) -> Path:
        return self.resolve("model_path", "classifier.json")


def _merge_section(cls, defaults, section: dict):
    kwargs = {}
    for key, value in section.items():
        if not hasattr(defaults, key):
            raise ValueError(f"unknown config key: {cls.__name__.lower()}.{key}")
        kwargs[key] = value
    return replace(defaults, **kwargs)


def load_config(path: str | Path | None = None) -> AppConfig:
    """Read a JSON config file merged over defaults.

    Resolution order: explicit path, then $CONCIERGE_CONFIG, then pure
    defaults. Unknown keys are errors so typos fail loudly.
    """
    if path is None:
        env = os.environ.get(ENV_VAR)
        if env:
            path = env
    if path is None:
        return AppConfig()

    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a JSON object")

    cfg = AppConfig()
    simple_keys = {
        "data_dir", "store_path", "rejects_path", "feedback_log", "model_path",
        "topic_lexicon_path", "sentiment_lexicon_path", "boosters_raise_path",
        "boosters_dampen_path", "negations_path", "embeddings_path",
        "embeddings_dim", "host", "port", "default_k", "seed",
    }
    dotted_aliases = {"embeddings.path": "embeddings_path", "embeddings.dim": "embeddings_dim"}
    updates: dict = {}
    for key, value in raw.items():
        key = dotted_aliases.get(key, key)
        if key in simple_keys:
            updates[key] = value
        elif key == "gazetteer_paths":
            updates[key] = tuple(value)
        elif key == "train":
            updates[key] = _merge_section(TrainConfig, cfg.train, value)
        elif key == "self_train":
            updates[key] = _merge_section(SelfTrainConfig, cfg.self_train, value)
        elif key == "fuzzy":
            updates[key] = _merge_section(FuzzyConfig, cfg.fuzzy, value)
        elif key == "lda":
            updates[key] = _merge_section(LdaParams, cfg.lda, value)
        elif key == "prep":
            updates[key] = _merge_section(PrepOptions, cfg.prep, value)
        else:
            raise ValueError(f"unknown config key: {key}")
    return replace(cfg, **updates)
