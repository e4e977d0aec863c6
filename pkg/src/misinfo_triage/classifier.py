"""Semi-supervised misleading/non-misleading classification.

TF-IDF features feed an L2-regularized logistic regression trained by
full-batch gradient descent; a self-training loop admits high-confidence
predictions on unlabeled posts as pseudo-labels, round by round, until
nothing clears the threshold. Labels are encoded internally as +1
(misleading) / -1 (non-misleading) so that flipping every training label
negates the whole optimization trajectory exactly, a property the tests
assert bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.special import expit

from .corpus import Label

MISLEADING_SIGN = 1.0  # y=+1 <-> Label.MISLEADING


class DegenerateTrainingSet(ValueError):
    pass


@dataclass(frozen=True)
class SparseVector:
    """L2-normalized TF-IDF features over a fixed vocabulary."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]
    norm: float

    @classmethod
    def from_map(cls, weights: Mapping[int, float], normalize: bool = True) -> "SparseVector":
        items = sorted((i, w) for i, w in weights.items() if w != 0.0)
        values = [w for _, w in items]
        norm = math.sqrt(sum(w * w for w in values))
        if normalize and norm > 0:
            values = [w / norm for w in values]
            norm = 1.0
        return cls(
            indices=tuple(i for i, _ in items),
            weights=tuple(values),
            norm=norm if values else 0.0,
        )

    def dot_dense(self, dense: np.ndarray) -> float:
        return float(sum(w * dense[i] for i, w in zip(self.indices, self.weights)))

    def is_zero(self) -> bool:
        return not self.indices


def _to_csr(rows: Sequence[SparseVector], dim: int) -> sparse.csr_matrix:
    data: list[float] = []
    indices: list[int] = []
    indptr = [0]
    for row in rows:
        data.extend(row.weights)
        indices.extend(row.indices)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(rows), dim),
    )


@dataclass
class TfidfVocabulary:
    """Term index and smoothed IDF built from a document collection."""

    index: dict[str, int]
    idf: np.ndarray

    @classmethod
    def build(cls, docs: Iterable[Sequence[str]]) -> "TfidfVocabulary":
        df: dict[str, int] = {}
        n_docs = 0
        for tokens in docs:
            n_docs += 1
            for tok in set(tokens):
                df[tok] = df.get(tok, 0) + 1
        terms = sorted(df)
        index = {t: i for i, t in enumerate(terms)}
        idf = np.array(
            [math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in terms], dtype=np.float64
        )
        return cls(index=index, idf=idf)

    def __len__(self) -> int:
        return len(self.index)

    def featurize(self, tokens: Sequence[str]) -> SparseVector:
        """TF-IDF weights, L2-normalized; out-of-vocabulary tokens ignored."""
        counts: dict[int, int] = {}
        for tok in tokens:
            idx = self.index.get(tok)
            if idx is not None:
                counts[idx] = counts.get(idx, 0) + 1
        return SparseVector.from_map({i: c * self.idf[i] for i, c in counts.items()})

    def terms(self) -> list[str]:
        return sorted(self.index, key=self.index.get)


@dataclass(frozen=True)
class TrainConfig:
    l2: float = 1e-2
    learning_rate: float = 0.5
    lr_decay: float = 0.01
    max_epochs: int = 200
    tolerance: float = 1e-6
    seed: int = 0


@dataclass(frozen=True)
class SelfTrainConfig:
    """Pseudo-labeling knobs; batch_cap=None means 10% of the unlabeled pool."""

    confidence_threshold: float = 0.9
    max_rounds: int = 10
    batch_cap: int | None = None

    def __post_init__(self):
        if not 0.5 < self.confidence_threshold <= 1.0:
            raise ValueError("confidence_threshold must be in (0.5, 1]")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be positive")
        if self.batch_cap is not None and self.batch_cap < 1:
            raise ValueError("batch_cap must be positive")


def _labels_to_signs(labels: Sequence[Label]) -> np.ndarray:
    signs = np.empty(len(labels))
    for i, label in enumerate(labels):
        if label is Label.MISLEADING:
            signs[i] = MISLEADING_SIGN
        elif label is Label.NON_MISLEADING:
            signs[i] = -MISLEADING_SIGN
        else:
            raise ValueError("training labels must be misleading or non-misleading")
    return signs


def loss_and_gradient(
    params: np.ndarray, x: sparse.csr_matrix, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray]:
    """Mean logistic loss with L2 penalty on the weights (bias unpenalized).

    ``params`` is [w..., b]; ``y`` holds +/-1 signs. Written so that negating
    (y, params) negates the gradient exactly in floating point.
    """
    w, b = params[:-1], params[-1]
    z = x @ w + b
    u = -y * z
    loss = float(np.mean(np.logaddexp(0.0, u))) + 0.5 * l2 * float(np.dot(w, w))
    s = expit(u)
    r = -y * s
    grad_w = (x.T @ r) / len(y) + l2 * w
    grad_b = float(np.mean(r))
    return loss, np.concatenate([grad_w, [grad_b]])


@dataclass
class ClassifierModel:
    """Linear model over a TF-IDF vocabulary; immutable once trained."""

    weights: np.ndarray
    bias: float
    vocabulary: TfidfVocabulary
    version: int
    config: TrainConfig
    trained_at: str
    epochs_run: int = 0

    def decision(self, vec: SparseVector) -> float:
        return vec.dot_dense(self.weights) + self.bias

    def predict_vector(self, vec: SparseVector) -> tuple[Label, float]:
        """(label, confidence); confidence = sigmoid(|decision|) in [0.5, 1]."""
        z = self.decision(vec)
        label = Label.MISLEADING if z >= 0 else Label.NON_MISLEADING
        return label, float(expit(abs(z)))

    def predict(self, tokens: Sequence[str]) -> tuple[Label, float]:
        return self.predict_vector(self.vocabulary.featurize(tokens))

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "trained_at": self.trained_at,
            "bias": self.bias,
            "weights": self.weights.tolist(),
            "vocabulary": self.vocabulary.terms(),
            "idf": self.vocabulary.idf.tolist(),
            "config": {
                "l2": self.config.l2,
                "learning_rate": self.config.learning_rate,
                "lr_decay": self.config.lr_decay,
                "max_epochs": self.config.max_epochs,
                "tolerance": self.config.tolerance,
                "seed": self.config.seed,
            },
            "epochs_run": self.epochs_run,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False), encoding="utf-8"
        )

    @classmethod
    def from_json(cls, obj: dict) -> "ClassifierModel":
        terms = list(obj["vocabulary"])
        vocab = TfidfVocabulary(
            index={t: i for i, t in enumerate(terms)},
            idf=np.array(obj["idf"], dtype=np.float64),
        )
        return cls(
            weights=np.array(obj["weights"], dtype=np.float64),
            bias=float(obj["bias"]),
            vocabulary=vocab,
            version=int(obj["version"]),
            config=TrainConfig(**obj["config"]),
            trained_at=obj["trained_at"],
            epochs_run=int(obj.get("epochs_run", 0)),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ClassifierModel":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def train_supervised(
    labeled: Sequence[tuple[SparseVector, Label]],
    vocabulary: TfidfVocabulary,
    config: TrainConfig = TrainConfig(),
    version: int = 1,
) -> ClassifierModel:
    """Fit the linear model by deterministic full-batch gradient descent.

    Stops when the gradient's infinity norm drops below the tolerance or
    after max_epochs. Requires both classes in the training set.
    """
    if not labeled:
        raise DegenerateTrainingSet("degenerate training set: empty")
    vectors = [v for v, _ in labeled]
    labels = [l for _, l in labeled]
    if len(set(labels)) < 2:
        raise DegenerateTrainingSet("degenerate training set: single class")

    y = _labels_to_signs(labels)
    dim = len(vocabulary)
    x = _to_csr(vectors, dim)
    params = np.zeros(dim + 1)
    epochs = 0
    for epoch in range(config.max_epochs):
        _, grad = loss_and_gradient(params, x, y, config.l2)
        if float(np.max(np.abs(grad))) < config.tolerance:
            break
        lr = config.learning_rate / (1.0 + config.lr_decay * epoch)
        params = params - lr * grad
        epochs = epoch + 1

    return ClassifierModel(
        weights=params[:-1],
        bias=float(params[-1]),
        vocabulary=vocabulary,
        version=version,
        config=config,
        trained_at=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        epochs_run=epochs,
    )


@dataclass(frozen=True)
class PseudoLabel:
    post_id: str
    label: Label
    confidence: float
    round: int


@dataclass
class SelfTrainResult:
    model: ClassifierModel
    pseudo_labels: list[PseudoLabel] = field(default_factory=list)
    rounds_run: int = 0

    def pseudo_by_id(self) -> dict[str, PseudoLabel]:
        return {p.post_id: p for p in self.pseudo_labels}


def self_train(
    labeled: Sequence[tuple[str, SparseVector, Label]],
    unlabeled: Sequence[tuple[str, SparseVector]],
    vocabulary: TfidfVocabulary,
    cfg: SelfTrainConfig = SelfTrainConfig(),
    train_config: TrainConfig = TrainConfig(),
    version: int = 1,
) -> SelfTrainResult:
    """Iterative pseudo-labeling.

    Each round trains on the current pool, scores the remaining unlabeled
    vectors, and admits predictions with confidence >= threshold, highest
    confidence first (ties by post id), up to the batch cap. Stops when a
    round admits nothing or max_rounds is reached; the returned model is
    always trained on the final pool.
    """
    pool: list[tuple[SparseVector, Label]] = [(v, l) for _, v, l in labeled]
    remaining: dict[str, SparseVector] = {pid: v for pid, v in unlabeled}
    cap = cfg.batch_cap if cfg.batch_cap is not None else max(1, math.ceil(0.1 * len(unlabeled)))

    pseudo: list[PseudoLabel] = []
    model = train_supervised(pool, vocabulary, train_config, version)
    rounds = 0
    for round_no in range(1, cfg.max_rounds + 1):
        if not remaining:
            break
        rounds = round_no
        scored = []
        for pid in sorted(remaining):
            label, confidence = model.predict_vector(remaining[pid])
            if confidence >= cfg.confidence_threshold:
                scored.append((-confidence, pid, label))
        if not scored:
            break
        scored.sort(key=lambda item: item[:2])
        admitted = scored[:cap]
        for neg_conf, pid, label in admitted:
            pseudo.append(
                PseudoLabel(post_id=pid, label=label, confidence=-neg_conf, round=round_no)
            )
            pool.append((remaining.pop(pid), label))
        model = train_supervised(pool, vocabulary, train_config, version)

    return SelfTrainResult(model=model, pseudo_labels=pseudo, rounds_run=rounds)
