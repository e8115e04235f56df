"""Skill-requirement sentence classifier and ranked skill-term extraction.

The classifier is a small fastText-style model built here from scratch:
word n-grams are hashed into a fixed bucket table, a sentence is the mean
of its n-gram embeddings, and a logistic output layer is trained by SGD
with a linearly decaying learning rate. Everything is seeded and
single-threaded so training is bit-reproducible.

Skill terms come from TF-IDF over the positively classified sentences,
each sentence acting as one document, with a minimum document frequency
cutoff; top terms are merged into skill records by shared head token.
"""

from __future__ import annotations

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from . import text_core
from .providers import DescriptionProvider
from .text_core import Sentence, ngrams

log = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1

REQUIRED_SKILLS_SECTION = "required skills"


class SingleClassCorpus(ValueError):
    pass


class EmptyTestSet(ValueError):
    pass


class EmptyCorpus(ValueError):
    pass


@dataclass
class LabeledSentence:
    sentence: Sentence
    label: int  # 1 = from a "Required Skills" section

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


@dataclass
class ClassifierConfig:
    dim: int = 50
    max_n: int = 2
    buckets: int = 2**20
    epochs: int = 5
    learning_rate: float = 0.1
    seed: int = 0


@dataclass
class SkillRecord:
    """An extracted skill: display name, keyword n-grams, optional description."""

    name: str
    keywords: list[str]
    description: str = ""
    score: float = 0.0


def _fnv1a64(text: str) -> int:
    """FNV-1a on UTF-8 bytes; a stable hash (builtin hash() is salted)."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


class SentenceClassifierModel:
    """Hashed n-gram embeddings + logistic output.

    Only buckets observed during training are materialized; n-grams hashing
    to any other bucket contribute a zero vector at prediction time.
    """

    def __init__(
        self,
        config: ClassifierConfig,
        bucket_ids: list[int],
        embeddings: np.ndarray,
        output_weights: np.ndarray,
        bias: float,
        train_losses: list[float] | None = None,
    ):
        self.config = config
        self.bucket_ids = bucket_ids
        self.bucket_to_row = {b: i for i, b in enumerate(bucket_ids)}
        self.embeddings = embeddings
        self.output_weights = output_weights
        self.bias = bias
        self.train_losses = train_losses or []

    def _feature_buckets(self, sentence: Sentence) -> list[int]:
        return [
            _fnv1a64(ng.text) % self.config.buckets
            for ng in ngrams(sentence, self.config.max_n)
        ]

    def _sentence_vector(self, sentence: Sentence) -> np.ndarray:
        buckets = self._feature_buckets(sentence)
        if not buckets:
            return np.zeros(self.config.dim)
        vec = np.zeros(self.config.dim)
        for b in buckets:
            row = self.bucket_to_row.get(b)
            if row is not None:
                vec += self.embeddings[row]
        return vec / len(buckets)

    def predict_probability(self, sentence: Sentence) -> float:
        z = float(np.dot(self.output_weights, self._sentence_vector(sentence)) + self.bias)
        return _sigmoid(z)

    def save(self, path: str) -> None:
        payload = {
            "version": MODEL_FORMAT_VERSION,
            "kind": "sentence-classifier",
            "config": {
                "dim": self.config.dim,
                "max_n": self.config.max_n,
                "buckets": self.config.buckets,
                "epochs": self.config.epochs,
                "learning_rate": self.config.learning_rate,
                "seed": self.config.seed,
                "stemmer_version": text_core.STEMMER_VERSION,
            },
            "bucket_ids": self.bucket_ids,
            "embeddings": self.embeddings.tolist(),
            "output_weights": self.output_weights.tolist(),
            "bias": self.bias,
            "train_losses": self.train_losses,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, separators=(",", ":"))

    @classmethod
    def load(cls, path: str) -> "SentenceClassifierModel":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("kind") != "sentence-classifier":
            raise ValueError(f"{path} is not a sentence classifier model file")
        cfg = payload["config"]
        config = ClassifierConfig(
            dim=cfg["dim"],
            max_n=cfg["max_n"],
            buckets=cfg["buckets"],
            epochs=cfg["epochs"],
            learning_rate=cfg["learning_rate"],
            seed=cfg["seed"],
        )
        return cls(
            config=config,
            bucket_ids=payload["bucket_ids"],
            embeddings=np.asarray(payload["embeddings"], dtype=np.float64).reshape(
                len(payload["bucket_ids"]), config.dim
            ),
            output_weights=np.asarray(payload["output_weights"], dtype=np.float64),
            bias=payload["bias"],
            train_losses=payload["train_losses"],
        )


def _sigmoid(z: float) -> float:
    z = max(-30.0, min(30.0, z))
    return 1.0 / (1.0 + math.exp(-z))


def train_sentence_classifier(
    data: list[LabeledSentence], config: ClassifierConfig | None = None
) -> SentenceClassifierModel:
    """Train the binary skill-sentence classifier.

    Per-sentence SGD on logistic loss; the sentence representation is the
    mean of its hashed n-gram embeddings, and both the output layer and the
    contributing embeddings are updated each step.
    """
    config = config or ClassifierConfig()
    labels = {ls.label for ls in data}
    if labels != {0, 1}:
        raise SingleClassCorpus(f"training data must contain both labels, got {sorted(labels)}")

    rng = np.random.default_rng(config.seed)

    features = []
    seen = set()
    for ls in data:
        buckets = [
            _fnv1a64(ng.text) % config.buckets
            for ng in ngrams(ls.sentence, config.max_n)
        ]
        features.append(buckets)
        seen.update(buckets)

    bucket_ids = sorted(seen)
    bucket_to_row = {b: i for i, b in enumerate(bucket_ids)}
    embeddings = rng.uniform(-1.0 / config.dim, 1.0 / config.dim, size=(len(bucket_ids), config.dim))
    w = np.zeros(config.dim)
    bias = 0.0

    rows_per_sentence = [
        np.array([bucket_to_row[b] for b in buckets], dtype=np.intp) for buckets in features
    ]
    targets = np.array([float(ls.label) for ls in data])

    def epoch_loss() -> float:
        total = 0.0
        for rows, y in zip(rows_per_sentence, targets):
            h = embeddings[rows].mean(axis=0) if len(rows) else np.zeros(config.dim)
            p = _sigmoid(float(np.dot(w, h) + bias))
            p = min(max(p, 1e-12), 1.0 - 1e-12)
            total += -(y * math.log(p) + (1.0 - y) * math.log(1.0 - p))
        return float(total / len(data))

    total_steps = config.epochs * len(data)
    step = 0
    train_losses = []
    for _ in range(config.epochs):
        order = rng.permutation(len(data))
        for idx in order:
            rows = rows_per_sentence[idx]
            lr = config.learning_rate * (1.0 - step / total_steps)
            step += 1
            h = embeddings[rows].mean(axis=0) if len(rows) else np.zeros(config.dim)
            p = _sigmoid(float(np.dot(w, h) + bias))
            g = float(p - targets[idx])
            if len(rows):
                # gradient w.r.t. each contributing embedding, via the mean
                np.subtract.at(embeddings, rows, (lr * g / len(rows)) * w)
            w = w - lr * g * h
            bias -= lr * g
        train_losses.append(epoch_loss())

    return SentenceClassifierModel(
        config=config,
        bucket_ids=bucket_ids,
        embeddings=embeddings,
        output_weights=w,
        bias=bias,
        train_losses=train_losses,
    )


def classify_sentence(model: SentenceClassifierModel, sentence: Sentence) -> dict:
    """Probability that the sentence states a skill requirement; label 1 at p >= 0.5."""
    p = model.predict_probability(sentence)
    return {"probability": p, "label": 1 if p >= 0.5 else 0}


def evaluate_f1(model: SentenceClassifierModel, test: list[LabeledSentence]) -> dict:
    """Precision/recall/F1 of the positive class on a labeled set."""
    if not test:
        raise EmptyTestSet("test set is empty")
    tp = fp = fn = 0
    for ls in test:
        predicted = classify_sentence(model, ls.sentence)["label"]
        if predicted == 1 and ls.label == 1:
            tp += 1
        elif predicted == 1 and ls.label == 0:
            fp += 1
        elif predicted == 0 and ls.label == 1:
            fn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}


def extract_skill_terms(
    positive_sentences: list[Sentence],
    min_df: int = 3,
    max_n: int = text_core.DEFAULT_MAX_N,
    top_k: int = 16,
) -> list[SkillRecord]:
    """Rank n-grams of skill sentences by summed TF-IDF and merge into skills.

    Each sentence is one document. For a term with document frequency df in
    N documents: idf = ln((1+N)/(1+df)) + 1, and its score is the sum over
    documents of raw count * idf. Terms below min_df are discarded. The
    top_k terms are grouped by head token; a group's keywords are its terms
    (best first), its name is the best term, and its score is the group sum.
    """
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    scored = sorted(
        term_scores(positive_sentences, min_df=min_df, max_n=max_n).items(),
        key=lambda item: (-item[1], item[0]),
    )
    top = scored[:top_k]

    groups: dict[str, list[tuple[str, float]]] = {}
    for term, score in top:
        head = term.split(" ", 1)[0]
        groups.setdefault(head, []).append((term, score))

    records = []
    for members in groups.values():
        records.append(
            SkillRecord(
                name=members[0][0],
                keywords=[term for term, _ in members],
                description="",
                score=sum(score for _, score in members),
            )
        )
    records.sort(key=lambda r: (-r.score, r.name))
    return records


def term_scores(
    positive_sentences: list[Sentence],
    min_df: int = 3,
    max_n: int = text_core.DEFAULT_MAX_N,
) -> dict[str, float]:
    """Summed TF-IDF score per n-gram with document frequency >= min_df."""
    if not positive_sentences:
        raise EmptyCorpus("no skill sentences to extract terms from")
    doc_counts = [Counter(ng.text for ng in ngrams(s, max_n)) for s in positive_sentences]
    n_docs = len(doc_counts)
    df: Counter[str] = Counter()
    total: Counter[str] = Counter()
    for counts in doc_counts:
        for term, count in counts.items():
            df[term] += 1
            total[term] += count
    return {
        term: total[term] * (math.log((1 + n_docs) / (1 + doc_freq)) + 1.0)
        for term, doc_freq in df.items()
        if doc_freq >= min_df
    }


def enrich_description(skill: SkillRecord, provider: DescriptionProvider) -> SkillRecord:
    """Fill the skill description from a lookup provider; no-op on a miss."""
    text = provider.lookup(skill.name)
    if text is None:
        log.warning("no description found for skill %r", skill.name)
        return skill
    return replace(skill, description=text)


def load_vacancy_corpus(path: str, stopwords: set[str]) -> list[LabeledSentence]:
    """Read a vacancy JSONL file into labeled sentences.

    Each line is {"id": str, "sections": [{"name": str, "text": str}]}.
    Sentences from sections named "Required Skills" (case-insensitive) get
    label 1, everything else label 0.
    """
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                vacancy = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            for section in vacancy.get("sections", []):
                label = 1 if section.get("name", "").strip().lower() == REQUIRED_SKILLS_SECTION else 0
                for sentence in text_core.preprocess(
                    section.get("text", ""),
                    stopwords,
                    source_id=str(vacancy.get("id", lineno)),
                    section_label=section.get("name", ""),
                ):
                    out.append(LabeledSentence(sentence=sentence, label=label))
    return out


def seeded_split(items: list, train_frac: float, seed: int) -> tuple[list, list]:
    """Deterministic shuffled train/eval split."""
    if not 0.0 < train_frac < 1.0:
        raise ValueError(f"train_frac must be in (0,1), got {train_frac}")
    order = np.random.default_rng(seed).permutation(len(items))
    cut = int(round(train_frac * len(items)))
    return [items[i] for i in order[:cut]], [items[i] for i in order[cut:]]
