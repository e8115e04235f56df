"""Random-forest classifier predicting whether a video fits its target skill.

Implemented from scratch on six fixed-order features: video length, platform
rating, view count, search relevancy score, difficulty level, and
transcript/description text similarity. Trees use axis-aligned Gini splits;
the forest probability is the fraction of trees whose leaf majority votes
"fit". Per-tree seeds derive from the master seed, so training is
deterministic, and models round-trip through a versioned JSON dump.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

MODEL_FORMAT_VERSION = 1

FEATURE_NAMES = (
    "length_s",
    "rating",
    "view_count",
    "relevancy_score",
    "level",
    "text_similarity",
)
N_FEATURES = len(FEATURE_NAMES)


class SingleClassCorpus(ValueError):
    pass


@dataclass
class FitFeatures:
    length_s: float
    rating: float
    view_count: float
    relevancy_score: float
    level: int
    text_similarity: float

    def to_array(self) -> np.ndarray:
        return np.array(
            [
                self.length_s,
                self.rating,
                self.view_count,
                self.relevancy_score,
                float(self.level),
                self.text_similarity,
            ]
        )


@dataclass
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = 12
    min_samples_leaf: int = 2
    features_per_split: int = 3  # ceil(sqrt(6))
    bootstrap: bool = True
    seed: int = 0


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


class _TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "counts")

    def __init__(self, counts: np.ndarray):
        self.feature: int | None = None
        self.threshold: float = 0.0
        self.left: "_TreeNode" | None = None
        self.right: "_TreeNode" | None = None
        self.counts = counts  # class counts of the training samples at this node

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"counts": self.counts.tolist()}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "counts": self.counts.tolist(),
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "_TreeNode":
        node = cls(np.asarray(payload["counts"], dtype=np.int64))
        if "feature" in payload:
            node.feature = payload["feature"]
            node.threshold = payload["threshold"]
            node.left = cls.from_dict(payload["left"])
            node.right = cls.from_dict(payload["right"])
        return node


def _best_split(
    X: np.ndarray, y: np.ndarray, feature_ids: np.ndarray, min_samples_leaf: int
) -> tuple[int, float] | None:
    """Lowest weighted-Gini axis-aligned split; None if nothing valid.

    Zero-improvement splits are allowed (ties are resolved toward the first
    candidate in feature/threshold order): an impure node whose best split
    does not reduce Gini, as in XOR-shaped data, must still split so that a
    fully grown tree can separate its training set.
    """
    n = len(y)
    total1 = int(y.sum())
    best = None
    best_impurity = np.inf
    for f in feature_ids:
        order = np.argsort(X[:, f], kind="stable")
        values = X[order, f]
        cum1 = np.cumsum(y[order])
        n_left = np.arange(1, n)
        l1 = cum1[:-1]
        l0 = n_left - l1
        r1 = total1 - l1
        r0 = (n - total1) - l0
        n_right = n - n_left
        valid = (
            (values[1:] != values[:-1])
            & (n_left >= min_samples_leaf)
            & (n_right >= min_samples_leaf)
        )
        if not valid.any():
            continue
        gini_left = 1.0 - (l0**2 + l1**2) / n_left**2
        gini_right = 1.0 - (r0**2 + r1**2) / n_right**2
        impurity = (n_left * gini_left + n_right * gini_right) / n
        impurity[~valid] = np.inf
        i = int(np.argmin(impurity))
        if impurity[i] < best_impurity - 1e-12:
            best_impurity = float(impurity[i])
            best = (int(f), float((values[i] + values[i + 1]) / 2.0))
    return best


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    config: ForestConfig,
    rng: np.random.Generator,
    depth: int = 0,
) -> _TreeNode:
    counts = np.bincount(y, minlength=2)
    node = _TreeNode(counts)
    if (
        counts[0] == 0
        or counts[1] == 0
        or (config.max_depth is not None and depth >= config.max_depth)
        or len(y) < 2 * config.min_samples_leaf
    ):
        return node

    k = min(config.features_per_split, N_FEATURES)
    feature_ids = np.sort(rng.choice(N_FEATURES, size=k, replace=False))
    split = _best_split(X, y, feature_ids, config.min_samples_leaf)
    if split is None:
        return node

    feature, threshold = split
    mask = X[:, feature] <= threshold
    node.feature = feature
    node.threshold = threshold
    node.left = _grow_tree(X[mask], y[mask], config, rng, depth + 1)
    node.right = _grow_tree(X[~mask], y[~mask], config, rng, depth + 1)
    return node


def _tree_vote(node: _TreeNode, x: np.ndarray) -> int:
    while not node.is_leaf:
        node = node.left if x[node.feature] <= node.threshold else node.right
    # leaf majority; an exact tie votes "fit", matching the p >= 0.5 label rule
    return 1 if node.counts[1] >= node.counts[0] else 0


class RandomForestModel:
    def __init__(self, trees: list[_TreeNode], config: ForestConfig):
        self.trees = trees
        self.config = config

    def tree_votes(self, features: FitFeatures) -> list[int]:
        x = features.to_array()
        return [_tree_vote(tree, x) for tree in self.trees]

    def save(self, path: str) -> None:
        payload = {
            "version": MODEL_FORMAT_VERSION,
            "kind": "fit-model",
            "config": {
                "n_trees": self.config.n_trees,
                "max_depth": self.config.max_depth,
                "min_samples_leaf": self.config.min_samples_leaf,
                "features_per_split": self.config.features_per_split,
                "bootstrap": self.config.bootstrap,
                "seed": self.config.seed,
            },
            "feature_names": list(FEATURE_NAMES),
            "trees": [tree.to_dict() for tree in self.trees],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, separators=(",", ":"))

    @classmethod
    def load(cls, path: str) -> "RandomForestModel":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("kind") != "fit-model":
            raise ValueError(f"{path} is not a fit model file")
        cfg = payload["config"]
        return cls(
            trees=[_TreeNode.from_dict(t) for t in payload["trees"]],
            config=ForestConfig(**cfg),
        )


def train_fit_model(
    data: list[tuple[FitFeatures, int]], config: ForestConfig | None = None
) -> RandomForestModel:
    """Train the forest on (features, fit-label) pairs."""
    config = config or ForestConfig()
    labels = {label for _, label in data}
    if labels != {0, 1}:
        raise SingleClassCorpus(f"training data must contain both labels, got {sorted(labels)}")

    X = np.stack([features.to_array() for features, _ in data])
    y = np.array([label for _, label in data], dtype=np.int64)

    seeds = np.random.SeedSequence(config.seed).spawn(config.n_trees)
    trees = []
    for seq in seeds:
        rng = np.random.default_rng(seq)
        if config.bootstrap:
            idx = rng.integers(0, len(y), size=len(y))
            trees.append(_grow_tree(X[idx], y[idx], config, rng))
        else:
            trees.append(_grow_tree(X, y, config, rng))
    return RandomForestModel(trees=trees, config=config)


def predict_fit(model: RandomForestModel, features: FitFeatures) -> dict:
    """Probability = fraction of trees voting "fit"; label 1 at p >= 0.5."""
    votes = model.tree_votes(features)
    p = sum(votes) / len(votes)
    return {"probability": p, "label": 1 if p >= 0.5 else 0}


def evaluate_fit_f1(model: RandomForestModel, data: list[tuple[FitFeatures, int]]) -> dict:
    """Precision/recall/F1 of the positive (fit) class."""
    if not data:
        raise ValueError("evaluation set is empty")
    tp = fp = fn = 0
    for features, label in data:
        predicted = predict_fit(model, features)["label"]
        if predicted == 1 and label == 1:
            tp += 1
        elif predicted == 1 and label == 0:
            fp += 1
        elif predicted == 0 and label == 1:
            fn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}


def feature_importances(model: RandomForestModel) -> np.ndarray:
    """Mean decrease in Gini impurity per feature, normalized to sum to 1.

    A forest that never split (degenerate data) has no impurity decrease
    anywhere; importances fall back to uniform so the sum-to-1 contract holds.
    """
    totals = np.zeros(N_FEATURES)
    for tree in model.trees:
        n_root = tree.counts.sum()
        stack = [tree]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                continue
            n = node.counts.sum()
            n_left = node.left.counts.sum()
            n_right = node.right.counts.sum()
            decrease = _gini(node.counts) - (
                n_left * _gini(node.left.counts) + n_right * _gini(node.right.counts)
            ) / n
            totals[node.feature] += (n / n_root) * decrease
            stack.append(node.left)
            stack.append(node.right)
    totals /= len(model.trees)
    if totals.sum() == 0.0:
        return np.full(N_FEATURES, 1.0 / N_FEATURES)
    return totals / totals.sum()
