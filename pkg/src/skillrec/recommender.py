"""Per-user preference learning and candidate ranking.

Each video carries a 4-dimensional feature vector X (popularity, fit
probability, normalized length, text similarity) and each user a weight
vector P over the same dimensions. P is fit to the user's satisfaction
ratings by minimizing the absolute-error objective

    sum_i |P . X_i - Y_i|

with full-batch subgradient descent. Candidates are ranked by the cosine
similarity between their X and the user's P; the top video is the
recommendation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import cosine

N_DIMENSIONS = 4

# uniform cold-start weights when no similar user exists
DEFAULT_PREFERENCES = (0.25, 0.25, 0.25, 0.25)

DEFAULT_LEARNING_RATE = 0.05
DEFAULT_EPOCHS = 200
LOSS_TOLERANCE = 1e-8
_MAX_HALVINGS = 60


class NonFiniteLoss(ValueError):
    pass


class NoCandidates(LookupError):
    pass


@dataclass
class UserContext:
    """The attributes used to find similar users for cold start."""

    occupation: str = ""
    location: str = ""
    education: str = ""

    def shares_attribute(self, other: "UserContext") -> bool:
        """True when any non-empty attribute matches, case-insensitively."""
        for mine, theirs in (
            (self.occupation, other.occupation),
            (self.location, other.location),
            (self.education, other.education),
        ):
            a, b = mine.strip().lower(), theirs.strip().lower()
            if a and a == b:
                return True
        return False


@dataclass
class RatingEvent:
    """One satisfaction rating, with the feature vector frozen at
    recommendation time."""

    user_id: str
    video_id: str
    skill: str
    x: np.ndarray
    y: float
    timestamp: str = ""


def _as_preferences(p) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != (N_DIMENSIONS,):
        raise ValueError(f"preference vector must have {N_DIMENSIONS} entries, got {arr.shape}")
    return arr


def loss(p, events: list[RatingEvent]) -> float:
    """Total absolute error of predicted vs observed satisfaction."""
    p = _as_preferences(p)
    return float(sum(abs(float(np.dot(p, e.x)) - e.y) for e in events))


def loss_gradient(p, events: list[RatingEvent]) -> np.ndarray:
    """Subgradient of the absolute-error objective, with sign(0) = 0."""
    p = _as_preferences(p)
    g = np.zeros(N_DIMENSIONS)
    for e in events:
        g += np.sign(float(np.dot(p, e.x)) - e.y) * np.asarray(e.x, dtype=np.float64)
    return g


def fit_preferences(
    p0,
    events: list[RatingEvent],
    lr: float = DEFAULT_LEARNING_RATE,
    epochs: int = DEFAULT_EPOCHS,
    tolerance: float = LOSS_TOLERANCE,
) -> np.ndarray:
    """Minimize the rating loss by full-batch subgradient descent.

    Each epoch takes one step along the negative subgradient, halving the
    step size until the loss actually decreases (plain constant steps can
    overshoot the kinks of the piecewise-linear objective and raise the
    loss). Stops early once no step improves, the subgradient vanishes, or
    the improvement falls below the tolerance. The loss is therefore
    non-increasing from epoch to epoch by construction.
    """
    if lr <= 0:
        raise ValueError(f"lr must be > 0, got {lr}")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    p = _as_preferences(p0).copy()
    if not events:
        return p
    for e in events:
        if not (np.all(np.isfinite(e.x)) and np.isfinite(e.y)):
            raise NonFiniteLoss(f"non-finite feature or rating in event for video {e.video_id!r}")

    current = loss(p, events)
    for _ in range(epochs):
        g = loss_gradient(p, events)
        if not g.any():
            break
        step = lr
        candidate = None
        for _ in range(_MAX_HALVINGS):
            trial = p - step * g
            trial_loss = loss(trial, events)
            if trial_loss < current:
                candidate = (trial, trial_loss)
                break
            step /= 2.0
        if candidate is None:
            break
        p, new_loss = candidate
        improvement = current - new_loss
        current = new_loss
        if improvement < tolerance:
            break
    return p


def init_preferences(
    context: UserContext, peers: list[tuple[UserContext, np.ndarray]]
) -> np.ndarray:
    """Cold-start weights: mean P of users sharing a context attribute,
    falling back to uniform weights when nobody matches."""
    matching = [
        _as_preferences(p) for peer_context, p in peers if context.shares_attribute(peer_context)
    ]
    if not matching:
        return np.array(DEFAULT_PREFERENCES)
    return np.mean(matching, axis=0)


def rank_candidates(
    p,
    candidates: list[tuple[str, np.ndarray]],
    exclude: set[str] | None = None,
) -> list[tuple[str, np.ndarray, float]]:
    """Candidates sorted by cosine(X, P) descending, ties by ascending id.

    Returns (video_id, x, score) triples; the head of the list is the
    recommendation.
    """
    p = _as_preferences(p)
    exclude = exclude or set()
    pool = [(vid, x) for vid, x in candidates if vid not in exclude]
    if not pool:
        raise NoCandidates("no candidates remain after exclusions")
    scored = [(vid, x, cosine(np.asarray(x, dtype=np.float64), p)) for vid, x in pool]
    scored.sort(key=lambda item: (-item[2], item[0]))
    return scored
