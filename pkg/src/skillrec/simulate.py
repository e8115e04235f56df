"""Simulated-learner harness for end-to-end evaluation.

Synthetic learners hold a hidden ground-truth preference vector P*. Each
round a learner asks for a recommendation through the real learner loop and
replies with satisfaction Y = clamp(P* . X + gaussian noise). The harness
reports how closely each learned P approaches P* (cosine) and whether the
true utility P* . X of served recommendations improves from the first half
of the rounds to the second, i.e. whether preference learning actually
steers the recommendations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import learner_state
from .catalog import LEVEL_NAMES, VideoRecord, build_groups, fit_features
from .embeddings import cosine
from .fit_model import ForestConfig, train_fit_model
from .learner_state import LearnerProfile
from .recommender import NoCandidates
from .service import RecommendationEngine
from .skill_mining import SkillRecord


@dataclass
class SimulationConfig:
    users: int = 20
    rounds: int = 10
    seed: int = 0
    n_skills: int = 5
    videos_per_level: int = 25
    noise_sigma: float = 0.05


@dataclass
class SimulationReport:
    config: SimulationConfig
    mean_preference_cosine: float
    utility_first_half: float
    utility_second_half: float
    per_round_utility: list[float]
    ratings_per_user: list[int]

    def to_dict(self) -> dict:
        return {
            "users": self.config.users,
            "rounds": self.config.rounds,
            "seed": self.config.seed,
            "mean_preference_cosine": self.mean_preference_cosine,
            "utility_first_half": self.utility_first_half,
            "utility_second_half": self.utility_second_half,
            "per_round_utility": self.per_round_utility,
            "ratings_per_user": self.ratings_per_user,
        }


# Each synthetic video is strong on one or two ranking dimensions and weak
# on the rest. Real catalogs trade off the same way (a popular video is not
# necessarily on-topic), and without such trade-offs every positive
# preference vector would rank the same "good at everything" videos first,
# leaving nothing for preference learning to improve.
_TRADEOFF_PAIRS = tuple(combinations(range(4), 2))
_SINGLE_STRENGTH_SHARE = 0.3


def build_synthetic_catalog(
    rng: np.random.Generator, n_skills: int, videos_per_level: int
) -> tuple[list[SkillRecord], list[VideoRecord]]:
    """A catalog of trade-off videos spanning all four ranking dimensions.

    The fit labels are keyed to the platform rating, which is not part of
    the ranking vector X, so the learned fit probability varies freely of
    popularity, length, and text similarity.
    """
    skills = [
        SkillRecord(name=f"skill-{i:02d}", keywords=[f"skill-{i:02d}"], score=1.0)
        for i in range(1, n_skills + 1)
    ]
    videos = []
    for skill in skills:
        for level in range(3):
            for i in range(videos_per_level):
                if rng.uniform() < _SINGLE_STRENGTH_SHARE:
                    strong = (int(rng.integers(0, 4)),)
                else:
                    strong = _TRADEOFF_PAIRS[rng.integers(0, len(_TRADEOFF_PAIRS))]
                likes = int(rng.integers(300, 500)) if 0 in strong else int(rng.integers(0, 100))
                dislikes = int(rng.integers(0, 50)) if 0 in strong else int(rng.integers(50, 150))
                rating = float(rng.uniform(3.8, 5.0)) if 1 in strong else float(rng.uniform(1.0, 2.8))
                length = float(rng.uniform(2400, 3600)) if 2 in strong else float(rng.uniform(120, 1200))
                text_similarity = (
                    float(rng.uniform(0.7, 0.95)) if 3 in strong else float(rng.uniform(0.05, 0.3))
                )
                videos.append(
                    VideoRecord(
                        id=f"{skill.name}-l{level}-v{i:02d}",
                        source="youtube-like",
                        title=f"{skill.name} {LEVEL_NAMES[level]} tutorial {i}",
                        target_skill=skill.name,
                        url=f"https://videos.example/{skill.name}/{level}/{i}",
                        length_s=length,
                        view_count=int(rng.integers(50, 100_000)),
                        rating=rating,
                        likes=likes,
                        dislikes=dislikes,
                        relevancy_score=1.0 / int(rng.integers(1, 11)),
                        level=level,
                        text_similarity=text_similarity,
                        fit_label=int(rating > 3.3) if rng.uniform() > 0.08 else int(rating <= 3.3),
                    )
                )
    return skills, videos


@dataclass
class _SimulatedUser:
    profile: LearnerProfile
    p_star: np.ndarray
    true_utilities: list[float] = field(default_factory=list)
    next_skill: int = 0


def run_simulation(config: SimulationConfig) -> SimulationReport:
    rng = np.random.default_rng(config.seed)
    skills, videos = build_synthetic_catalog(rng, config.n_skills, config.videos_per_level)
    groups = build_groups(videos)
    fit = train_fit_model(
        [(fit_features(v, groups[v.target_skill]), v.fit_label) for v in videos],
        ForestConfig(seed=config.seed),
    )
    engine = RecommendationEngine(skills, videos, groups, fit)

    users = []
    for k in range(config.users):
        # concentrated weights: most learners care strongly about one or two
        # dimensions, which is also what makes their preferences learnable
        p_star = rng.dirichlet([0.7, 0.7, 0.7, 0.7])
        profile = learner_state.create_profile(
            user_id=f"sim-{k:03d}",
            occupation=f"occupation-{k}",
            location=f"location-{k}",
            education=f"education-{k}",
        )
        for skill in skills:
            learner_state.add_target(profile, skill.name, level=0)
        users.append(_SimulatedUser(profile=profile, p_star=p_star))

    per_round_utility = []
    for _ in range(config.rounds):
        round_utilities = []
        for user in users:
            served = _serve_one(user, skills, engine)
            if served is None:
                continue
            video_id, x = served
            true_utility = float(np.dot(user.p_star, x))
            y = float(np.clip(true_utility + rng.normal(0.0, config.noise_sigma), 0.0, 1.0))
            learner_state.record_feedback(user.profile, video_id, y, timestamp="simulated")
            user.true_utilities.append(true_utility)
            round_utilities.append(true_utility)
        per_round_utility.append(float(np.mean(round_utilities)) if round_utilities else float("nan"))

    cosines = [cosine(u.profile.p, u.p_star) for u in users]
    half = config.rounds // 2
    return SimulationReport(
        config=config,
        mean_preference_cosine=float(np.mean(cosines)),
        utility_first_half=float(np.mean(per_round_utility[:half])),
        utility_second_half=float(np.mean(per_round_utility[half:])),
        per_round_utility=per_round_utility,
        ratings_per_user=[len(u.true_utilities) for u in users],
    )


def _serve_one(
    user: _SimulatedUser, skills: list[SkillRecord], engine: RecommendationEngine
) -> tuple[str, np.ndarray] | None:
    """Recommendation for the user's next target skill, round-robin.

    Rotating over target skills keeps any single candidate pool from being
    drained by the no-repeat rule, so later rounds measure preference
    learning rather than pool exhaustion.
    """
    for attempt in range(len(skills)):
        skill = skills[(user.next_skill + attempt) % len(skills)]
        target = user.profile.targets[skill.name]
        if target.mastered:
            continue
        try:
            video_id, x, _ = learner_state.next_recommendation(
                user.profile, skill.name, engine.candidates_for
            )
            user.next_skill = (user.next_skill + attempt + 1) % len(skills)
            return video_id, x
        except NoCandidates:
            continue
    return None
