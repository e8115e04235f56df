"""Learner profiles and the recommend -> watch -> rate -> update loop.

A learner targets skills at an expertise level (beginner, intermediate,
advanced). Ratings of at least 4 stars advance the level by one; a 4+ star
rating at the advanced level masters the skill, which ends recommendations
for it. After every rating the preference vector is refit from the
learner's initial weights over the full rating history, so replaying a
history reproduces P exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

import numpy as np

from .recommender import (
    DEFAULT_PREFERENCES,
    RatingEvent,
    UserContext,
    fit_preferences,
    init_preferences,
    rank_candidates,
)

MAX_LEVEL = 2  # advanced

ADVANCE_STARS = 4
# (stars - 1) / 4 satisfaction equivalent of the 4-star threshold
ADVANCE_SATISFACTION = 0.75

# (skill, level) -> [(video_id, x), ...]
CandidateProvider = Callable[[str, int], list[tuple[str, np.ndarray]]]


class UnknownTarget(LookupError):
    pass


class DuplicateTarget(ValueError):
    pass


class SkillMastered(ValueError):
    pass


class UnknownVideo(LookupError):
    pass


class RatingOutOfRange(ValueError):
    pass


@dataclass
class SkillTarget:
    level: int
    mastered: bool = False


@dataclass
class ActiveRecommendation:
    video_id: str
    x: np.ndarray


@dataclass
class LearnerProfile:
    user_id: str
    occupation: str = ""
    location: str = ""
    education: str = ""
    targets: dict[str, SkillTarget] = field(default_factory=dict)
    p_init: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_PREFERENCES))
    p: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_PREFERENCES))
    history: list[RatingEvent] = field(default_factory=list)
    skipped: set[str] = field(default_factory=set)
    active: dict[str, ActiveRecommendation] = field(default_factory=dict)

    @property
    def context(self) -> UserContext:
        return UserContext(self.occupation, self.location, self.education)

    def rated_video_ids(self) -> set[str]:
        return {event.video_id for event in self.history}


def create_profile(
    user_id: str,
    occupation: str,
    location: str,
    education: str,
    peers: list[tuple[UserContext, np.ndarray]] | None = None,
) -> LearnerProfile:
    """New profile with cold-start preferences taken from similar users."""
    context = UserContext(occupation, location, education)
    p = init_preferences(context, peers or [])
    return LearnerProfile(
        user_id=user_id,
        occupation=occupation,
        location=location,
        education=education,
        p_init=p.copy(),
        p=p.copy(),
    )


def add_target(profile: LearnerProfile, skill: str, level: int) -> SkillTarget:
    if skill in profile.targets:
        raise DuplicateTarget(f"skill {skill!r} is already a target")
    if level not in (0, 1, 2):
        raise ValueError(f"level must be 0, 1 or 2, got {level}")
    target = SkillTarget(level=level)
    profile.targets[skill] = target
    return target


def next_recommendation(
    profile: LearnerProfile, skill: str, candidates_for: CandidateProvider
) -> tuple[str, np.ndarray, float]:
    """Top-ranked unseen video for the skill at the learner's current level.

    Videos the learner already rated or skipped are excluded, so no video is
    recommended twice. The result becomes the active recommendation for the
    skill, the one a rating or skip must reference.
    """
    target = profile.targets.get(skill)
    if target is None:
        raise UnknownTarget(f"skill {skill!r} is not a target of user {profile.user_id!r}")
    if target.mastered:
        raise SkillMastered(f"skill {skill!r} is already mastered")
    exclude = profile.rated_video_ids() | profile.skipped
    video_id, x, score = rank_candidates(profile.p, candidates_for(skill, target.level), exclude)[0]
    profile.active[skill] = ActiveRecommendation(video_id=video_id, x=np.asarray(x, dtype=np.float64))
    return video_id, x, score


def _find_active_skill(profile: LearnerProfile, video_id: str) -> str:
    for skill, active in profile.active.items():
        if active.video_id == video_id:
            return skill
    raise UnknownVideo(f"video {video_id!r} is not an active recommendation")


def record_feedback(
    profile: LearnerProfile,
    video_id: str,
    satisfaction: float,
    timestamp: str | None = None,
) -> SkillTarget:
    """Apply a satisfaction value in [0,1] for the active recommendation.

    Appends the rating event, refits P from the initial weights over the
    full history, and advances the expertise level when the satisfaction
    reaches the 4-star threshold (mastering the skill at advanced level).
    """
    if not 0.0 <= satisfaction <= 1.0:
        raise RatingOutOfRange(f"satisfaction must be in [0,1], got {satisfaction}")
    skill = _find_active_skill(profile, video_id)
    target = profile.targets[skill]
    profile.history.append(
        RatingEvent(
            user_id=profile.user_id,
            video_id=video_id,
            skill=skill,
            x=profile.active[skill].x.copy(),
            y=satisfaction,
            timestamp=timestamp or datetime.now(timezone.utc).isoformat(),
        )
    )
    profile.p = fit_preferences(profile.p_init, profile.history)
    del profile.active[skill]
    if satisfaction >= ADVANCE_SATISFACTION:
        if target.level < MAX_LEVEL:
            target.level += 1
        else:
            target.mastered = True
    return target


def record_rating(
    profile: LearnerProfile, video_id: str, stars: int, timestamp: str | None = None
) -> SkillTarget:
    """Apply a 1..5 star rating, mapped linearly onto satisfaction [0,1]."""
    if not isinstance(stars, int) or isinstance(stars, bool) or not 1 <= stars <= 5:
        raise RatingOutOfRange(f"stars must be an integer in 1..5, got {stars!r}")
    return record_feedback(profile, video_id, (stars - 1) / 4, timestamp=timestamp)


def skip_recommendation(profile: LearnerProfile, video_id: str) -> None:
    """Reject the active recommendation; the video is never shown again.

    Skipping does not touch P or the expertise level. Re-skipping an
    already-skipped video is a no-op.
    """
    if video_id in profile.skipped:
        return
    skill = _find_active_skill(profile, video_id)
    profile.skipped.add(video_id)
    del profile.active[skill]
