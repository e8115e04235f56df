"""Single-directory JSON persistence for the service.

Layout under the store root:

    skills.json          list of skill records
    catalog.jsonl        one video record per line
    users/<id>.json      learner profiles
    models/              sentence classifier / fit model dumps

All writes go through write-to-temp-then-rename, so a crash never leaves a
half-written file behind.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import (
    LEVEL_NAMES,
    LEVELS,
    SkillGroup,
    VideoRecord,
    build_groups,
    record_from_dict,
)
from .fit_model import RandomForestModel
from .learner_state import ActiveRecommendation, LearnerProfile, SkillTarget
from .recommender import RatingEvent
from .skill_mining import SkillRecord

FIT_MODEL_FILE = "fit_model.json"
SENTENCE_MODEL_FILE = "sentence_classifier.json"


class IntegrityError(ValueError):
    pass


@dataclass
class StoreSnapshot:
    """What a store directory contains: data file paths plus model versions."""

    skills_path: str
    catalog_path: str
    users_dir: str
    models: dict[str, int] = field(default_factory=dict)
    user_count: int = 0


def atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def skill_to_dict(skill: SkillRecord) -> dict:
    return {
        "name": skill.name,
        "keywords": skill.keywords,
        "description": skill.description,
        "score": skill.score,
    }


def skill_from_dict(raw: dict) -> SkillRecord:
    return SkillRecord(
        name=raw["name"],
        keywords=list(raw.get("keywords", [])),
        description=raw.get("description", ""),
        score=float(raw.get("score", 0.0)),
    )


def profile_to_dict(profile: LearnerProfile) -> dict:
    return {
        "user_id": profile.user_id,
        "occupation": profile.occupation,
        "location": profile.location,
        "education": profile.education,
        "p_init": profile.p_init.tolist(),
        "p": profile.p.tolist(),
        "targets": {
            skill: {"level": LEVEL_NAMES[t.level], "mastered": t.mastered}
            for skill, t in profile.targets.items()
        },
        "history": [
            {
                "user_id": e.user_id,
                "video_id": e.video_id,
                "skill": e.skill,
                "x": np.asarray(e.x).tolist(),
                "y": e.y,
                "timestamp": e.timestamp,
            }
            for e in profile.history
        ],
        "skipped": sorted(profile.skipped),
        "active": {
            skill: {"video_id": a.video_id, "x": a.x.tolist()}
            for skill, a in profile.active.items()
        },
    }


def profile_from_dict(raw: dict) -> LearnerProfile:
    return LearnerProfile(
        user_id=raw["user_id"],
        occupation=raw.get("occupation", ""),
        location=raw.get("location", ""),
        education=raw.get("education", ""),
        targets={
            skill: SkillTarget(level=LEVELS[t["level"]], mastered=t["mastered"])
            for skill, t in raw.get("targets", {}).items()
        },
        p_init=np.asarray(raw["p_init"], dtype=np.float64),
        p=np.asarray(raw["p"], dtype=np.float64),
        history=[
            RatingEvent(
                user_id=e["user_id"],
                video_id=e["video_id"],
                skill=e["skill"],
                x=np.asarray(e["x"], dtype=np.float64),
                y=e["y"],
                timestamp=e.get("timestamp", ""),
            )
            for e in raw.get("history", [])
        ],
        skipped=set(raw.get("skipped", [])),
        active={
            skill: ActiveRecommendation(video_id=a["video_id"], x=np.asarray(a["x"], dtype=np.float64))
            for skill, a in raw.get("active", {}).items()
        },
    )


class Store:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.users_dir = self.root / "users"
        self.models_dir = self.root / "models"

    def initialize(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        self.users_dir.mkdir(exist_ok=True)
        self.models_dir.mkdir(exist_ok=True)

    # --- skills ---

    @property
    def skills_path(self) -> Path:
        return self.root / "skills.json"

    def load_skills(self) -> list[SkillRecord]:
        if not self.skills_path.exists():
            return []
        with open(self.skills_path, encoding="utf-8") as fh:
            return [skill_from_dict(raw) for raw in json.load(fh)]

    def save_skills(self, skills: list[SkillRecord]) -> None:
        self.initialize()
        atomic_write_text(
            self.skills_path, json.dumps([skill_to_dict(s) for s in skills], indent=2) + "\n"
        )

    # --- catalog ---

    @property
    def catalog_path(self) -> Path:
        return self.root / "catalog.jsonl"

    def load_catalog(
        self, skills: list[SkillRecord]
    ) -> tuple[list[VideoRecord], dict[str, SkillGroup]]:
        """Read the persisted catalog; text similarity comes from the file."""
        videos: list[VideoRecord] = []
        if self.catalog_path.exists():
            known = {s.name for s in skills}
            with open(self.catalog_path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    video = record_from_dict(
                        json.loads(line), path=str(self.catalog_path), lineno=lineno
                    )
                    if video.target_skill not in known:
                        raise ValueError(
                            f"{self.catalog_path}:{lineno}: unknown skill {video.target_skill!r}"
                        )
                    videos.append(video)
        return videos, (build_groups(videos) if videos else {})

    # --- models ---

    @property
    def fit_model_path(self) -> Path:
        return self.models_dir / FIT_MODEL_FILE

    def load_fit_model(self) -> RandomForestModel | None:
        if not self.fit_model_path.exists():
            return None
        return RandomForestModel.load(str(self.fit_model_path))

    # --- users ---

    def user_path(self, user_id: str) -> Path:
        return self.users_dir / f"{user_id}.json"

    def user_ids(self) -> list[str]:
        if not self.users_dir.exists():
            return []
        return sorted(p.stem for p in self.users_dir.glob("*.json"))

    def load_user(self, user_id: str) -> LearnerProfile | None:
        path = self.user_path(user_id)
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as fh:
            return profile_from_dict(json.load(fh))

    def save_user(self, profile: LearnerProfile) -> None:
        self.users_dir.mkdir(parents=True, exist_ok=True)
        atomic_write_text(
            self.user_path(profile.user_id),
            json.dumps(profile_to_dict(profile), indent=2, sort_keys=True) + "\n",
        )

    # --- whole-store views ---

    def snapshot(self) -> StoreSnapshot:
        models = {}
        for path in sorted(self.models_dir.glob("*.json")) if self.models_dir.exists() else []:
            try:
                with open(path, encoding="utf-8") as fh:
                    models[path.name] = int(json.load(fh).get("version", 0))
            except (json.JSONDecodeError, ValueError):
                models[path.name] = -1
        return StoreSnapshot(
            skills_path=str(self.skills_path),
            catalog_path=str(self.catalog_path),
            users_dir=str(self.users_dir),
            models=models,
            user_count=len(self.user_ids()),
        )

    def verify_integrity(self, skills, videos) -> None:
        """Check referential integrity across the whole store.

        Every video must name a loaded skill, and every user's targets,
        ratings, skips, and active recommendations must reference loaded
        skills and videos.
        """
        skill_names = {s.name for s in skills}
        video_ids = {v.id for v in videos}
        for video in videos:
            if video.target_skill not in skill_names:
                raise IntegrityError(
                    f"video {video.id!r} references unknown skill {video.target_skill!r}"
                )
        for user_id in self.user_ids():
            profile = self.load_user(user_id)
            for skill in profile.targets:
                if skill not in skill_names:
                    raise IntegrityError(f"user {user_id!r} targets unknown skill {skill!r}")
            referenced = (
                {e.video_id for e in profile.history}
                | profile.skipped
                | {a.video_id for a in profile.active.values()}
            )
            missing = referenced - video_ids
            if missing:
                raise IntegrityError(
                    f"user {user_id!r} references unknown video(s): {', '.join(sorted(missing))}"
                )
