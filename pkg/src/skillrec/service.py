"""HTTP service exposing the learner loop over a JSON file store.

Endpoints (JSON over HTTP/1.1; errors as {"code": ..., "message": ...}):

    GET  /skills
    GET  /users/{id}
    POST /users                      {occupation, location, education}
    POST /users/{id}/skills          {skill, level}
    GET  /users/{id}/recommendation?skill=S
    POST /users/{id}/ratings         {video_id, stars}
    POST /users/{id}/skips           {video_id}

Mutations are serialized per user and persisted with atomic renames, so a
failed request never leaves a partially updated profile behind.
"""

from __future__ import annotations

import logging
import threading
import uuid
from contextlib import contextmanager

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import learner_state
from .catalog import LEVEL_NAMES, LEVELS, SkillGroup, VideoRecord, build_feature_vector_x, fit_features
from .fit_model import RandomForestModel, predict_fit
from .learner_state import LearnerProfile
from .recommender import NoCandidates
from .skill_mining import SkillRecord
from .store import Store, skill_to_dict

log = logging.getLogger(__name__)

NEUTRAL_FIT_PROBABILITY = 0.5


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class RecommendationEngine:
    """Immutable read side: skills, videos, and each video's ranking vector."""

    def __init__(
        self,
        skills: list[SkillRecord],
        videos: list[VideoRecord],
        groups: dict[str, SkillGroup],
        fit: RandomForestModel | None = None,
    ):
        self.skills = skills
        self.skills_by_name = {s.name: s for s in skills}
        self.videos_by_id = {v.id: v for v in videos}
        self.groups = groups
        if fit is None and videos:
            log.warning("no fit model in store; using neutral fit probability %.1f",
                        NEUTRAL_FIT_PROBABILITY)
        self.x_by_video: dict[str, np.ndarray] = {}
        self._candidates: dict[tuple[str, int], list[tuple[str, np.ndarray]]] = {}
        for video in videos:
            group = groups[video.target_skill]
            if fit is not None:
                fit_probability = predict_fit(fit, fit_features(video, group))["probability"]
            else:
                fit_probability = NEUTRAL_FIT_PROBABILITY
            x = build_feature_vector_x(video, group, fit_probability)
            self.x_by_video[video.id] = x
            self._candidates.setdefault((video.target_skill, video.level), []).append((video.id, x))
        for pool in self._candidates.values():
            pool.sort(key=lambda item: item[0])

    def candidates_for(self, skill: str, level: int) -> list[tuple[str, np.ndarray]]:
        return self._candidates.get((skill, level), [])


class UserRegistry:
    """Per-user mutual exclusion over the store's profile files."""

    def __init__(self, store: Store):
        self.store = store
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, user_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(user_id, threading.Lock())

    @contextmanager
    def locked(self, user_id: str):
        with self._lock_for(user_id):
            profile = self.store.load_user(user_id)
            if profile is None:
                raise ApiError(404, "unknown_user", f"no user with id {user_id!r}")
            yield profile

    def all_profiles(self) -> list[LearnerProfile]:
        return [p for uid in self.store.user_ids() if (p := self.store.load_user(uid))]

    def create(self, occupation: str, location: str, education: str) -> LearnerProfile:
        peers = [(p.context, p.p) for p in self.all_profiles()]
        profile = learner_state.create_profile(
            user_id=uuid.uuid4().hex,
            occupation=occupation,
            location=location,
            education=education,
            peers=peers,
        )
        self.store.save_user(profile)
        return profile


class CreateUserBody(BaseModel):
    occupation: str
    location: str
    education: str


class AddSkillBody(BaseModel):
    skill: str
    level: str = "beginner"


class RatingBody(BaseModel):
    video_id: str
    stars: int


class SkipBody(BaseModel):
    video_id: str


def _target_state(skill: str, target: learner_state.SkillTarget) -> dict:
    return {"skill": skill, "level": LEVEL_NAMES[target.level], "mastered": target.mastered}


def _profile_view(profile: LearnerProfile) -> dict:
    return {
        "user_id": profile.user_id,
        "occupation": profile.occupation,
        "location": profile.location,
        "education": profile.education,
        "p": profile.p.tolist(),
        "targets": {
            skill: {"level": LEVEL_NAMES[t.level], "mastered": t.mastered}
            for skill, t in sorted(profile.targets.items())
        },
        "rated_video_ids": sorted(profile.rated_video_ids()),
        "skipped": sorted(profile.skipped),
        "active": {skill: a.video_id for skill, a in sorted(profile.active.items())},
    }


def create_app(store_dir: str) -> FastAPI:
    store = Store(store_dir)
    store.initialize()
    skills = store.load_skills()
    videos, groups = store.load_catalog(skills)
    store.verify_integrity(skills, videos)
    engine = RecommendationEngine(skills, videos, groups, store.load_fit_model())
    registry = UserRegistry(store)

    app = FastAPI(title="skillrec", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(_: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"code": "bad_request", "message": str(exc)})

    @app.get("/skills")
    def list_skills():
        return [skill_to_dict(s) for s in engine.skills]

    @app.post("/users")
    def create_user(body: CreateUserBody):
        profile = registry.create(body.occupation, body.location, body.education)
        return {"user_id": profile.user_id, "p": profile.p.tolist()}

    @app.get("/users/{user_id}")
    def get_user(user_id: str):
        with registry.locked(user_id) as profile:
            return _profile_view(profile)

    @app.post("/users/{user_id}/skills")
    def add_skill(user_id: str, body: AddSkillBody):
        level_name = body.level.strip().lower()
        if level_name not in LEVELS:
            raise ApiError(400, "bad_request", f"level must be one of {sorted(LEVELS)}")
        if body.skill not in engine.skills_by_name:
            raise ApiError(404, "unknown_skill", f"no skill named {body.skill!r}")
        with registry.locked(user_id) as profile:
            try:
                target = learner_state.add_target(profile, body.skill, LEVELS[level_name])
            except learner_state.DuplicateTarget as exc:
                raise ApiError(409, "duplicate_target", str(exc)) from exc
            registry.store.save_user(profile)
            return _target_state(body.skill, target)

    @app.get("/users/{user_id}/recommendation")
    def get_recommendation(user_id: str, skill: str):
        with registry.locked(user_id) as profile:
            try:
                video_id, x, score = learner_state.next_recommendation(
                    profile, skill, engine.candidates_for
                )
            except learner_state.UnknownTarget as exc:
                raise ApiError(404, "unknown_target", str(exc)) from exc
            except learner_state.SkillMastered as exc:
                raise ApiError(409, "skill_mastered", str(exc)) from exc
            except NoCandidates as exc:
                raise ApiError(410, "no_candidates", str(exc)) from exc
            registry.store.save_user(profile)
            video = engine.videos_by_id[video_id]
            return {
                "video_id": video_id,
                "title": video.title,
                "url": video.url,
                "x": np.asarray(x).tolist(),
                "score": score,
            }

    @app.post("/users/{user_id}/ratings")
    def rate(user_id: str, body: RatingBody):
        with registry.locked(user_id) as profile:
            try:
                target = learner_state.record_rating(profile, body.video_id, body.stars)
            except learner_state.RatingOutOfRange as exc:
                raise ApiError(422, "rating_out_of_range", str(exc)) from exc
            except learner_state.UnknownVideo as exc:
                raise ApiError(404, "unknown_video", str(exc)) from exc
            registry.store.save_user(profile)
            return {
                "level": LEVEL_NAMES[target.level],
                "mastered": target.mastered,
                "p": profile.p.tolist(),
            }

    @app.post("/users/{user_id}/skips", status_code=204)
    def skip(user_id: str, body: SkipBody):
        with registry.locked(user_id) as profile:
            try:
                learner_state.skip_recommendation(profile, body.video_id)
            except learner_state.UnknownVideo as exc:
                raise ApiError(404, "unknown_video", str(exc)) from exc
            registry.store.save_user(profile)
        return Response(status_code=204)

    return app
