"""Video catalog: JSONL ingestion, per-skill grouping, and the normalized
features consumed by both the fit model and the recommender.

Videos are grouped by target skill. Popularity (likes minus dislikes) and
length are min-max normalized within the group; a single-video group gets
the neutral midpoint 0.5. Engagement fields missing from sources that do
not report them default to 0, and a missing platform rating is imputed as
the group median.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import text_core
from .embeddings import WordVectorStore, cosine, embed_text
from .fit_model import FitFeatures
from .providers import TranscriptProvider
from .skill_mining import SkillRecord

LEVELS = {"beginner": 0, "intermediate": 1, "advanced": 2}
LEVEL_NAMES = {value: name for name, value in LEVELS.items()}

SOURCES = ("youtube-like", "av-portal-like")


class InvalidRank(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, path: str, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class UnknownSkill(ValueError):
    def __init__(self, names: list[str]):
        super().__init__(f"catalog references unknown skill(s): {', '.join(sorted(set(names)))}")
        self.names = names


@dataclass
class VideoRecord:
    id: str
    source: str
    title: str
    target_skill: str
    url: str
    length_s: float
    description: str = ""
    transcript: str = ""
    view_count: Optional[int] = None
    rating: Optional[float] = None
    likes: Optional[int] = None
    dislikes: Optional[int] = None
    relevancy_score: float = 1.0
    level: int = 0
    text_similarity: float = 0.0
    fit_label: Optional[int] = None


@dataclass
class SkillGroup:
    """Per-skill membership and the min-max stats used for normalization."""

    skill: str
    video_ids: list[str] = field(default_factory=list)
    pop_min: float = 0.0
    pop_max: float = 0.0
    length_min: float = 0.0
    length_max: float = 0.0
    rating_median: float = 0.0


def relevancy_from_rank(position: int) -> float:
    """Search-result relevancy: the reciprocal of the 1-based rank."""
    if position < 1:
        raise InvalidRank(f"ranking position must be >= 1, got {position}")
    return 1.0 / position


def minmax_normalize(values: list[float]) -> list[float]:
    """Scale to [0,1]; a constant list maps to the neutral midpoint 0.5."""
    if not values:
        raise EmptyInput("cannot normalize an empty list")
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0.5] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def engagement_diff(video: VideoRecord) -> float:
    """Likes minus dislikes; absent counts contribute 0."""
    return float((video.likes or 0) - (video.dislikes or 0))


def _minmax_scalar(value: float, lo: float, hi: float) -> float:
    if hi == lo:
        return 0.5
    return (value - lo) / (hi - lo)


def popularity(video: VideoRecord, group: SkillGroup) -> float:
    """Group-normalized engagement difference in [0,1]."""
    return _minmax_scalar(engagement_diff(video), group.pop_min, group.pop_max)


def normalized_length(video: VideoRecord, group: SkillGroup) -> float:
    return _minmax_scalar(video.length_s, group.length_min, group.length_max)


def build_feature_vector_x(
    video: VideoRecord, group: SkillGroup, fit_probability: float
) -> np.ndarray:
    """The 4-dimensional ranking vector: popularity, fit probability,
    normalized length, text similarity, in this fixed order."""
    return np.array(
        [
            popularity(video, group),
            fit_probability,
            normalized_length(video, group),
            video.text_similarity,
        ]
    )


def fit_features(video: VideoRecord, group: SkillGroup) -> FitFeatures:
    """The 6 fit-model features, with declared imputations for absent fields."""
    return FitFeatures(
        length_s=video.length_s,
        rating=video.rating if video.rating is not None else group.rating_median,
        view_count=float(video.view_count or 0),
        relevancy_score=video.relevancy_score,
        level=video.level,
        text_similarity=video.text_similarity,
    )


def build_groups(videos: list[VideoRecord]) -> dict[str, SkillGroup]:
    """Group videos by target skill and compute normalization stats."""
    groups: dict[str, SkillGroup] = {}
    for video in videos:
        groups.setdefault(video.target_skill, SkillGroup(skill=video.target_skill)).video_ids.append(
            video.id
        )
    by_id = {video.id: video for video in videos}
    for group in groups.values():
        members = [by_id[vid] for vid in group.video_ids]
        diffs = [engagement_diff(v) for v in members]
        lengths = [v.length_s for v in members]
        group.pop_min, group.pop_max = min(diffs), max(diffs)
        group.length_min, group.length_max = min(lengths), max(lengths)
        ratings = [v.rating for v in members if v.rating is not None]
        group.rating_median = statistics.median(ratings) if ratings else 0.0
    return groups


def compute_text_similarity(
    video: VideoRecord,
    skill: SkillRecord,
    store: WordVectorStore,
    stopwords: set[str] | None = None,
) -> float:
    """Cosine between the averaged transcript and skill-description vectors.

    Tokens are lowercased and, when a stop-word set is given, filtered, but
    not stemmed: the vector store holds vectors for surface words.
    """

    def tokens(text: str) -> list[str]:
        toks = text_core.tokenize(text)
        if stopwords:
            toks = [t for t in toks if t not in stopwords]
        return toks

    return cosine(
        embed_text(store, tokens(video.transcript)),
        embed_text(store, tokens(skill.description)),
    )


def record_from_dict(raw: dict, path: str = "<memory>", lineno: int = 0) -> VideoRecord:
    """Validate one catalog JSON object into a VideoRecord."""

    def fail(message: str):
        raise ParseError(path, lineno, message)

    for key in ("id", "source", "title", "target_skill", "url", "length_s", "relevancy_score", "level"):
        if key not in raw:
            fail(f"missing required field {key!r}")
    if raw["source"] not in SOURCES:
        fail(f"source must be one of {SOURCES}, got {raw['source']!r}")
    level_name = str(raw["level"]).strip().lower()
    if level_name not in LEVELS:
        fail(f"level must be one of {sorted(LEVELS)}, got {raw['level']!r}")
    length_s = float(raw["length_s"])
    if length_s < 0:
        fail(f"length_s must be >= 0, got {length_s}")
    rs = float(raw["relevancy_score"])
    if not 0.0 < rs <= 1.0 or abs(1.0 / rs - round(1.0 / rs)) > 1e-6:
        fail(f"relevancy_score must be 1/rank for an integer rank >= 1, got {rs}")
    for key in ("view_count", "likes", "dislikes"):
        if raw.get(key) is not None and int(raw[key]) < 0:
            fail(f"{key} must be >= 0, got {raw[key]}")
    fit_label = raw.get("fit_label")
    if fit_label is not None and fit_label not in (0, 1):
        fail(f"fit_label must be 0 or 1, got {fit_label!r}")

    return VideoRecord(
        id=str(raw["id"]),
        source=raw["source"],
        title=raw["title"],
        target_skill=raw["target_skill"],
        url=raw["url"],
        length_s=length_s,
        description=raw.get("description", ""),
        transcript=raw.get("transcript", "") or "",
        view_count=None if raw.get("view_count") is None else int(raw["view_count"]),
        rating=None if raw.get("rating") is None else float(raw["rating"]),
        likes=None if raw.get("likes") is None else int(raw["likes"]),
        dislikes=None if raw.get("dislikes") is None else int(raw["dislikes"]),
        relevancy_score=rs,
        level=LEVELS[level_name],
        text_similarity=float(raw.get("text_similarity", 0.0)),
        fit_label=fit_label,
    )


def record_to_dict(video: VideoRecord) -> dict:
    out = {
        "id": video.id,
        "source": video.source,
        "title": video.title,
        "target_skill": video.target_skill,
        "url": video.url,
        "length_s": video.length_s,
        "description": video.description,
        "transcript": video.transcript,
        "relevancy_score": video.relevancy_score,
        "level": LEVEL_NAMES[video.level],
        "text_similarity": video.text_similarity,
    }
    for key in ("view_count", "rating", "likes", "dislikes", "fit_label"):
        value = getattr(video, key)
        if value is not None:
            out[key] = value
    return out


def ingest_catalog(
    path: str,
    store: WordVectorStore | None,
    skills: list[SkillRecord],
    stopwords: set[str] | None = None,
    transcript_provider: TranscriptProvider | None = None,
) -> tuple[list[VideoRecord], dict[str, SkillGroup]]:
    """Read, validate, and featurize a catalog JSONL file.

    Computes text similarity against the skill descriptions when a vector
    store is given (otherwise the file's value is kept), fills missing
    transcripts from the provider when one is configured, and raises
    UnknownSkill for records naming skills that were not loaded.
    """
    by_name = {skill.name: skill for skill in skills}
    videos: list[VideoRecord] = []
    seen_ids: set[str] = set()
    unknown: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, lineno, f"invalid JSON: {exc}") from exc
            video = record_from_dict(raw, path=path, lineno=lineno)
            if video.id in seen_ids:
                raise ParseError(path, lineno, f"duplicate video id {video.id!r}")
            seen_ids.add(video.id)
            if video.target_skill not in by_name:
                unknown.append(video.target_skill)
                continue
            if not video.transcript and transcript_provider is not None:
                video.transcript = transcript_provider.lookup(video.id) or ""
            if store is not None:
                video.text_similarity = compute_text_similarity(
                    video, by_name[video.target_skill], store, stopwords
                )
            videos.append(video)
    if unknown:
        raise UnknownSkill(unknown)
    return videos, build_groups(videos)


def write_catalog(path: str, videos: list[VideoRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for video in videos:
            fh.write(json.dumps(record_to_dict(video), sort_keys=True) + "\n")
