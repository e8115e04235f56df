import numpy as np
import pytest

from skillrec.learner_state import (
    DuplicateTarget,
    RatingOutOfRange,
    SkillMastered,
    UnknownTarget,
    UnknownVideo,
    add_target,
    create_profile,
    next_recommendation,
    record_feedback,
    record_rating,
    skip_recommendation,
)
from skillrec.recommender import NoCandidates, UserContext, fit_preferences


def _pool(prefix, n, rng):
    return [(f"{prefix}{i}", rng.uniform(0, 1, 4)) for i in range(n)]


@pytest.fixture
def world():
    rng = np.random.default_rng(23)
    pools = {
        ("python", 0): _pool("py-b", 4, rng),
        ("python", 1): _pool("py-i", 4, rng),
        ("python", 2): _pool("py-a", 4, rng),
        ("sql", 0): _pool("sq-b", 3, rng),
    }

    def candidates_for(skill, level):
        return pools.get((skill, level), [])

    return pools, candidates_for


def _fresh(skill="python", level=0):
    profile = create_profile("u1", "dev", "berlin", "msc")
    add_target(profile, skill, level)
    return profile


def test_create_profile_defaults_and_peer_init():
    profile = _fresh()
    assert profile.p.tolist() == [0.25, 0.25, 0.25, 0.25]
    peer = (UserContext("dev", "", ""), np.array([0.5, 0.3, 0.1, 0.1]))
    shared = create_profile("u2", "dev", "paris", "bsc", peers=[peer])
    assert shared.p.tolist() == [0.5, 0.3, 0.1, 0.1]
    assert shared.p_init.tolist() == [0.5, 0.3, 0.1, 0.1]


def test_add_target_rejects_duplicates_and_bad_levels():
    profile = _fresh()
    with pytest.raises(DuplicateTarget):
        add_target(profile, "python", 1)
    with pytest.raises(ValueError):
        add_target(profile, "sql", 5)


def test_next_recommendation_is_cosine_argmax(world):
    pools, candidates_for = world
    profile = _fresh()
    video_id, x, score = next_recommendation(profile, "python", candidates_for)
    def cos(a, b):
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        return 0.0 if na == 0 or nb == 0 else float(a @ b / (na * nb))
    expected = max(pools[("python", 0)], key=lambda c: (cos(c[1], profile.p), c[0]))
    assert video_id == expected[0]
    assert profile.active["python"].video_id == video_id
    assert score == pytest.approx(cos(expected[1], profile.p))


def test_next_recommendation_requires_known_unmastered_target(world):
    _, candidates_for = world
    profile = _fresh()
    with pytest.raises(UnknownTarget):
        next_recommendation(profile, "sql", candidates_for)
    profile.targets["python"].mastered = True
    with pytest.raises(SkillMastered):
        next_recommendation(profile, "python", candidates_for)


def test_rating_advances_level_on_four_plus_stars(world):
    _, candidates_for = world
    profile = _fresh()
    vid, _, _ = next_recommendation(profile, "python", candidates_for)
    target = record_rating(profile, vid, 5)
    assert target.level == 1
    assert not target.mastered


def test_rating_below_threshold_keeps_level_but_refits(world):
    _, candidates_for = world
    profile = _fresh()
    vid, _, _ = next_recommendation(profile, "python", candidates_for)
    target = record_rating(profile, vid, 2)
    assert target.level == 0
    assert len(profile.history) == 1
    assert profile.history[0].y == 0.25
    expected_p = fit_preferences(profile.p_init, profile.history)
    assert np.array_equal(profile.p, expected_p)


def test_advanced_level_plus_high_rating_masters_skill(world):
    _, candidates_for = world
    profile = _fresh(level=2)
    vid, _, _ = next_recommendation(profile, "python", candidates_for)
    target = record_rating(profile, vid, 4)
    assert target.mastered
    assert target.level == 2
    with pytest.raises(SkillMastered):
        next_recommendation(profile, "python", candidates_for)


def test_stars_map_linearly_onto_satisfaction(world):
    _, candidates_for = world
    profile = _fresh()
    for stars, y in [(1, 0.0), (2, 0.25), (3, 0.5), (4, 0.75), (5, 1.0)]:
        profile = _fresh()
        vid, _, _ = next_recommendation(profile, "python", candidates_for)
        record_rating(profile, vid, stars)
        assert profile.history[-1].y == y


def test_rating_validation(world):
    _, candidates_for = world
    profile = _fresh()
    vid, _, _ = next_recommendation(profile, "python", candidates_for)
    for bad in (0, 6, -1, 2.5, True):
        with pytest.raises(RatingOutOfRange):
            record_rating(profile, vid, bad)
    with pytest.raises(UnknownVideo):
        record_rating(profile, "nonexistent", 3)
    with pytest.raises(RatingOutOfRange):
        record_feedback(profile, vid, 1.5)


def test_no_video_recommended_twice_per_skill(world):
    pools, candidates_for = world
    profile = _fresh()
    seen = []
    # alternate ratings high/low so the learner walks through all levels
    stars = iter([5, 2, 2, 2, 5, 2, 2, 2, 5])
    while True:
        try:
            vid, _, _ = next_recommendation(profile, "python", candidates_for)
        except (NoCandidates, SkillMastered):
            break
        seen.append(vid)
        record_rating(profile, vid, next(stars))
    assert len(seen) == len(set(seen))


def test_level_is_monotone_non_decreasing(world):
    _, candidates_for = world
    profile = _fresh()
    levels = [profile.targets["python"].level]
    for stars in (2, 5, 1, 5, 3):
        try:
            vid, _, _ = next_recommendation(profile, "python", candidates_for)
        except (NoCandidates, SkillMastered):
            break
        record_rating(profile, vid, stars)
        levels.append(profile.targets["python"].level)
    assert all(b >= a for a, b in zip(levels, levels[1:]))


def test_replaying_history_reproduces_p_bit_for_bit(world):
    _, candidates_for = world
    profile = _fresh()
    feedback = [0.9, 0.1, 0.6, 0.8]
    for i, y in enumerate(feedback):
        vid, _, _ = next_recommendation(profile, "python", candidates_for)
        record_feedback(profile, vid, y, timestamp=f"t{i}")

    # replay the same interactions on a fresh profile
    replay = _fresh()
    for event in profile.history:
        vid, _, _ = next_recommendation(replay, "python", candidates_for)
        assert vid == event.video_id
        record_feedback(replay, vid, event.y, timestamp=event.timestamp)
    assert np.array_equal(replay.p, profile.p)
    assert replay.p.tobytes() == profile.p.tobytes()


def test_p_always_equals_refit_from_init_over_history(world):
    _, candidates_for = world
    profile = _fresh()
    rng = np.random.default_rng(5)
    for i in range(4):
        vid, _, _ = next_recommendation(profile, "python", candidates_for)
        record_feedback(profile, vid, float(rng.uniform(0, 1)), timestamp=f"t{i}")
        assert np.array_equal(profile.p, fit_preferences(profile.p_init, profile.history))


def test_skip_changes_next_recommendation(world):
    _, candidates_for = world
    profile = _fresh()
    first, _, _ = next_recommendation(profile, "python", candidates_for)
    skip_recommendation(profile, first)
    second, _, _ = next_recommendation(profile, "python", candidates_for)
    assert second != first
    assert profile.skipped == {first}
    assert np.array_equal(profile.p, profile.p_init)  # skips never touch P


def test_skip_is_idempotent(world):
    _, candidates_for = world
    profile = _fresh()
    vid, _, _ = next_recommendation(profile, "python", candidates_for)
    skip_recommendation(profile, vid)
    state = (set(profile.skipped), dict(profile.active))
    skip_recommendation(profile, vid)
    assert (set(profile.skipped), dict(profile.active)) == state


def test_skip_unknown_video_raises(world):
    _, candidates_for = world
    profile = _fresh()
    next_recommendation(profile, "python", candidates_for)
    with pytest.raises(UnknownVideo):
        skip_recommendation(profile, "never-recommended")


def test_skipping_all_candidates_exhausts_pool(world):
    pools, candidates_for = world
    profile = _fresh(skill="sql")
    for _ in range(len(pools[("sql", 0)])):
        vid, _, _ = next_recommendation(profile, "sql", candidates_for)
        skip_recommendation(profile, vid)
    with pytest.raises(NoCandidates):
        next_recommendation(profile, "sql", candidates_for)
