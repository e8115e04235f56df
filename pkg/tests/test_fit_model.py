import filecmp

import numpy as np
import pytest

from skillrec.fit_model import (
    FEATURE_NAMES,
    FitFeatures,
    ForestConfig,
    RandomForestModel,
    SingleClassCorpus,
    evaluate_fit_f1,
    feature_importances,
    predict_fit,
    train_fit_model,
)
from skillrec.skill_mining import seeded_split


def _features(rng) -> FitFeatures:
    return FitFeatures(
        length_s=float(rng.uniform(60, 3600)),
        rating=float(rng.uniform(1, 5)),
        view_count=float(rng.integers(0, 1_000_000)),
        relevancy_score=1.0 / int(rng.integers(1, 10)),
        level=int(rng.integers(0, 3)),
        text_similarity=float(rng.uniform(-1, 1)),
    )


def _threshold_dataset(n=500, seed=0):
    """Label depends only on text similarity; everything else is noise."""
    rng = np.random.default_rng(seed)
    return [(f, int(f.text_similarity > 0.5)) for f in (_features(rng) for _ in range(n))]


@pytest.fixture(scope="module")
def threshold_model():
    data = _threshold_dataset()
    train, test = seeded_split(data, 0.7, seed=0)
    model = train_fit_model(train, ForestConfig(seed=0))
    return model, train, test


def test_separable_dataset_reaches_high_f1(threshold_model):
    model, _, test = threshold_model
    assert evaluate_fit_f1(model, test)["f1"] >= 0.98


def test_training_is_deterministic(threshold_model):
    model, train, test = threshold_model
    again = train_fit_model(train, ForestConfig(seed=0))
    for features, _ in test:
        assert predict_fit(again, features) == predict_fit(model, features)


def test_training_requires_both_labels():
    rng = np.random.default_rng(1)
    data = [(_features(rng), 1) for _ in range(10)]
    with pytest.raises(SingleClassCorpus):
        train_fit_model(data, ForestConfig(seed=0))


def test_probability_is_vote_fraction(threshold_model):
    model, _, test = threshold_model
    for features, _ in test[:25]:
        votes = model.tree_votes(features)
        result = predict_fit(model, features)
        assert result["probability"] == sum(votes) / len(votes)
        assert result["label"] == (1 if result["probability"] >= 0.5 else 0)
        assert 0.0 <= result["probability"] <= 1.0


def test_single_tree_probability_is_binary():
    data = _threshold_dataset(n=60, seed=2)
    model = train_fit_model(data, ForestConfig(n_trees=1, seed=2))
    rng = np.random.default_rng(3)
    for _ in range(20):
        assert predict_fit(model, _features(rng))["probability"] in (0.0, 1.0)


def test_probability_monotone_in_positive_votes(threshold_model):
    model, _, test = threshold_model
    results = [(sum(model.tree_votes(f)), predict_fit(model, f)["probability"]) for f, _ in test]
    results.sort()
    probs = [p for _, p in results]
    assert probs == sorted(probs)


def _memorization_config():
    return ForestConfig(
        n_trees=1, max_depth=None, min_samples_leaf=1,
        features_per_split=6, bootstrap=False, seed=0,
    )


def test_fully_grown_tree_memorizes_unique_rows():
    data = _threshold_dataset(n=120, seed=4)
    model = train_fit_model(data, _memorization_config())
    for features, label in data:
        assert predict_fit(model, features)["label"] == label


def test_fully_grown_tree_memorizes_xor_pattern():
    # no single split improves Gini at the root; the tree must still split
    def f(a, b):
        return FitFeatures(length_s=a, rating=b, view_count=0, relevancy_score=1.0,
                           level=0, text_similarity=0.0)

    data = [(f(0, 0), 0), (f(0, 1), 1), (f(1, 0), 1), (f(1, 1), 0)]
    model = train_fit_model(data, _memorization_config())
    for features, label in data:
        assert predict_fit(model, features)["label"] == label


def test_importances_concentrate_on_generative_feature():
    rng = np.random.default_rng(5)
    data = [(f, int(f.length_s > 1800)) for f in (_features(rng) for _ in range(400))]
    model = train_fit_model(data, ForestConfig(seed=5))
    importances = feature_importances(model)
    assert importances[FEATURE_NAMES.index("length_s")] > 0.9


def test_importances_spread_out_under_noise_labels():
    for seed in range(4):
        rng = np.random.default_rng(seed)
        data = [(_features(rng), int(rng.integers(0, 2))) for _ in range(200)]
        model = train_fit_model(data, ForestConfig(seed=seed))
        assert feature_importances(model).max() <= 0.6


def test_importances_sum_to_one(threshold_model):
    model, _, _ = threshold_model
    assert abs(feature_importances(model).sum() - 1.0) <= 1e-9
    assert (feature_importances(model) >= 0).all()


def test_model_json_round_trip(tmp_path, threshold_model):
    model, _, test = threshold_model
    path = tmp_path / "fit.json"
    model.save(str(path))
    loaded = RandomForestModel.load(str(path))
    for features, _ in test[:25]:
        assert predict_fit(loaded, features) == predict_fit(model, features)
    again = tmp_path / "fit2.json"
    loaded.save(str(again))
    assert filecmp.cmp(path, again, shallow=False)


def test_load_rejects_other_payloads(tmp_path):
    path = tmp_path / "other.json"
    path.write_text('{"kind": "something-else"}', encoding="utf-8")
    with pytest.raises(ValueError):
        RandomForestModel.load(str(path))


def test_evaluate_fit_f1_rejects_empty():
    model = RandomForestModel(trees=[], config=ForestConfig())
    with pytest.raises(ValueError):
        evaluate_fit_f1(model, [])
