"""Test the ELO and logistic regression baselines"""

import numpy as np
import pytest

from tmsquared.baselines import (
    EloBaseline,
    EloConfig,
    LogisticBaseline,
    LogisticConfig,
    elo_predict,
    elo_update,
    logistic_baseline_train,
    logistic_predict_proba,
    next_point_labels,
    point_features,
    point_majority,
)
from tmsquared.errors import ConfigError, EmptyInputError
from tmsquared.ingest import group_matches
from tmsquared.records import MatchPointRecord
from tmsquared.synthetic import generate_synthetic_corpus


def _match(match_id, player1, player2, victors):
    return [
        MatchPointRecord(match_id, player1, player2, float(t), 1, victor)
        for t, victor in enumerate(victors)
    ]


def test_elo_predict():
    """Equal ratings are a coin flip; 400 points is ten to one"""
    assert elo_predict(1500, 1500) == pytest.approx(0.5)
    assert elo_predict(1900, 1500) == pytest.approx(10 / 11)


def test_elo_update():
    """Zero-sum updates scaled by k"""
    winner, loser = elo_update(1500, 1500, 1)
    assert (winner, loser) == (1516.0, 1484.0)
    assert elo_update(1e6, 0.0, 1) == (1e6, 0.0)
    with pytest.raises(ConfigError):
        elo_update(1500, 1500, 0.5)
    with pytest.raises(ConfigError):
        EloConfig(k=0.0)


def test_point_majority():
    """Winner by points, None on a tie"""
    assert point_majority(_match("m", "A", "B", [1, 1, 2])) == 1
    assert point_majority(_match("m", "A", "B", [2, 2, 1])) == 2
    assert point_majority(_match("m", "A", "B", [1, 2])) is None


def test_elo_baseline():
    """Repeated winners end up favoured"""
    matches = [_match(f"m{n}", "A", "B", [1, 1, 2]) for n in range(5)]
    matches.append(_match("tie", "A", "C", [1, 2]))
    elo = EloBaseline().fit(matches)
    assert elo.rating("A") > 1500 > elo.rating("B")
    assert elo.rating("C") == 1500
    probability = elo.predict_proba(_match("new", "A", "B", [1, 2, 1, 1]))
    assert probability.shape == (3,)
    assert np.all(probability > 0.5)


def test_logistic_train_separable():
    """A single informative feature is picked up"""
    rng = np.random.default_rng(0)
    features = rng.normal(size=(200, 2))
    labels = (features[:, 0] > 0).astype(float)
    weights = logistic_baseline_train(features, labels, LogisticConfig(epochs=500))
    assert weights.shape == (3,)
    predicted = logistic_predict_proba(weights, features) >= 0.5
    assert np.mean(predicted == labels.astype(bool)) > 0.9
    with pytest.raises(EmptyInputError):
        logistic_baseline_train(np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(ConfigError):
        LogisticConfig(epochs=0)


def test_point_features_and_labels(match_records):
    """Features of point t are paired with the victor of point t + 1"""
    features = point_features(match_records)
    labels = next_point_labels(match_records)
    assert features.shape == (119, 20)
    assert labels.shape == (119,)
    assert labels[0] == (1.0 if match_records[1].point_victor == 1 else 0.0)


def test_logistic_baseline():
    """Fit on matches, probabilities for every later point"""
    matches = list(group_matches(generate_synthetic_corpus(1, 3, 50)).values())
    baseline = LogisticBaseline().fit(matches[:2])
    probability = baseline.predict_proba(matches[2])
    assert probability.shape == (49,)
    assert np.all((probability > 0) & (probability < 1))
    with pytest.raises(EmptyInputError):
        LogisticBaseline().fit([])
