"""ELO and logistic regression baselines"""

from dataclasses import dataclass

import numpy as np

from tmsquared.errors import ConfigError, EmptyInputError, TrainingDivergedError
from tmsquared.schema import DEFAULT_SCHEMA


@dataclass(frozen=True)
class EloConfig:
    """ELO rating settings"""

    initial: float = 1500.0
    k: float = 32.0
    base: float = 10.0
    scale: float = 400.0

    def __post_init__(self):
        if not self.k > 0 or not self.scale > 0:
            raise ConfigError("ELO k and scale must be > 0")


def elo_predict(r_a, r_b, config=EloConfig()):
    """Probability that a beats b"""
    return 1.0 / (1.0 + config.base ** ((r_b - r_a) / config.scale))


def elo_update(r_a, r_b, score_a, config=EloConfig()):
    """Ratings after a result (score_a 1 if a won, 0 if b won)"""
    if score_a not in (0, 1):
        raise ConfigError(f"score must be 0 or 1, got {score_a}")
    change = config.k * (score_a - elo_predict(r_a, r_b, config))
    return r_a + change, r_b - change


def point_majority(records):
    """1 if player 1 won more points, 2 if player 2 did, None on a tie"""
    won = sum(record.point_victor == 1 for record in records)
    lost = len(records) - won
    if won == lost:
        return None
    return 1 if won > lost else 2


class EloBaseline:
    """Per-player ratings learned from match results, frozen for prediction"""

    name = "elo"

    def __init__(self, config=EloConfig()):
        self.config = config
        self.ratings = {}

    def rating(self, player):
        """Current rating, the initial one for unseen players"""
        return self.ratings.get(player, self.config.initial)

    def fit(self, matches):
        """One rating update per training match, in the given order"""
        self.ratings = {}
        for records in matches:
            winner = point_majority(records)
            if winner is None:
                continue
            player1, player2 = records[0].player1, records[0].player2
            self.ratings[player1], self.ratings[player2] = elo_update(
                self.rating(player1),
                self.rating(player2),
                1 if winner == 1 else 0,
                self.config,
            )
        return self

    def predict_proba(self, records):
        """Player-1 win probability for every point after the first"""
        probability = elo_predict(
            self.rating(records[0].player1), self.rating(records[0].player2), self.config
        )
        return np.full(len(records) - 1, probability)


@dataclass(frozen=True)
class LogisticConfig:
    """Full-batch gradient descent on the L2-regularised log-loss"""

    learning_rate: float = 0.5
    epochs: int = 300
    l2: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0 or self.epochs < 1 or self.l2 < 0:
            raise ConfigError("invalid logistic regression settings")


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_predict_proba(weights, features):
    """Positive-class probability; the last weight is the intercept"""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    return _sigmoid(features @ weights[:-1] + weights[-1])


def logistic_baseline_train(features, labels, config=LogisticConfig()):
    """Weights (intercept last) of a logistic regression on 0/1 labels"""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    labels = np.asarray(labels, dtype=float)
    if len(features) == 0:
        raise EmptyInputError("no training samples")
    rng = np.random.default_rng(config.seed)
    weights = rng.normal(0.0, 0.01, features.shape[1] + 1)
    design = np.hstack([features, np.ones((len(features), 1))])
    for epoch in range(1, config.epochs + 1):
        probability = _sigmoid(design @ weights)
        gradient = design.T @ (probability - labels) / len(labels)
        gradient[:-1] += config.l2 * weights[:-1]
        weights = weights - config.learning_rate * gradient
        if not np.all(np.isfinite(weights)):
            raise TrainingDivergedError(epoch)
    return weights


def point_features(records, schema=DEFAULT_SCHEMA):
    """Both players' raw features at every point but the last"""
    rows = [
        [record.feature(name, side) for side in (1, 2) for name in schema.names]
        for record in records[:-1]
    ]
    return np.array(rows, dtype=float)


def next_point_labels(records):
    """1 where player 1 wins the following point"""
    return np.array([1.0 if record.point_victor == 1 else 0.0 for record in records[1:]])


class LogisticBaseline:
    """Predicts the next point's victor from the current point's features"""

    name = "logistic"

    def __init__(self, schema=DEFAULT_SCHEMA, config=LogisticConfig()):
        self.schema = schema
        self.config = config
        self.weights = None
        self.mean = None
        self.std = None

    def _standardize(self, features):
        return (features - self.mean) / self.std

    def fit(self, matches):
        """Standardise on the training matches and fit"""
        matches = [records for records in matches if len(records) >= 2]
        if not matches:
            raise EmptyInputError("no training matches with 2 or more points")
        features = np.vstack([point_features(records, self.schema) for records in matches])
        labels = np.concatenate([next_point_labels(records) for records in matches])
        self.mean = features.mean(axis=0)
        std = features.std(axis=0)
        self.std = np.where(std > 0, std, 1.0)
        self.weights = logistic_baseline_train(
            self._standardize(features), labels, self.config
        )
        return self

    def predict_proba(self, records):
        """Player-1 win probability for every point after the first"""
        return logistic_predict_proba(
            self.weights, self._standardize(point_features(records, self.schema))
        )
