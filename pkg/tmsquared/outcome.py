"""Point and match winners from forecast momentum"""

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from tmsquared.errors import (
    ConfigError,
    StructureError,
    UnknownPlayerError,
    UnresolvedTieError,
)
from tmsquared.forecast import forecast_batch
from tmsquared.training import make_windows


class RankingTable:
    """Historical ranks, 1 is best"""

    def __init__(self, ranks):
        self.ranks = {}
        for player, rank in dict(ranks).items():
            if int(rank) != rank or rank < 1:
                raise ConfigError(f"rank of {player} must be a positive integer")
            self.ranks[player] = int(rank)

    def __contains__(self, player):
        return player in self.ranks

    def rank(self, player):
        """Rank of a player"""
        try:
            return self.ranks[player]
        except KeyError as exception:
            raise UnknownPlayerError(f"{player} has no ranking") from exception


def load_rankings(path):
    """Read a player,rank CSV file"""
    table = pd.read_csv(path, dtype={"player": str})
    for column in ("player", "rank"):
        if column not in table.columns:
            raise ConfigError(f"{path}: missing column {column}")
    return RankingTable(dict(zip(table["player"], table["rank"])))


@dataclass(frozen=True)
class OutcomeDecision:
    """Predicted winner, forecast margin and whether the ranking decided"""

    winner: str
    margin: float
    tiebreak_used: bool = False


def decide(p_i, p_j, i, j, ranks):
    """Higher forecast wins; equal forecasts go to the better ranked player"""
    if not (math.isfinite(p_i) and math.isfinite(p_j)):
        raise StructureError("forecasts must be finite")
    margin = float(p_i - p_j)
    if p_i > p_j:
        return OutcomeDecision(i, margin)
    if p_i < p_j:
        return OutcomeDecision(j, margin)
    known_i = i in ranks
    known_j = j in ranks
    if not (known_i or known_j):
        raise UnresolvedTieError(f"{i} and {j} are tied and neither is ranked")
    if known_i and known_j:
        if ranks.rank(i) == ranks.rank(j):
            raise UnresolvedTieError(f"{i} and {j} are tied and share a rank")
        winner = i if ranks.rank(i) < ranks.rank(j) else j
    else:
        winner = i if known_i else j
    return OutcomeDecision(winner, margin, True)


@dataclass(frozen=True, eq=False)
class MatchSimulation:
    """Per-point forecasts and decisions of one match

    Entry n predicts point n + 1 from the momentum observed up to point n.
    """

    match_id: str
    player_i: str
    player_j: str
    points: np.ndarray
    forecast_i: np.ndarray
    forecast_j: np.ndarray
    realized_i: np.ndarray
    realized_j: np.ndarray
    victors: tuple
    decisions: tuple
    winner: OutcomeDecision

    @property
    def predicted(self):
        """Predicted victor of every forecast point"""
        return [decision.winner for decision in self.decisions]


def simulate_match(model, records, encoder, ranks, momentum_pair=None):
    """Roll the forecaster over a match and decide every next point"""
    if len(records) < 2:
        raise StructureError("a match needs at least 2 points to simulate")
    first, second = (
        encoder.encode(records) if momentum_pair is None else momentum_pair
    )
    player_i, player_j = records[0].player1, records[0].player2
    windows_i, realized_i = make_windows(first.values, model.config.window)
    windows_j, realized_j = make_windows(second.values, model.config.window)
    forecast_i = forecast_batch(model, windows_i)
    forecast_j = forecast_batch(model, windows_j)
    decisions = tuple(
        decide(float(p_i), float(p_j), player_i, player_j, ranks)
        for p_i, p_j in zip(forecast_i, forecast_j)
    )
    wins_i = sum(decision.winner == player_i for decision in decisions)
    winner = decide(
        float(wins_i), float(len(decisions) - wins_i), player_i, player_j, ranks
    )
    victors = tuple(
        player_i if record.point_victor == 1 else player_j for record in records[1:]
    )
    return MatchSimulation(
        match_id=records[0].match_id,
        player_i=player_i,
        player_j=player_j,
        points=np.arange(1, len(records)),
        forecast_i=forecast_i,
        forecast_j=forecast_j,
        realized_i=realized_i,
        realized_j=realized_j,
        victors=victors,
        decisions=decisions,
        winner=winner,
    )


def write_decision_log(simulations, path):
    """Write match_id, t, P_i, P_j, winner, tiebreak_used rows to a CSV file"""
    rows = []
    for simulation in simulations:
        for point, p_i, p_j, decision in zip(
            simulation.points,
            simulation.forecast_i,
            simulation.forecast_j,
            simulation.decisions,
        ):
            rows.append(
                {
                    "match_id": simulation.match_id,
                    "t": int(point),
                    "P_i": float(p_i),
                    "P_j": float(p_j),
                    "winner": decision.winner,
                    "tiebreak_used": decision.tiebreak_used,
                }
            )
    pd.DataFrame(
        rows, columns=["match_id", "t", "P_i", "P_j", "winner", "tiebreak_used"]
    ).to_csv(path, index=False)
