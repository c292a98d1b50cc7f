"""Test winner decisions and match simulation"""

import numpy as np
import pandas as pd
import pytest

from tmsquared.encoding import MomentumEncoder
from tmsquared.errors import (
    ConfigError,
    StructureError,
    UnknownPlayerError,
    UnresolvedTieError,
)
from tmsquared.forecast import ModelConfig, init_model
from tmsquared.momentum import MomentumSeries
from tmsquared.outcome import (
    RankingTable,
    decide,
    load_rankings,
    simulate_match,
    write_decision_log,
)
from tmsquared.synthetic import DEFAULT_ROSTER

RANKS = RankingTable({"Ann": 3, "Bea": 7, "Cid": 7})


def test_higher_forecast_wins():
    """No ranking needed when the forecasts differ"""
    decision = decide(0.8, 0.2, "Ann", "Bea", RANKS)
    assert decision.winner == "Ann"
    assert decision.margin == pytest.approx(0.6)
    assert not decision.tiebreak_used
    assert decide(0.1, 0.2, "Ann", "Bea", RANKS).winner == "Bea"


def test_tie_goes_to_better_rank():
    """Equal forecasts, rank 3 beats rank 7"""
    decision = decide(0.5, 0.5, "Bea", "Ann", RANKS)
    assert decision.winner == "Ann"
    assert decision.tiebreak_used


def test_tie_with_one_ranked_player():
    """Only one player ranked: that player wins the tie"""
    assert decide(1.0, 1.0, "Ann", "Dee", RANKS).winner == "Ann"
    assert decide(1.0, 1.0, "Dee", "Bea", RANKS).winner == "Bea"


def test_unresolved_ties():
    """Unranked pairs and shared ranks cannot be split"""
    with pytest.raises(UnresolvedTieError):
        decide(1.0, 1.0, "Dee", "Eve", RANKS)
    with pytest.raises(UnresolvedTieError):
        decide(1.0, 1.0, "Bea", "Cid", RANKS)


def test_non_finite_forecasts():
    """NaN forecasts are refused"""
    with pytest.raises(StructureError):
        decide(float("nan"), 0.0, "Ann", "Bea", RANKS)


def test_ranking_table():
    """Ranks are positive integers"""
    assert RANKS.rank("Bea") == 7
    with pytest.raises(UnknownPlayerError):
        RANKS.rank("Dee")
    with pytest.raises(ConfigError):
        RankingTable({"Ann": 0})


def test_load_rankings(fake_filesystem):
    """player,rank files"""
    fake_filesystem.create_file("ranks.csv", contents="player,rank\nAnn,4\nBea,1\n")
    ranks = load_rankings("ranks.csv")
    assert ranks.rank("Bea") == 1
    fake_filesystem.create_file("bad.csv", contents="name,rank\nAnn,4\n")
    with pytest.raises(ConfigError):
        load_rankings("bad.csv")


def _pair(records, first, second):
    return (
        MomentumSeries(first, records[0].player1, records[0].player2),
        MomentumSeries(second, records[0].player2, records[0].player1),
    )


def test_simulate_match(mocker, match_records, rankings):
    """Every next point is decided from the two forecasts"""
    model = init_model(ModelConfig(window=8, hidden=4, key_dim=2, kernel_sizes=(3,)))
    size = len(match_records)
    forecasts = iter([np.full(size - 1, 2.0), np.full(size - 1, 1.0)])
    mocker.patch("tmsquared.outcome.forecast_batch", side_effect=lambda *_: next(forecasts))
    pair = _pair(match_records, np.zeros(size), np.zeros(size))
    simulation = simulate_match(model, match_records, None, rankings, pair)
    assert len(simulation.decisions) == size - 1
    assert simulation.predicted == [DEFAULT_ROSTER[0]] * (size - 1)
    assert simulation.winner.winner == DEFAULT_ROSTER[0]
    assert list(simulation.points) == list(range(1, size))
    assert len(simulation.victors) == size - 1


def test_simulate_match_encodes_when_needed(match_records, uniform_weights, pressure, rankings):
    """Without a momentum pair the encoder is used"""
    encoder = MomentumEncoder(uniform_weights, pressure, causal=False)
    model = init_model(ModelConfig(window=8, hidden=4, key_dim=2, kernel_sizes=(3,)))
    simulation = simulate_match(model, match_records, encoder, rankings)
    assert np.all(np.isfinite(simulation.forecast_i))
    assert simulation.realized_i.shape == (len(match_records) - 1,)


def test_simulate_needs_two_points(match_records, rankings):
    """A single point has nothing to forecast"""
    model = init_model(ModelConfig(window=8, hidden=4, key_dim=2, kernel_sizes=(3,)))
    with pytest.raises(StructureError):
        simulate_match(model, match_records[:1], None, rankings)


def test_decision_log(tmp_path, mocker, match_records, rankings):
    """One row per forecast point"""
    model = init_model(ModelConfig(window=8, hidden=4, key_dim=2, kernel_sizes=(3,)))
    mocker.patch(
        "tmsquared.outcome.forecast_batch",
        side_effect=lambda _, windows: np.zeros(len(windows)),
    )
    size = len(match_records)
    pair = _pair(match_records, np.zeros(size), np.zeros(size))
    simulation = simulate_match(model, match_records, None, rankings, pair)
    write_decision_log([simulation], tmp_path / "decisions.csv")
    table = pd.read_csv(tmp_path / "decisions.csv")
    assert list(table.columns) == ["match_id", "t", "P_i", "P_j", "winner", "tiebreak_used"]
    assert len(table) == size - 1
    # equal forecasts: Carlos Alcaraz (rank 1) beats Alexander Zverev (rank 19)
    assert set(table["winner"]) == {DEFAULT_ROSTER[1]}
    assert table["tiebreak_used"].all()
