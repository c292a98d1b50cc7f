"""Synthetic tennis matches with planted momentum shifts"""

import numpy as np

from tmsquared.errors import ConfigError
from tmsquared.records import MatchPointRecord, PlayerStats

# Baseline psychological_factor level and its point-to-point noise
PSYCH_BASE = 5.0
PSYCH_NOISE = 1.5
# Logistic scale turning a performance gap into a point win probability
POINT_SCALE = 0.6
SERVE_EDGE = 0.3
ACE_RATE = 0.08
DOUBLE_FAULT_RATE = 0.04

# Players of the shipped pressure matrix
DEFAULT_ROSTER = (
    "Alexander Zverev",
    "Carlos Alcaraz",
    "Frances Tiafoe",
    "David Goffin",
    "Maximilian Marterer",
    "Novak Djokovic",
)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


class _Scoreboard:
    """Minimal tennis score: games to 4 by 2, sets to 6 by 2, tiebreak at 6-6"""

    def __init__(self):
        self.sets = [0, 0]
        self.games = [0, 0]
        self.points = [0, 0]
        self.server = 0

    @property
    def tiebreak(self):
        return self.games == [6, 6]

    def break_point(self):
        """True when the receiver wins the game by winning this point"""
        if self.tiebreak:
            return False
        receiver = 1 - self.server
        return self.points[receiver] >= 3 and self.points[receiver] > self.points[
            self.server
        ]

    def play(self, winner):
        """Record a point won by player index 0 or 1"""
        self.points[winner] += 1
        target = 7 if self.tiebreak else 4
        if self.points[winner] >= target and self.points[winner] - self.points[
            1 - winner
        ] >= 2:
            self._game(winner)

    def _game(self, winner):
        tiebreak = self.tiebreak
        self.points = [0, 0]
        self.games[winner] += 1
        self.server = 1 - self.server
        won = self.games[winner]
        lost = self.games[1 - winner]
        if tiebreak or (won >= 6 and won - lost >= 2):
            self.sets[winner] += 1
            self.games = [0, 0]


def latent_performance(n_points, planted):
    """Piecewise constant player-1 performance with the planted level shifts"""
    latent = np.zeros(n_points)
    for index, magnitude in planted:
        if not 0 <= index < n_points:
            raise ConfigError(f"jump index {index} outside 0..{n_points - 1}")
        latent[index:] += magnitude
    return latent


def _play_match(rng, match_id, player1, player2, latent, psych_noise=PSYCH_NOISE):
    board = _Scoreboard()
    elapsed = 0
    records = []
    for t, perf in enumerate(latent):
        server = board.server
        edge = SERVE_EDGE if server == 0 else -SERVE_EDGE
        p_first = _sigmoid(POINT_SCALE * 2.0 * perf + edge)
        winner = 0 if rng.random() < p_first else 1
        server_won = winner == server
        ace = server_won and rng.random() < ACE_RATE
        double_fault = not server_won and rng.random() < DOUBLE_FAULT_RATE
        break_point = board.break_point()
        rally = 0 if ace or double_fault else int(rng.integers(1, 12))
        run = [rally * rng.uniform(2.8, 3.2) for _ in range(2)]
        psych = PSYCH_BASE + np.array([perf, -perf]) + rng.normal(
            0.0, psych_noise, size=2
        )

        stats = []
        for side in (0, 1):
            receiver = side != server
            stats.append(
                PlayerStats(
                    p_sets=board.sets[side],
                    p_games=board.games[side],
                    p_ace=1.0 if ace and side == server else 0.0,
                    p_double_fault=1.0 if double_fault and side == server else 0.0,
                    p_break_pt_missed=(
                        1.0 if break_point and receiver and winner != side else 0.0
                    ),
                    p_break_pt_won=(
                        1.0 if break_point and receiver and winner == side else 0.0
                    ),
                    p_distance_run=round(run[side], 3),
                    psychological_factor=float(psych[side]),
                )
            )
        records.append(
            MatchPointRecord(
                match_id=match_id,
                player1=player1,
                player2=player2,
                elapsed_time=float(elapsed),
                server=server + 1,
                point_victor=winner + 1,
                p1=stats[0],
                p2=stats[1],
            )
        )
        board.play(winner)
        elapsed += int(rng.integers(20, 61))
    return records


def generate_synthetic_match(
    seed,
    n_points,
    planted=(),
    match_id="synthetic-0",
    player1=DEFAULT_ROSTER[0],
    player2=DEFAULT_ROSTER[1],
):
    """Generate one match whose player-1 performance shifts at the planted jumps

    Each (index, magnitude) of planted adds magnitude to player 1's latent
    performance from index on; player 2 mirrors it. The latent level feeds the
    point win probability and the psychological_factor column, so a jump of
    c * PSYCH_NOISE is a c-sigma level shift of that column.
    """
    if n_points < 2:
        raise ConfigError("a match needs at least 2 points")
    latent = latent_performance(n_points, planted)
    rng = np.random.default_rng(seed)
    return _play_match(rng, match_id, player1, player2, latent)


def _regime_latent(rng, n_points, regime_strength, skill):
    latent = np.full(n_points, skill)
    position = int(rng.integers(0, 120))
    sign = 1.0 if rng.random() < 0.5 else -1.0
    while position < n_points:
        latent[position:] = skill + sign * regime_strength
        position += int(rng.integers(120, 261))
        sign = -sign
    return latent


def generate_synthetic_corpus(
    seed,
    n_matches,
    n_points,
    roster=DEFAULT_ROSTER,
    regime_strength=1.0,
    psych_noise=PSYCH_NOISE,
):
    """Generate many matches with dominance regimes that toggle between players

    psych_noise sets how well a single point's psychological_factor reveals
    the current regime.
    """
    if len(roster) < 2:
        raise ConfigError("roster needs at least two players")
    if n_matches < 1:
        raise ConfigError("n_matches must be >= 1")
    if n_points < 2:
        raise ConfigError("a match needs at least 2 points")
    if psych_noise < 0:
        raise ConfigError(f"psych_noise must be >= 0, got {psych_noise}")
    rng = np.random.default_rng(seed)
    records = []
    for number in range(n_matches):
        first, second = rng.choice(len(roster), size=2, replace=False)
        skill = rng.normal(0.0, 0.2)
        latent = _regime_latent(rng, n_points, regime_strength, skill)
        records.extend(
            _play_match(
                rng,
                f"synthetic-{number}",
                roster[first],
                roster[second],
                latent,
                psych_noise,
            )
        )
    return records
