"""A single match point and its per-player statistics"""

import math
from dataclasses import dataclass, field, fields

from tmsquared.errors import SchemaError, SeriesInvariantError, UnknownPlayerError
from tmsquared.schema import PLAYER_FIELDS


@dataclass(frozen=True)
class PlayerStats:
    """Per-player statistics of one point"""

    p_sets: float = 0.0
    p_games: float = 0.0
    p_ace: float = 0.0
    p_double_fault: float = 0.0
    p_break_pt_missed: float = 0.0
    p_break_pt_won: float = 0.0
    p_distance_run: float = 0.0
    psychological_factor: float = 0.0

    def __post_init__(self):
        for item in fields(self):
            value = float(getattr(self, item.name))
            if not math.isfinite(value):
                raise SeriesInvariantError(f"{item.name} must be finite")
            object.__setattr__(self, item.name, value)
        if self.p_distance_run < 0:
            raise SeriesInvariantError("p_distance_run must be >= 0")


@dataclass(frozen=True)
class MatchPointRecord:
    """One point of a match, both players' statistics included"""

    match_id: str
    player1: str
    player2: str
    elapsed_time: float
    server: int
    point_victor: int
    p1: PlayerStats = field(default_factory=PlayerStats)
    p2: PlayerStats = field(default_factory=PlayerStats)

    def __post_init__(self):
        if self.server not in (1, 2):
            raise SeriesInvariantError(f"server must be 1 or 2, got {self.server}")
        if self.point_victor not in (1, 2):
            raise SeriesInvariantError(
                f"point_victor must be 1 or 2, got {self.point_victor}"
            )
        if not math.isfinite(self.elapsed_time):
            raise SeriesInvariantError("elapsed_time must be finite")

    def side(self, player):
        """Player number (1 or 2) of a player id"""
        if player in (self.player1, 1):
            return 1
        if player in (self.player2, 2):
            return 2
        raise UnknownPlayerError(f"{player} does not play match {self.match_id}")

    def opponent(self, player):
        """Id of the other player"""
        return self.player2 if self.side(player) == 1 else self.player1

    def stats(self, side):
        """Statistics of player number 1 or 2"""
        return self.p1 if side == 1 else self.p2

    def feature(self, name, side):
        """Value of a schema feature from the point of view of one player"""
        if name == "server":
            return 1.0 if self.server == side else 0.0
        if name == "point_victor":
            return 1.0 if self.point_victor == side else 0.0
        if name not in PLAYER_FIELDS:
            raise SchemaError(f"unknown feature {name}")
        return getattr(self.stats(side), name)


def check_counters(records):
    """Sets never decrease within a match; games never decrease within a set"""
    for before, after in zip(records, records[1:]):
        if after.match_id != before.match_id:
            continue
        for side in (1, 2):
            if after.stats(side).p_sets < before.stats(side).p_sets:
                raise SeriesInvariantError(
                    f"p_sets decreases in match {after.match_id}"
                    f" at elapsed_time {after.elapsed_time}"
                )
        same_set = (after.p1.p_sets + after.p2.p_sets) == (
            before.p1.p_sets + before.p2.p_sets
        )
        if same_set and any(
            after.stats(side).p_games < before.stats(side).p_games for side in (1, 2)
        ):
            raise SeriesInvariantError(
                f"p_games decreases within a set in match {after.match_id}"
                f" at elapsed_time {after.elapsed_time}"
            )
