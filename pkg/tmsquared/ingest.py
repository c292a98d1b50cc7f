"""Reading and writing point-by-point match files"""

import math

import numpy as np
import pandas as pd

from tmsquared.errors import (
    EmptyInputError,
    ParseError,
    SchemaError,
    SeriesInvariantError,
)
from tmsquared.records import MatchPointRecord, PlayerStats, check_counters
from tmsquared.schema import BASE_COLUMNS, DEFAULT_SCHEMA
from tmsquared.series import MultivariateSeries


def parse_elapsed(text):
    """Parse "H:MM:SS" (or plain seconds) into seconds"""
    text = str(text).strip()
    if ":" not in text:
        return float(text)
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected H:MM:SS, got {text!r}")
    hours, minutes, seconds = int(parts[0]), int(parts[1]), float(parts[2])
    if not 0 <= minutes < 60 or not 0 <= seconds < 60:
        raise ValueError(f"expected H:MM:SS, got {text!r}")
    return hours * 3600.0 + minutes * 60.0 + seconds


def format_elapsed(seconds):
    """Format seconds as H:MM:SS when integral, else as plain seconds"""
    if float(seconds).is_integer() and seconds >= 0:
        total = int(seconds)
        return f"{total // 3600}:{total % 3600 // 60:02d}:{total % 60:02d}"
    return repr(float(seconds))


def _number(text, column, row):
    try:
        value = float(text)
    except ValueError as exception:
        raise ParseError(f"non-numeric value {text!r} in {column}", row) from exception
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {text!r} in {column}", row)
    return value


def _player_number(text, column, row):
    value = _number(text, column, row)
    if value not in (1.0, 2.0):
        raise ParseError(f"{column} must be 1 or 2, got {text!r}", row)
    return int(value)


def ingest_csv(path, schema=DEFAULT_SCHEMA):
    """Read a match file into records, one per data row, in file order"""
    table = pd.read_csv(path, dtype=str, keep_default_na=False)
    present = set(table.columns)
    for feature in [None] + list(schema.features):
        columns = BASE_COLUMNS if feature is None else feature.columns()
        optional = feature is not None and feature.optional
        for column in columns:
            if column not in present and not optional:
                raise SchemaError(f"missing column {column}")

    player_fields = [
        feature.name
        for feature in schema.features
        if not feature.shared and feature.columns()[0] in present
    ]
    records = []
    for row, cells in enumerate(table.to_dict("records")):
        try:
            elapsed = parse_elapsed(cells["elapsed_time"])
        except ValueError as exception:
            raise ParseError(str(exception), row) from exception
        stats = []
        for suffix in ("_p1", "_p2"):
            values = {
                name: _number(cells[name + suffix], name + suffix, row)
                for name in player_fields
            }
            try:
                stats.append(PlayerStats(**values))
            except SeriesInvariantError as exception:
                raise ParseError(str(exception), row) from exception
        records.append(
            MatchPointRecord(
                match_id=cells["match_id"],
                player1=cells["player1"],
                player2=cells["player2"],
                elapsed_time=elapsed,
                server=_player_number(cells["server"], "server", row),
                point_victor=_player_number(cells["point_victor"], "point_victor", row),
                p1=stats[0],
                p2=stats[1],
            )
        )
    check_counters(records)
    return records


def write_csv(records, path, schema=DEFAULT_SCHEMA):
    """Write records in the match file format read by ingest_csv"""
    rows = []
    for record in records:
        row = {
            "match_id": record.match_id,
            "player1": record.player1,
            "player2": record.player2,
            "elapsed_time": format_elapsed(record.elapsed_time),
            "server": str(record.server),
            "point_victor": str(record.point_victor),
        }
        for feature in schema.features:
            if feature.shared:
                continue
            row[feature.name + "_p1"] = repr(getattr(record.p1, feature.name))
            row[feature.name + "_p2"] = repr(getattr(record.p2, feature.name))
        rows.append(row)
    pd.DataFrame(rows, columns=schema.csv_columns()).to_csv(path, index=False)


def group_matches(records):
    """Split records by match_id, keeping file order"""
    matches = {}
    for record in records:
        matches.setdefault(record.match_id, []).append(record)
    return matches


def to_series(records, player, schema=DEFAULT_SCHEMA):
    """Per-player T x D feature matrix of one match"""
    if not records:
        raise EmptyInputError("no records to build a series from")
    match_ids = {record.match_id for record in records}
    if len(match_ids) != 1:
        raise SeriesInvariantError(
            f"records span several matches: {sorted(match_ids)}"
        )
    side = records[0].side(player)
    values = np.array(
        [[record.feature(name, side) for name in schema.names] for record in records]
    )
    time_index = [record.elapsed_time for record in records]
    return MultivariateSeries(values, time_index, tuple(schema.names))
