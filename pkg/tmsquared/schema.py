"""Feature schema shared by ingestion, momentum and baselines"""

from dataclasses import dataclass

from tmsquared.errors import SchemaError

INDICATOR = "indicator"
COUNT = "count"
DISTANCE = "distance"
REAL = "real"

# Columns every match file carries, whatever the schema
BASE_COLUMNS = (
    "match_id",
    "player1",
    "player2",
    "elapsed_time",
    "server",
    "point_victor",
)

SHARED_FIELDS = ("server", "point_victor")
PLAYER_FIELDS = (
    "p_sets",
    "p_games",
    "p_ace",
    "p_double_fault",
    "p_break_pt_missed",
    "p_break_pt_won",
    "p_distance_run",
    "psychological_factor",
)


@dataclass(frozen=True)
class Feature:
    """One momentum feature"""

    name: str
    kind: str = INDICATOR
    optional: bool = False

    @property
    def shared(self):
        """Shared columns hold one value per point (player number 1 or 2)"""
        return self.name in SHARED_FIELDS

    def columns(self):
        """CSV columns holding this feature"""
        if self.shared:
            return [self.name]
        return [self.name + "_p1", self.name + "_p2"]


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered momentum features"""

    features: tuple

    def __post_init__(self):
        features = tuple(self.features)
        names = [feature.name for feature in features]
        if not names:
            raise SchemaError("schema needs at least one feature")
        if len(set(names)) != len(names):
            raise SchemaError("duplicate feature in schema")
        for name in names:
            if name not in SHARED_FIELDS + PLAYER_FIELDS:
                raise SchemaError(f"{name} is not a match point record field")
        object.__setattr__(self, "features", features)

    @property
    def names(self):
        """Feature names in schema order"""
        return [feature.name for feature in self.features]

    @property
    def n(self):
        """Number of per-player momentum features"""
        return len(self.features)

    def kinds(self):
        """Feature kinds in schema order"""
        return [feature.kind for feature in self.features]

    def csv_columns(self):
        """Header of a match file for this schema"""
        columns = list(BASE_COLUMNS)
        for feature in self.features:
            if not feature.shared:
                columns.extend(feature.columns())
        return columns

    def subset(self, names):
        """Schema restricted to the given names, in the given order"""
        by_name = {feature.name: feature for feature in self.features}
        try:
            return FeatureSchema(tuple(by_name[name] for name in names))
        except KeyError as exception:
            raise SchemaError(f"unknown feature {exception.args[0]}") from exception


DEFAULT_SCHEMA = FeatureSchema(
    (
        Feature("server"),
        Feature("point_victor"),
        Feature("p_sets", COUNT),
        Feature("p_games", COUNT),
        Feature("p_ace"),
        Feature("p_double_fault"),
        Feature("p_break_pt_missed"),
        Feature("p_break_pt_won"),
        Feature("p_distance_run", DISTANCE),
        Feature("psychological_factor", REAL, optional=True),
    )
)
