"""Indicator weights, pressure matrix and per-player momentum"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pandas as pd

from tmsquared.display import print_warning
from tmsquared.errors import (
    ConfigError,
    InconsistentJudgmentError,
    PressureMatrixError,
    StructureError,
    UnknownPlayerError,
)
from tmsquared.schema import DISTANCE

# Saaty random consistency index by matrix size
RANDOM_INDEX = {
    1: 0.0,
    2: 0.0,
    3: 0.58,
    4: 0.90,
    5: 1.12,
    6: 1.24,
    7: 1.32,
    8: 1.41,
    9: 1.45,
    10: 1.49,
    11: 1.51,
    12: 1.48,
    13: 1.56,
    14: 1.57,
    15: 1.59,
}
MAX_CONSISTENCY_RATIO = 0.1
LOG_FLOOR = 1e-6
OWN = "own"
OPPONENT = "opponent"


@dataclass(frozen=True, eq=False)
class AhpPairwiseMatrix:
    """Positive reciprocal matrix of pairwise importance judgments"""

    values: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ConfigError("AHP matrix must be square")
        if self.labels and len(self.labels) != len(values):
            raise ConfigError("one AHP label per row is required")
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise ConfigError("AHP judgments must be positive and finite")
        if np.any(np.diag(values) != 1.0):
            raise ConfigError("AHP matrix diagonal must be 1")
        if np.any(np.abs(values * values.T - 1.0) >= 1e-9):
            raise ConfigError("AHP matrix must be reciprocal (A_ij * A_ji = 1)")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self):
        """Number of compared items"""
        return len(self.values)


def ahp_weights(matrix, tolerance=1e-10, max_iterations=1000):
    """Principal eigenvector weights (sum 1) and consistency ratio"""
    if not isinstance(matrix, AhpPairwiseMatrix):
        matrix = AhpPairwiseMatrix(matrix)
    values = matrix.values
    size = matrix.n
    weights = np.full(size, 1.0 / size)
    for _ in range(max_iterations):
        updated = values @ weights
        updated /= updated.sum()
        converged = np.max(np.abs(updated - weights)) < tolerance
        weights = updated
        if converged:
            break
    lambda_max = float(np.mean((values @ weights) / weights))
    if size <= 2:
        ratio = 0.0
    else:
        index = RANDOM_INDEX.get(size, RANDOM_INDEX[15])
        ratio = max(0.0, (lambda_max - size) / (size - 1)) / index
    if ratio > MAX_CONSISTENCY_RATIO:
        raise InconsistentJudgmentError(ratio)
    return weights, ratio


def load_ahp_matrix(path):
    """Read a labelled AHP matrix; cells may be fractions such as 1/3"""
    table = pd.read_csv(path, index_col=0, dtype=str)
    if list(table.index) != list(table.columns):
        raise ConfigError(f"{path}: row and column labels differ")
    try:
        values = [[float(Fraction(cell.strip())) for cell in row] for row in table.values]
    except (ValueError, ZeroDivisionError, AttributeError) as exception:
        raise ConfigError(f"{path}: unreadable judgment ({exception})") from exception
    return AhpPairwiseMatrix(values, tuple(table.index))


@dataclass(frozen=True, eq=False)
class IndicatorWeights:
    """Own (g) and opponent (g_bar) weights, limiting factor d, exponents k"""

    g: np.ndarray
    g_bar: np.ndarray
    d: float = 1.0
    k: np.ndarray = None
    cr_own: float = 0.0
    cr_opponent: float = 0.0

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        g_bar = np.array(self.g_bar, dtype=float)
        k = np.ones(len(g)) if self.k is None else np.array(self.k, dtype=float)
        if g.shape != g_bar.shape or g.shape != k.shape or g.ndim != 1:
            raise ConfigError("g, g_bar and k need one entry per feature")
        for name, weights in (("g", g), ("g_bar", g_bar)):
            if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
                raise ConfigError(f"{name} must be non-negative and sum to 1")
        if not 0 < self.d <= 1:
            raise ConfigError(f"limiting factor d must be in (0, 1], got {self.d}")
        if not np.all(np.isin(k, (1.0, 2.0))):
            raise ConfigError("exponents k must be 1 or 2")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "g_bar", g_bar)
        object.__setattr__(self, "k", k)

    @property
    def n(self):
        """Number of momentum features"""
        return len(self.g)

    def side_weights(self, side):
        """g for the own side, g_bar for the opponent side"""
        if side == OWN:
            return self.g
        if side == OPPONENT:
            return self.g_bar
        raise ConfigError(f"side must be {OWN!r} or {OPPONENT!r}, got {side!r}")


def default_exponents(schema):
    """2 for distance features, 1 for everything else"""
    return np.array([2.0 if kind == DISTANCE else 1.0 for kind in schema.kinds()])


def indicator_weights(own, opponent, schema, d=1.0):
    """IndicatorWeights from the own and opponent AHP matrices"""
    for matrix in (own, opponent):
        if matrix.n != schema.n:
            raise ConfigError(
                f"AHP matrix has {matrix.n} rows, schema has {schema.n} features"
            )
        if matrix.labels and list(matrix.labels) != schema.names:
            raise ConfigError("AHP matrix labels must follow the schema order")
    g, cr_own = ahp_weights(own)
    g_bar, cr_opponent = ahp_weights(opponent)
    return IndicatorWeights(g, g_bar, d, default_exponents(schema), cr_own, cr_opponent)


def weights_report(weights, schema):
    """JSON-able summary of the indicator weights"""
    return {
        "features": schema.names,
        "g": [float(value) for value in weights.g],
        "g_bar": [float(value) for value in weights.g_bar],
        "k": [int(value) for value in weights.k],
        "d": weights.d,
        "cr_own": weights.cr_own,
        "cr_opponent": weights.cr_opponent,
    }


def indicator_weight(z, t, r, weights, side=OWN):
    """Time-weighted value d * g_z * k_z * ln(r) + 1 / (t + 1), r clamped at 1e-6"""
    if t < 0:
        raise ConfigError(f"time index must be >= 0, got {t}")
    g = weights.side_weights(side)[z]
    return weights.d * g * weights.k[z] * math.log(max(r, LOG_FLOOR)) + 1.0 / (t + 1)


def indicator_weight_matrix(raw, weights, side=OWN, times=None):
    """indicator_weight for every (t, z) of a T x n raw feature matrix"""
    raw = np.asarray(raw, dtype=float)
    if times is None:
        times = np.arange(len(raw))
    g = weights.side_weights(side)
    log_term = weights.d * g * weights.k * np.log(np.maximum(raw, LOG_FLOOR))
    return log_term + 1.0 / (np.asarray(times, dtype=float)[:, None] + 1.0)


@dataclass(frozen=True, eq=False)
class PressureMatrix:
    """Pressure m_ij that player i feels against player j"""

    values: np.ndarray
    players: tuple

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        players = tuple(self.players)
        if values.ndim != 2 or values.shape != (len(players), len(players)):
            raise PressureMatrixError("pressure matrix must be square, one row per player")
        if len(set(players)) != len(players):
            raise PressureMatrixError("duplicate player in pressure matrix")
        if not np.all(np.isfinite(values)):
            raise PressureMatrixError("pressure matrix has missing pairs")
        if np.any(values <= 0):
            raise PressureMatrixError("pressure values must be positive")
        if np.any(np.diag(values) != 1.0):
            raise PressureMatrixError("pressure matrix diagonal must be 1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "players", players)

    def __contains__(self, player):
        return player in self.players

    def pressure(self, i, j, strict=True):
        """m_ij; unknown pairs raise, or give 1.0 with a warning when not strict"""
        if i in self.players and j in self.players:
            return float(self.values[self.players.index(i), self.players.index(j)])
        if strict:
            missing = i if i not in self.players else j
            raise UnknownPlayerError(f"{missing} is not in the pressure matrix")
        print_warning(
            f"no pressure value for {i} against {j}, using 1.0", once_key=(i, j)
        )
        return 1.0

    def scaled(self, factor):
        """Every pair scaled by a positive factor, diagonal kept at 1"""
        values = self.values * factor
        np.fill_diagonal(values, 1.0)
        return PressureMatrix(values, self.players)


def load_pressure_matrix(path):
    """Read a labelled player x player pressure matrix"""
    table = pd.read_csv(path, index_col=0)
    if list(table.index) != list(table.columns):
        raise PressureMatrixError(f"{path}: row and column players differ")
    try:
        values = table.to_numpy(dtype=float)
    except ValueError as exception:
        raise PressureMatrixError(f"{path}: non-numeric pressure value") from exception
    return PressureMatrix(values, tuple(table.index))


@dataclass(frozen=True, eq=False)
class MomentumSeries:
    """Momentum M_y(t) of one player against one opponent"""

    values: np.ndarray
    player: str
    opponent: str

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or not np.all(np.isfinite(values)):
            raise StructureError("momentum must be a finite vector")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


def momentum(
    xi,
    xj,
    weights,
    pressure,
    i,
    j,
    raw_i=None,
    raw_j=None,
    times=None,
    strict=True,
):
    """M_i(t) = m_ij * sum_z (delta_z(t) X_iz(t) - delta_bar_z(t) X_jz(t))

    delta uses player i's raw values and g, delta_bar player j's raw values
    and g_bar; raw values default to the reconstructed ones.
    """
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.ndim != 2 or xi.shape != xj.shape:
        raise StructureError(f"feature shapes differ: {xi.shape} and {xj.shape}")
    if xi.shape[1] != weights.n:
        raise StructureError(
            f"{xi.shape[1]} feature columns for {weights.n} indicator weights"
        )
    raw_i = xi if raw_i is None else np.asarray(raw_i, dtype=float)
    raw_j = xj if raw_j is None else np.asarray(raw_j, dtype=float)
    if raw_i.shape != xi.shape or raw_j.shape != xj.shape:
        raise StructureError("raw and reconstructed features differ in shape")
    m_ij = (
        pressure.pressure(i, j, strict)
        if isinstance(pressure, PressureMatrix)
        else float(pressure)
    )
    delta = indicator_weight_matrix(raw_i, weights, OWN, times)
    delta_bar = indicator_weight_matrix(raw_j, weights, OPPONENT, times)
    values = m_ij * np.sum(delta * xi - delta_bar * xj, axis=1)
    return MomentumSeries(values, i, j)
