"""Test indicator weights, pressure and momentum"""

import math

import numpy as np
import pytest

from tmsquared.config import DATA_PATH
from tmsquared.errors import (
    ConfigError,
    InconsistentJudgmentError,
    PressureMatrixError,
    StructureError,
    UnknownPlayerError,
)
from tmsquared.momentum import (
    OPPONENT,
    AhpPairwiseMatrix,
    IndicatorWeights,
    MomentumSeries,
    PressureMatrix,
    ahp_weights,
    indicator_weight,
    indicator_weight_matrix,
    indicator_weights,
    load_ahp_matrix,
    momentum,
    weights_report,
)
from tmsquared.schema import DEFAULT_SCHEMA


def _consistent(priorities):
    priorities = np.asarray(priorities, dtype=float)
    return priorities[:, None] / priorities[None, :]


def test_ahp_consistent_matrix():
    """A consistent matrix gives back its priorities"""
    weights, ratio = ahp_weights(_consistent([1, 2, 4]))
    assert np.allclose(weights, [1 / 7, 2 / 7, 4 / 7])
    assert ratio == pytest.approx(0.0, abs=1e-9)


def test_ahp_inconsistent_matrix():
    """Cyclic judgments fail the consistency ratio"""
    cycle = [[1, 9, 1 / 9], [1 / 9, 1, 9], [9, 1 / 9, 1]]
    with pytest.raises(InconsistentJudgmentError) as error:
        ahp_weights(cycle)
    assert error.value.ratio > 0.1


def test_ahp_matrix_validation():
    """Reciprocity, unit diagonal and positivity"""
    with pytest.raises(ConfigError):
        AhpPairwiseMatrix([[1, 2], [2, 1]])
    with pytest.raises(ConfigError):
        AhpPairwiseMatrix([[2, 1], [1, 1]])
    with pytest.raises(ConfigError):
        AhpPairwiseMatrix([[1, -1], [-1, 1]])
    with pytest.raises(ConfigError):
        AhpPairwiseMatrix([[1, 2, 3]])


def test_shipped_ahp_matrices():
    """Shipped judgments are consistent and follow the schema"""
    own = load_ahp_matrix(DATA_PATH + "/ahp_own.csv")
    opponent = load_ahp_matrix(DATA_PATH + "/ahp_opponent.csv")
    assert list(own.labels) == DEFAULT_SCHEMA.names
    weights = indicator_weights(own, opponent, DEFAULT_SCHEMA)
    assert weights.g.sum() == pytest.approx(1.0)
    assert weights.g[9] == pytest.approx(9 / 27)
    assert weights.g_bar[4] == pytest.approx(1 / 27)
    assert list(weights.k) == [1, 1, 1, 1, 1, 1, 1, 1, 2, 1]
    assert weights.cr_own == pytest.approx(0.0, abs=1e-6)


def test_load_ahp_fractions(fake_filesystem):
    """Cells may be written as fractions"""
    fake_filesystem.create_file(
        "ahp.csv", contents="feature,a,b\na,1,3\nb,1/3,1\n"
    )
    matrix = load_ahp_matrix("ahp.csv")
    assert matrix.labels == ("a", "b")
    assert matrix.values[1, 0] == pytest.approx(1 / 3)


def test_indicator_weights_size_mismatch():
    """AHP matrices must have one row per schema feature"""
    matrix = AhpPairwiseMatrix(_consistent([1, 2, 4]))
    with pytest.raises(ConfigError):
        indicator_weights(matrix, matrix, DEFAULT_SCHEMA)


def test_indicator_weights_validation():
    """Weights sum to 1, d in (0, 1], k in {1, 2}"""
    with pytest.raises(ConfigError):
        IndicatorWeights([0.5, 0.6], [0.5, 0.5])
    with pytest.raises(ConfigError):
        IndicatorWeights([0.5, 0.5], [0.5, 0.5], d=0.0)
    with pytest.raises(ConfigError):
        IndicatorWeights([0.5, 0.5], [0.5, 0.5], k=[1, 3])


def test_indicator_weight(uniform_weights):
    """d g k ln(r) + 1 / (t + 1), with r clamped away from 0"""
    assert indicator_weight(0, 0, math.e, uniform_weights) == pytest.approx(1.1)
    assert indicator_weight(0, 3, 1.0, uniform_weights) == pytest.approx(0.25)
    clamped = 0.1 * math.log(1e-6) + 1.0
    assert indicator_weight(0, 0, 0.0, uniform_weights) == pytest.approx(clamped)
    assert indicator_weight(0, 0, -5.0, uniform_weights) == pytest.approx(clamped)
    with pytest.raises(ConfigError):
        indicator_weight(0, -1, 1.0, uniform_weights)


def test_indicator_weight_matrix(uniform_weights):
    """Vectorised form agrees with the scalar one"""
    raw = np.random.default_rng(0).uniform(0.0, 5.0, size=(6, DEFAULT_SCHEMA.n))
    matrix = indicator_weight_matrix(raw, uniform_weights, OPPONENT)
    for t in range(6):
        for z in range(DEFAULT_SCHEMA.n):
            expected = indicator_weight(z, t, raw[t, z], uniform_weights, OPPONENT)
            assert matrix[t, z] == pytest.approx(expected)


def test_pressure_matrix(pressure, capsys):
    """Lookup, strict failure and the lenient default"""
    assert pressure.pressure("Alexander Zverev", "Carlos Alcaraz") == 4.78
    assert pressure.pressure("Carlos Alcaraz", "Alexander Zverev") == 0.21
    with pytest.raises(UnknownPlayerError):
        pressure.pressure("Alexander Zverev", "Nobody")
    assert pressure.pressure("Nobody", "Carlos Alcaraz", strict=False) == 1.0
    assert "Warning" in capsys.readouterr().out
    assert pressure.scaled(2.0).pressure("Alexander Zverev", "Carlos Alcaraz") == 9.56


def test_pressure_matrix_validation():
    """Square, complete, positive, unit diagonal"""
    with pytest.raises(PressureMatrixError):
        PressureMatrix([[1, 2]], ("a",))
    with pytest.raises(PressureMatrixError):
        PressureMatrix([[1, np.nan], [1, 1]], ("a", "b"))
    with pytest.raises(PressureMatrixError):
        PressureMatrix([[2, 1], [1, 1]], ("a", "b"))
    with pytest.raises(PressureMatrixError):
        PressureMatrix([[1, 0], [1, 1]], ("a", "b"))


def test_momentum_single_feature():
    """Hand computed momentum of a one-feature schema"""
    weights = IndicatorWeights([1.0], [1.0])
    xi = np.array([[math.e], [1.0]])
    xj = np.array([[1.0], [math.e]])
    series = momentum(xi, xj, weights, 2.0, "a", "b")
    assert series.player == "a" and series.opponent == "b"
    assert series.values[0] == pytest.approx(2.0 * (2.0 * math.e - 1.0))
    assert series.values[1] == pytest.approx(2.0 * (0.5 - 1.5 * math.e))


def test_momentum_uses_raw_values_for_weights():
    """Indicator weights come from the raw features, not the reconstructed ones"""
    weights = IndicatorWeights([1.0], [1.0])
    x = np.ones((2, 1))
    raw = np.full((2, 1), math.e)
    series = momentum(x, np.zeros((2, 1)), weights, 1.0, "a", "b", raw_i=raw)
    assert series.values == pytest.approx([2.0, 1.5])


def test_momentum_pressure_lookup(pressure, uniform_weights):
    """m_ij scales the whole series"""
    x = np.random.default_rng(1).uniform(0.5, 2.0, size=(5, DEFAULT_SCHEMA.n))
    y = np.random.default_rng(2).uniform(0.5, 2.0, size=(5, DEFAULT_SCHEMA.n))
    scaled = momentum(x, y, uniform_weights, pressure, "Alexander Zverev", "Carlos Alcaraz")
    plain = momentum(x, y, uniform_weights, 1.0, "Alexander Zverev", "Carlos Alcaraz")
    assert np.allclose(scaled.values, 4.78 * plain.values)


def test_momentum_shape_errors(uniform_weights):
    """Feature matrices must match each other and the weights"""
    with pytest.raises(StructureError):
        momentum(np.ones((3, 10)), np.ones((4, 10)), uniform_weights, 1.0, "a", "b")
    with pytest.raises(StructureError):
        momentum(np.ones((3, 4)), np.ones((3, 4)), uniform_weights, 1.0, "a", "b")
    with pytest.raises(StructureError):
        MomentumSeries([1.0, np.inf], "a", "b")


def test_weights_report(uniform_weights):
    """JSON-able weights summary"""
    report = weights_report(uniform_weights, DEFAULT_SCHEMA)
    assert report["features"] == DEFAULT_SCHEMA.names
    assert report["k"] == [1] * 10
    assert report["d"] == 1.0


def test_momentum_antisymmetric_for_equal_weights():
    """Equal own and opponent weights with one pressure value: M_i = -M_j"""
    rng = np.random.default_rng(11)
    g = rng.dirichlet(np.ones(3))
    weights = IndicatorWeights(g, g, 0.7, [1.0, 2.0, 1.0])
    xi = rng.uniform(0.0, 5.0, (20, 3))
    xj = rng.uniform(0.0, 5.0, (20, 3))
    first = momentum(xi, xj, weights, 1.3, "a", "b")
    second = momentum(xj, xi, weights, 1.3, "b", "a")
    assert np.array_equal(first.values, -second.values)


def test_momentum_decays_in_time():
    """Raw values of 1 and fixed features leave only the 1 / (t + 1) term"""
    weights = IndicatorWeights([0.5, 0.5], [0.2, 0.8])
    xi = np.tile([3.0, 1.0], (30, 1))
    xj = np.tile([1.0, 0.5], (30, 1))
    ones = np.ones((30, 2))
    series = momentum(xi, xj, weights, 2.0, "a", "b", raw_i=ones, raw_j=ones)
    magnitude = np.abs(series.values)
    assert np.all(np.diff(magnitude) <= 0)
    assert series.values[0] == pytest.approx(2.0 * 2.5)


def test_momentum_scales_with_pressure():
    """Pressure c * m gives c * M"""
    rng = np.random.default_rng(12)
    weights = IndicatorWeights([0.25, 0.75], [0.6, 0.4])
    xi = rng.uniform(0.0, 3.0, (15, 2))
    xj = rng.uniform(0.0, 3.0, (15, 2))
    base = momentum(xi, xj, weights, 0.8, "a", "b")
    scaled = momentum(xi, xj, weights, 0.8 * 3.5, "a", "b")
    assert np.allclose(scaled.values, 3.5 * base.values, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_ahp_weights_follow_a_relabelling(seed):
    """Permuting rows and columns together permutes the weights"""
    values = load_ahp_matrix(DATA_PATH + "/ahp_own.csv").values
    order = np.random.default_rng(seed).permutation(len(values))
    weights, ratio = ahp_weights(values)
    permuted, permuted_ratio = ahp_weights(values[order][:, order])
    assert np.allclose(permuted, weights[order], atol=1e-9)
    assert permuted_ratio == pytest.approx(ratio, abs=1e-9)
