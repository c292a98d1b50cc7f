"""Test trend / seasonal decomposition"""

import numpy as np
import pytest

from tmsquared.decompose import check_kernels, decompose, moving_average, softmax
from tmsquared.errors import ConfigError


def test_softmax():
    """Stable softmax over the last axis"""
    assert np.allclose(softmax([0.0, 0.0]), [0.5, 0.5])
    weights = softmax([[1000.0, 1000.0, 0.0], [1.0, 2.0, 3.0]])
    assert np.allclose(weights.sum(axis=-1), 1.0)
    assert np.allclose(weights[0], [0.5, 0.5, 0.0])


def test_moving_average_edges():
    """Edges replicate the end values"""
    averaged = moving_average([0.0, 0.0, 3.0, 0.0, 0.0], 3)
    assert np.allclose(averaged, [0.0, 1.0, 1.0, 1.0, 0.0])
    assert np.allclose(moving_average(np.full(7, 2.0), 5), 2.0)


def test_moving_average_batched():
    """Rows of a batch are averaged independently"""
    batch = np.random.default_rng(0).normal(size=(3, 20))
    averaged = moving_average(batch, 5)
    for row in range(3):
        assert np.allclose(averaged[row], moving_average(batch[row], 5))


def test_decompose_adds_up():
    """trend + seasonal is the input"""
    x = np.random.default_rng(1).normal(size=50)
    parts = decompose(x, (3, 7), weight_logits=[0.3, -0.2])
    assert np.allclose(parts.trend + parts.seasonal, x)
    assert parts.weights.sum() == pytest.approx(1.0)


def test_linear_series_is_all_trend():
    """Moving averages leave the interior of a line untouched"""
    x = np.arange(40.0)
    parts = decompose(x, (3, 5))
    assert np.allclose(parts.seasonal[2:-2], 0.0)


def test_kernel_checks():
    """Kernels are odd, at least 3 and fit the series"""
    for sizes in [(), (4,), (1,)]:
        with pytest.raises(ConfigError):
            check_kernels(sizes)
    with pytest.raises(ConfigError):
        check_kernels((5,), length=4)
    with pytest.raises(ConfigError):
        decompose(np.zeros(10), (3,), weight_logits=[0.0, 1.0])
