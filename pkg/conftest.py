"""Shared fixtures"""

import numpy as np
import pytest

from tmsquared.config import DATA_PATH
from tmsquared.forecast import ModelConfig
from tmsquared.momentum import IndicatorWeights, load_pressure_matrix
from tmsquared.outcome import load_rankings
from tmsquared.schema import DEFAULT_SCHEMA
from tmsquared.synthetic import generate_synthetic_match


@pytest.fixture
def fake_filesystem(fs):  # pylint:disable=invalid-name
    """Variable name 'fs' causes a pylint warning. Provide a longer name
    acceptable to pylint for use in tests.
    """
    fs.add_real_directory(DATA_PATH)
    yield fs


@pytest.fixture
def match_records():
    """One 120-point synthetic match with a shift at point 60"""
    return generate_synthetic_match(3, 120, [(60, 3.0)])


@pytest.fixture
def uniform_weights():
    """Equal own and opponent weights over the default schema"""
    size = DEFAULT_SCHEMA.n
    return IndicatorWeights(np.full(size, 1.0 / size), np.full(size, 1.0 / size))


@pytest.fixture
def pressure():
    """Shipped pressure matrix"""
    return load_pressure_matrix(DATA_PATH + "/pressure.csv")


@pytest.fixture
def rankings():
    """Shipped rankings"""
    return load_rankings(DATA_PATH + "/rankings.csv")


@pytest.fixture
def small_model_config():
    """Model small enough for finite differences"""
    return ModelConfig(
        window=8, hidden=4, key_dim=2, attention_levels=2, kernel_sizes=(3, 5)
    )


SMALL_CONFIG = """
[paths]
data = {data}
output = {output}

[changepoint]
max_jumps = 4

[momentum]
history = 8

[decompose]
kernels = 3

[train]
window = 8
hidden = 4
key_dim = 2
attention_levels = 1
learning_rate = 0.001
epochs = 1
batch_size = 16

[eval]
repetitions = 1
"""


@pytest.fixture
def small_config(tmp_path):
    """Write a fast run configuration; returns a writer taking the data path"""

    def write(data="", name="config.ini", **paths):
        text = SMALL_CONFIG.format(data=data, output=tmp_path / "runs")
        extra = "".join(f"{key} = {value}\n" for key, value in paths.items())
        text = text.replace("\n[changepoint]", extra + "\n[changepoint]", 1)
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
