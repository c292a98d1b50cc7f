"""Test the next-point forecaster"""

import numpy as np
import pytest

from tmsquared.errors import ConfigError, StructureError
from tmsquared.forecast import (
    BLOCKS,
    FORECAST_CHUNK,
    ForecastModel,
    ModelConfig,
    attention_operators,
    block_of,
    forecast_batch,
    forecast_components,
    forecast_next,
    init_model,
    loss_and_gradients,
    mlp_forward,
    param_shapes,
    revin_denorm,
    revin_norm,
    wavelet_attention,
)


def _zero_model(config):
    return ForecastModel(
        config, {name: np.zeros(shape) for name, shape in param_shapes(config).items()}
    )


def test_config_validation():
    """Windows must fit the kernels and the attention levels"""
    with pytest.raises(ConfigError):
        ModelConfig(window=3, attention_levels=2, kernel_sizes=(3,))
    with pytest.raises(ConfigError):
        ModelConfig(window=8, kernel_sizes=(9,))
    with pytest.raises(ConfigError):
        ModelConfig(window=8, kernel_sizes=(3,), wavelet="sym5")
    with pytest.raises(ConfigError):
        ModelConfig(hidden=0)


def test_init_model(small_model_config):
    """Seeded initialisation with the declared shapes"""
    first = init_model(small_model_config, seed=3)
    second = init_model(small_model_config, seed=3)
    for name, shape in param_shapes(small_model_config).items():
        assert first.params[name].shape == shape
        assert np.array_equal(first.params[name], second.params[name])
    assert {block_of(name) for name in first.params} == set(BLOCKS)


def test_model_validation(small_model_config):
    """Parameters must match the configuration and be finite"""
    params = dict(init_model(small_model_config).params)
    params["mlp.b1"] = np.zeros(5)
    with pytest.raises(StructureError):
        ForecastModel(small_model_config, params)
    params = dict(init_model(small_model_config).params)
    params["revin.beta"] = np.array([np.nan])
    with pytest.raises(StructureError):
        ForecastModel(small_model_config, params)
    params = dict(init_model(small_model_config).params)
    del params["attention.wo"]
    with pytest.raises(StructureError):
        ForecastModel(small_model_config, params)


def test_revin_round_trip():
    """Denormalising a normalised batch gives it back"""
    x = np.random.default_rng(0).normal(3.0, 2.0, size=(4, 10))
    state = {}
    y = revin_norm(x, gamma=2.0, beta=0.5, state=state)
    assert np.allclose(y.mean(axis=-1), 0.5)
    assert np.allclose(revin_denorm(y, state, gamma=2.0, beta=0.5), x)


def test_revin_constant_window():
    """A flat window normalises to zeros without dividing by zero"""
    state = {}
    assert np.array_equal(revin_norm(np.full((1, 6), 4.0), state=state), np.zeros((1, 6)))
    assert np.allclose(revin_denorm(np.zeros((1, 1)), state), 4.0)


def test_mlp_width_checked(small_model_config):
    """The MLP expects windows of length L"""
    with pytest.raises(StructureError):
        mlp_forward(np.zeros((2, 5)), init_model(small_model_config).params)


def test_zero_model_forecasts_trend_mean(small_model_config):
    """With every parameter zero only the denormalised trend mean is left"""
    model = _zero_model(small_model_config)
    assert forecast_next(model, np.full(8, 2.5)) == pytest.approx(2.5)
    window = np.arange(8.0)
    trend, seasonal = forecast_components(model, window)
    assert seasonal[0] == 0.0
    assert trend[0] == pytest.approx(3.5)


def test_zero_model_has_zero_gradients(small_model_config):
    """Zero windows and targets give a zero loss and zero gradients"""
    model = _zero_model(small_model_config)
    loss, grads = loss_and_gradients(model, np.zeros((3, 8)), np.zeros(3))
    assert loss == 0.0
    assert set(grads) == set(param_shapes(small_model_config))
    assert all(not np.any(grad) for grad in grads.values())


def test_trend_head_is_affine_equivariant(small_model_config):
    """RevIN makes the trend head follow shifts and positive scalings"""
    model = init_model(small_model_config, seed=1)
    windows = np.random.default_rng(2).normal(size=(5, 8))
    trend, _ = forecast_components(model, windows)
    moved, _ = forecast_components(model, 3.0 * windows + 2.0)
    assert np.allclose(moved, 3.0 * trend + 2.0)


def test_batch_matches_single_forecasts(small_model_config):
    """Chunked batches agree with one window at a time"""
    model = init_model(small_model_config, seed=4)
    windows = np.random.default_rng(5).normal(size=(FORECAST_CHUNK + 5, 8))
    batch = forecast_batch(model, windows)
    assert batch.shape == (FORECAST_CHUNK + 5,)
    assert batch[-1] == pytest.approx(forecast_next(model, windows[-1]))
    assert batch[0] == pytest.approx(forecast_next(model, windows[0]))


def test_forecast_shape_errors(small_model_config):
    """Windows of the wrong length and mismatched targets"""
    model = init_model(small_model_config)
    with pytest.raises(StructureError):
        forecast_batch(model, np.zeros((2, 7)))
    with pytest.raises(StructureError):
        forecast_next(model, np.zeros((2, 8)))
    with pytest.raises(StructureError):
        loss_and_gradients(model, np.zeros((2, 8)), np.zeros(3))


def test_identity_attention_without_levels():
    """Zero attention levels attend over the raw window"""
    config = ModelConfig(window=6, hidden=3, key_dim=2, attention_levels=0, kernel_sizes=(3,))
    analysis, synthesis = attention_operators(config)
    assert analysis.shape == (1, 6, 6)
    assert np.array_equal(synthesis[0], np.eye(6))
    assert np.isfinite(forecast_next(init_model(config), np.arange(6.0)))


@pytest.mark.parametrize("seed", range(3))
def test_attention_weights_are_distributions(small_model_config, seed):
    """Every row of every per-scale softmax sums to 1"""
    model = init_model(small_model_config, seed=seed)
    rng = np.random.default_rng(seed)
    for value in model.params.values():
        value += rng.normal(0.0, 1.0, value.shape)
    cache = {}
    wavelet_attention(
        rng.normal(0.0, 3.0, (6, 8)),
        model.params,
        attention_operators(small_model_config),
        cache,
    )
    assert np.all(cache["weights"] >= 0)
    assert np.max(np.abs(cache["weights"].sum(axis=-1) - 1.0)) < 1e-12
