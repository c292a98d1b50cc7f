"""Next-point momentum forecaster

Trend head: RevIN around a three-layer MLP. Seasonal head: attention over
the seasonal window scaled to unit deviation, whose queries, keys and values
are MODWT-transformed per scale and recombined by the inverse transform; its
output is scaled back by the same deviation. The forecast is the sum of both
heads. Everything is batched over (B, L) windows and differentiated by hand.
"""

import math
from dataclasses import dataclass

import numpy as np

from tmsquared.decompose import DEFAULT_KERNELS, candidate_trends, check_kernels, softmax
from tmsquared.errors import ConfigError, StructureError
from tmsquared.modwt import get_filter, transform_matrices

REVIN_EPS = 1e-5
# Windows per forward pass; attention holds (chunk, J + 1, L, L) arrays
FORECAST_CHUNK = 32

MLP = "mlp"
ATTENTION = "attention"
DECOMPOSE = "decompose"
REVIN = "revin"
BLOCKS = (MLP, ATTENTION, DECOMPOSE, REVIN)


@dataclass(frozen=True)
class ModelConfig:
    """Architecture of a forecast model"""

    window: int = 400
    hidden: int = 64
    key_dim: int = 8
    attention_levels: int = 2
    kernel_sizes: tuple = DEFAULT_KERNELS
    wavelet: str = "haar"

    def __post_init__(self):
        object.__setattr__(self, "kernel_sizes", tuple(self.kernel_sizes))
        if self.window < 1 or self.hidden < 1 or self.key_dim < 1:
            raise ConfigError("window, hidden and key_dim must be >= 1")
        if self.attention_levels < 0:
            raise ConfigError("attention_levels must be >= 0")
        if self.attention_levels and self.window < 2**self.attention_levels:
            raise ConfigError(
                f"window {self.window} is shorter than 2^{self.attention_levels}"
            )
        check_kernels(self.kernel_sizes, self.window)
        get_filter(self.wavelet)


def param_shapes(config):
    """Parameter name -> shape"""
    window, hidden, key_dim = config.window, config.hidden, config.key_dim
    return {
        "mlp.w1": (window, hidden),
        "mlp.b1": (hidden,),
        "mlp.w2": (hidden, hidden),
        "mlp.b2": (hidden,),
        "mlp.w3": (hidden, 1),
        "mlp.b3": (1,),
        "attention.wq": (key_dim,),
        "attention.bq": (key_dim,),
        "attention.wk": (key_dim,),
        "attention.bk": (key_dim,),
        "attention.wv": (key_dim,),
        "attention.bv": (key_dim,),
        "attention.wo": (window, key_dim),
        "decompose.logits": (len(config.kernel_sizes),),
        "revin.gamma": (1,),
        "revin.beta": (1,),
    }


def block_of(name):
    """Parameter block (mlp, attention, decompose, revin) of a parameter"""
    return name.split(".", 1)[0]


class ForecastModel:
    """Parameters of both heads plus the configuration that shaped them"""

    def __init__(self, config, params, train_config=None):
        self.config = config
        self.train_config = train_config
        shapes = param_shapes(config)
        if set(params) != set(shapes):
            missing = sorted(set(shapes) ^ set(params))
            raise StructureError(f"parameter blocks do not match: {missing}")
        self.params = {}
        for name, shape in shapes.items():
            value = np.array(params[name], dtype=float)
            if value.shape != shape:
                raise StructureError(f"{name} has shape {value.shape}, expected {shape}")
            if not np.all(np.isfinite(value)):
                raise StructureError(f"{name} has non-finite values")
            self.params[name] = value

    def copy(self, params=None, train_config=None):
        """Same architecture, other parameters or training snapshot"""
        return ForecastModel(
            self.config,
            {name: value.copy() for name, value in (params or self.params).items()},
            train_config if train_config is not None else self.train_config,
        )


def init_model(config=ModelConfig(), seed=0):
    """Seeded initial model: He init for hidden layers, small output layers"""
    rng = np.random.default_rng(seed)
    shapes = param_shapes(config)
    params = {name: np.zeros(shape) for name, shape in shapes.items()}
    params["mlp.w1"] = rng.normal(0.0, math.sqrt(2.0 / config.window), shapes["mlp.w1"])
    params["mlp.w2"] = rng.normal(0.0, math.sqrt(2.0 / config.hidden), shapes["mlp.w2"])
    params["mlp.w3"] = rng.normal(0.0, 0.1 / math.sqrt(config.hidden), shapes["mlp.w3"])
    for name in ("attention.wq", "attention.wk", "attention.wv"):
        params[name] = rng.normal(0.0, 1.0, shapes[name])
    params["attention.wo"] = rng.normal(
        0.0, 0.1 / math.sqrt(config.window * config.key_dim), shapes["attention.wo"]
    )
    params["revin.gamma"] = np.ones(1)
    return ForecastModel(config, params)


def _check_windows(windows, length):
    windows = np.atleast_2d(np.asarray(windows, dtype=float))
    if windows.ndim != 2 or windows.shape[1] != length:
        raise StructureError(
            f"windows have shape {windows.shape}, expected (B, {length})"
        )
    return windows


def _guarded_gamma(gamma):
    return np.where(np.abs(gamma) >= REVIN_EPS**2, gamma, REVIN_EPS**2)


def revin_norm(x, gamma=1.0, beta=0.0, state=None):
    """(x - mean) / max(std, eps) * gamma + beta over the last axis

    Mean, guarded std and the raw std are stored in `state` when a dict is
    given, for revin_denorm.
    """
    x = np.asarray(x, dtype=float)
    mean = x.mean(axis=-1, keepdims=True)
    std = x.std(axis=-1, keepdims=True)
    scale = np.maximum(std, REVIN_EPS)
    normalized = (x - mean) / scale
    if state is not None:
        state.update(mean=mean, std=std, scale=scale, normalized=normalized)
    return normalized * gamma + beta


def revin_denorm(y, state, gamma=1.0, beta=0.0):
    """Inverse of revin_norm for the stored state"""
    return (np.asarray(y, dtype=float) - beta) / _guarded_gamma(gamma) * state[
        "scale"
    ] + state["mean"]


def _relu(x):
    return np.maximum(x, 0.0)


def mlp_forward(x, params, cache=None):
    """affine -> ReLU -> affine -> ReLU -> affine, one output per row"""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != params["mlp.w1"].shape[0]:
        raise StructureError(
            f"MLP expects windows of {params['mlp.w1'].shape[0]}, got {x.shape[1]}"
        )
    a1 = x @ params["mlp.w1"] + params["mlp.b1"]
    h1 = _relu(a1)
    a2 = h1 @ params["mlp.w2"] + params["mlp.b2"]
    h2 = _relu(a2)
    out = h2 @ params["mlp.w3"] + params["mlp.b3"]
    if cache is not None:
        cache.update(x=x, a1=a1, h1=h1, a2=a2, h2=h2)
    return out


def attention_operators(config):
    """Analysis / synthesis operators of the attention transform, (S, L, L)"""
    if config.attention_levels == 0:
        identity = np.eye(config.window)[None]
        return identity, identity
    return transform_matrices(
        get_filter(config.wavelet), config.window, config.attention_levels
    )


def wavelet_attention(xs, params, operators, cache=None):
    """Attention over per-scale wavelet coefficients of q, k and v"""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    analysis, synthesis = operators
    key_dim = params["attention.wq"].shape[0]
    projected = {}
    transformed = {}
    for name in ("q", "k", "v"):
        projected[name] = (
            xs[..., None] * params["attention.w" + name] + params["attention.b" + name]
        )
        transformed[name] = np.einsum("slm,bmd->bsld", analysis, projected[name])
    scores = (
        np.einsum("bsld,bsmd->bslm", transformed["q"], transformed["k"])
        / math.sqrt(key_dim)
    )
    weights = softmax(scores)
    per_scale = np.einsum("bslm,bsmd->bsld", weights, transformed["v"])
    combined = np.einsum("slm,bsmd->bld", synthesis, per_scale)
    out = np.einsum("bld,ld->b", combined, params["attention.wo"])
    if cache is not None:
        cache.update(
            xs=xs,
            transformed=transformed,
            weights=weights,
            combined=combined,
        )
    return out


def _forward(model, windows, operators):
    params = model.params
    cache = {"windows": windows}
    candidates = candidate_trends(windows, model.config.kernel_sizes)
    mix = softmax(params["decompose.logits"])
    trend = np.tensordot(mix, candidates, axes=1)
    seasonal = windows - trend
    cache.update(candidates=candidates, mix=mix, trend=trend)

    revin = {}
    normalized = revin_norm(trend, params["revin.gamma"], params["revin.beta"], revin)
    mlp = {}
    raw = mlp_forward(normalized, params, mlp)
    trend_out = revin_denorm(raw, revin, params["revin.gamma"], params["revin.beta"])
    cache.update(revin=revin, mlp=mlp, raw=raw)

    seasonal_state = {}
    normalized_seasonal = revin_norm(seasonal, state=seasonal_state)
    attention = {}
    attended = wavelet_attention(normalized_seasonal, params, operators, attention)
    # rescaled, not re-centred: the trend head carries the level
    seasonal_out = attended * seasonal_state["scale"][:, 0]
    cache.update(attention=attention, seasonal=seasonal_state, attended=attended)
    return trend_out[:, 0], seasonal_out, cache


def forecast_components(model, windows):
    """(trend head, seasonal head) forecasts of a batch of windows"""
    windows = _check_windows(windows, model.config.window)
    trend, seasonal, _ = _forward(model, windows, attention_operators(model.config))
    return trend, seasonal


def forecast_batch(model, windows):
    """Next-point forecast of every window: trend head + seasonal head"""
    windows = _check_windows(windows, model.config.window)
    forecasts = []
    for start in range(0, len(windows), FORECAST_CHUNK):
        trend, seasonal = forecast_components(
            model, windows[start : start + FORECAST_CHUNK]
        )
        forecasts.append(trend + seasonal)
    return np.concatenate(forecasts)


def forecast_next(model, window):
    """Next-point forecast of one window of length L"""
    window = np.asarray(window, dtype=float)
    if window.ndim != 1:
        raise StructureError("forecast_next takes a single window")
    return float(forecast_batch(model, window[None])[0])


def _attention_backward(params, cache, operators, grad_out, grads):
    analysis, synthesis = operators
    transformed = cache["transformed"]
    weights = cache["weights"]
    xs = cache["xs"]
    key_dim = params["attention.wq"].shape[0]

    grads["attention.wo"] = np.einsum("b,bld->ld", grad_out, cache["combined"])
    d_combined = grad_out[:, None, None] * params["attention.wo"]
    d_per_scale = np.einsum("slm,bld->bsmd", synthesis, d_combined)
    d_weights = np.einsum("bsld,bsmd->bslm", d_per_scale, transformed["v"])
    d_transformed = {
        "v": np.einsum("bslm,bsld->bsmd", weights, d_per_scale),
    }
    d_scores = (
        weights
        * (d_weights - np.sum(d_weights * weights, axis=-1, keepdims=True))
        / math.sqrt(key_dim)
    )
    d_transformed["q"] = np.einsum("bslm,bsmd->bsld", d_scores, transformed["k"])
    d_transformed["k"] = np.einsum("bslm,bsld->bsmd", d_scores, transformed["q"])

    d_xs = np.zeros_like(xs)
    for name in ("q", "k", "v"):
        d_projected = np.einsum("slm,bsld->bmd", analysis, d_transformed[name])
        grads["attention.w" + name] = np.einsum("bmd,bm->d", d_projected, xs)
        grads["attention.b" + name] = d_projected.sum(axis=(0, 1))
        d_xs += d_projected @ params["attention.w" + name]
    return d_xs


def _seasonal_backward(params, cache, operators, grad_out, grads):
    state = cache["seasonal"]
    scale, std, normalized = state["scale"], state["std"], state["normalized"]
    length = normalized.shape[1]
    d_normalized = _attention_backward(
        params, cache["attention"], operators, grad_out * scale[:, 0], grads
    )
    d_scale = grad_out[:, None] * cache["attended"][:, None] - np.sum(
        d_normalized * normalized / scale, axis=1, keepdims=True
    )
    d_mean = -np.sum(d_normalized / scale, axis=1, keepdims=True)
    d_std = np.where(std >= REVIN_EPS, d_scale, 0.0)
    return d_normalized / scale + d_mean / length + d_std * normalized / length


def _mlp_backward(params, cache, d_out, grads):
    grads["mlp.w3"] = cache["h2"].T @ d_out
    grads["mlp.b3"] = d_out.sum(axis=0)
    d_a2 = (d_out @ params["mlp.w3"].T) * (cache["a2"] > 0)
    grads["mlp.w2"] = cache["h1"].T @ d_a2
    grads["mlp.b2"] = d_a2.sum(axis=0)
    d_a1 = (d_a2 @ params["mlp.w2"].T) * (cache["a1"] > 0)
    grads["mlp.w1"] = cache["x"].T @ d_a1
    grads["mlp.b1"] = d_a1.sum(axis=0)
    return d_a1 @ params["mlp.w1"].T


def _trend_backward(params, cache, grad_out, grads):
    gamma = params["revin.gamma"]
    beta = params["revin.beta"]
    guarded = _guarded_gamma(gamma)
    revin = cache["revin"]
    scale, mean, std = revin["scale"], revin["mean"], revin["std"]
    normalized = revin["normalized"]
    raw = cache["raw"]
    trend = cache["trend"]
    length = trend.shape[1]

    g = grad_out[:, None]
    d_raw = g * scale / guarded
    d_gamma_guarded = -np.sum(g * (raw - beta) * scale / guarded**2)
    d_gamma = np.where(np.abs(gamma) >= REVIN_EPS**2, d_gamma_guarded, 0.0)
    d_beta = -np.sum(g * scale / guarded)
    d_scale = g * (raw - beta) / guarded
    d_mean = g.copy()

    d_input = _mlp_backward(params, cache["mlp"], d_raw, grads)
    d_gamma = d_gamma + np.sum(d_input * normalized)
    d_beta = d_beta + np.sum(d_input)
    d_normalized = d_input * gamma
    d_scale = d_scale - np.sum(d_normalized * normalized / scale, axis=1, keepdims=True)
    d_mean = d_mean - np.sum(d_normalized / scale, axis=1, keepdims=True)
    d_std = np.where(std >= REVIN_EPS, d_scale, 0.0)
    grads["revin.gamma"] = np.reshape(d_gamma, (1,))
    grads["revin.beta"] = np.reshape(d_beta, (1,))
    return (
        d_normalized / scale
        + d_mean / length
        + d_std * (trend - mean) / (length * np.maximum(std, REVIN_EPS))
    )


def loss_and_gradients(model, windows, targets, operators=None):
    """Mean squared error of a batch and its gradient for every parameter"""
    windows = _check_windows(windows, model.config.window)
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (windows.shape[0],):
        raise StructureError(
            f"{targets.size} targets for {windows.shape[0]} windows"
        )
    if operators is None:
        operators = attention_operators(model.config)
    trend_out, seasonal_out, cache = _forward(model, windows, operators)
    residual = trend_out + seasonal_out - targets
    loss = float(np.mean(residual**2))
    grad_out = 2.0 * residual / len(targets)

    grads = {}
    d_seasonal = _seasonal_backward(model.params, cache, operators, grad_out, grads)
    d_trend = _trend_backward(model.params, cache, grad_out, grads)
    # seasonal = windows - trend
    d_trend_total = d_trend - d_seasonal
    mix = cache["mix"]
    d_mix = np.einsum("bl,fbl->f", d_trend_total, cache["candidates"])
    grads["decompose.logits"] = mix * (d_mix - np.dot(mix, d_mix))
    return loss, grads
