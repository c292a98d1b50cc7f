"""Training loop, gradient check and training data helpers"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from tmsquared.display import print_step
from tmsquared.errors import ConfigError, EmptyInputError, TrainingDivergedError
from tmsquared.forecast import (
    BLOCKS,
    attention_operators,
    block_of,
    loss_and_gradients,
)

SGD = "sgd"
MOMENTUM = "momentum"
FINITE_DIFFERENCE_STEP = 1e-5


@dataclass(frozen=True)
class TrainConfig:
    """Optimisation settings"""

    learning_rate: float = 0.01
    epochs: int = 10
    batch_size: int = 32
    seed: int = 0
    optimizer: str = SGD
    momentum: float = 0.9
    clip_norm: Optional[float] = None

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ConfigError(f"learning rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")
        if self.optimizer not in (SGD, MOMENTUM):
            raise ConfigError(f"optimizer must be {SGD} or {MOMENTUM}")
        if not 0 <= self.momentum < 1:
            raise ConfigError("momentum must be in [0, 1)")
        if self.clip_norm is not None and not self.clip_norm > 0:
            raise ConfigError(f"clip_norm must be > 0, got {self.clip_norm}")


def make_windows(series, window):
    """Windows ending at every point but the last, and the point after each

    Windows shorter than `window` are left-padded with the first value.
    """
    series = np.asarray(series, dtype=float)
    if len(series) < 2:
        raise EmptyInputError("at least 2 points are needed to build windows")
    padded = np.concatenate([np.full(window - 1, series[0]), series])
    windows = np.lib.stride_tricks.sliding_window_view(padded, window)[:-1]
    return windows.copy(), series[1:].copy()


def clip_gradients(grads, max_norm):
    """Scale every gradient down together so their joint norm is at most max_norm"""
    norm = np.sqrt(sum(np.sum(grad**2) for grad in grads.values()))
    if not norm > max_norm:
        return grads
    return {name: grad * (max_norm / norm) for name, grad in grads.items()}


def _step(params, velocity, grads, config):
    if config.clip_norm is not None:
        grads = clip_gradients(grads, config.clip_norm)
    for name, grad in grads.items():
        if config.optimizer == MOMENTUM:
            velocity[name] = config.momentum * velocity[name] - config.learning_rate * grad
            params[name] += velocity[name]
        else:
            params[name] -= config.learning_rate * grad


def train(model, windows, targets, config=TrainConfig(), verbose=False):
    """Minimise the mean squared next-point error; returns (model, loss curve)"""
    windows = np.asarray(windows, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if len(windows) == 0:
        raise EmptyInputError("no training windows")
    rng = np.random.default_rng(config.seed)
    operators = attention_operators(model.config)
    params = {name: value.copy() for name, value in model.params.items()}
    velocity = {name: np.zeros_like(value) for name, value in params.items()}
    working = model.copy(params)
    curve = []
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(windows))
        total = 0.0
        # divergence is reported below, not as numpy overflow warnings
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            for start in range(0, len(order), config.batch_size):
                batch = order[start : start + config.batch_size]
                loss, grads = loss_and_gradients(
                    working, windows[batch], targets[batch], operators
                )
                if not np.isfinite(loss):
                    raise TrainingDivergedError(epoch)
                total += loss * len(batch)
                _step(working.params, velocity, grads, config)
        epoch_loss = total / len(windows)
        finite = all(np.all(np.isfinite(value)) for value in working.params.values())
        if not (finite and np.isfinite(epoch_loss)):
            raise TrainingDivergedError(epoch)
        curve.append(epoch_loss)
        if verbose:
            print_step(f"epoch {epoch}: loss {epoch_loss:.6g}")
    return working.copy(train_config=config), curve


def gradient_check(model, windows, targets, step=FINITE_DIFFERENCE_STEP):
    """Largest relative gap between analytic and central-difference gradients

    Returns (max error, error per parameter block); the error of a block is
    |analytic - numeric| / (|analytic| + |numeric|) over its parameters.
    """
    operators = attention_operators(model.config)
    _, analytic = loss_and_gradients(model, windows, targets, operators)
    shifted = model.copy()
    numeric = {}
    for name, value in shifted.params.items():
        numeric[name] = np.zeros_like(value)
        for index in np.ndindex(value.shape):
            original = value[index]
            value[index] = original + step
            upper, _ = loss_and_gradients(shifted, windows, targets, operators)
            value[index] = original - step
            lower, _ = loss_and_gradients(shifted, windows, targets, operators)
            value[index] = original
            numeric[name][index] = (upper - lower) / (2.0 * step)

    errors = {}
    for block in BLOCKS:
        names = [name for name in analytic if block_of(name) == block]
        a = np.concatenate([analytic[name].ravel() for name in names])
        n = np.concatenate([numeric[name].ravel() for name in names])
        errors[block] = float(
            np.linalg.norm(a - n)
            / max(np.linalg.norm(a) + np.linalg.norm(n), 1e-12)
        )
    return max(errors.values()), errors


def write_loss_curve(curve, path):
    """Write epoch, loss rows to a CSV file"""
    pd.DataFrame(
        {"epoch": np.arange(1, len(curve) + 1), "loss": np.asarray(curve, dtype=float)}
    ).to_csv(path, index=False)
