"""Trend / seasonal split with softmax-weighted moving averages"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from tmsquared.errors import ConfigError

DEFAULT_KERNELS = (5, 13, 25)


def softmax(logits):
    """Softmax over the last axis, shifted by the max for stability"""
    logits = np.asarray(logits, dtype=float)
    shifted = np.exp(logits - logits.max(axis=-1, keepdims=True))
    return shifted / shifted.sum(axis=-1, keepdims=True)


def check_kernels(kernel_sizes, length=None):
    """Kernels must be odd, >= 3 and no longer than the series"""
    if len(kernel_sizes) == 0:
        raise ConfigError("at least one kernel size is required")
    for size in kernel_sizes:
        if size < 3 or size % 2 == 0:
            raise ConfigError(f"kernel size {size} must be odd and >= 3")
        if length is not None and size > length:
            raise ConfigError(f"kernel size {size} exceeds series length {length}")


def moving_average(m, size):
    """Centred moving average over the last axis, edges replicated"""
    m = np.asarray(m, dtype=float)
    half = size // 2
    padding = [(0, 0)] * (m.ndim - 1) + [(half, half)]
    padded = np.pad(m, padding, mode="edge")
    return sliding_window_view(padded, size, axis=-1).mean(axis=-1)


def candidate_trends(m, kernel_sizes):
    """Moving averages stacked along a new leading axis, one per kernel"""
    return np.stack([moving_average(m, size) for size in kernel_sizes])


@dataclass(frozen=True, eq=False)
class TrendSeasonal:
    """x = trend + seasonal"""

    trend: np.ndarray
    seasonal: np.ndarray
    kernel_sizes: tuple
    weights: np.ndarray


def decompose(m, kernel_sizes=DEFAULT_KERNELS, weight_logits=None):
    """Trend as the softmax-weighted mix of moving averages, seasonal the rest"""
    m = np.asarray(m, dtype=float)
    kernel_sizes = tuple(kernel_sizes)
    check_kernels(kernel_sizes, m.shape[-1])
    if weight_logits is None:
        weight_logits = np.zeros(len(kernel_sizes))
    weight_logits = np.asarray(weight_logits, dtype=float)
    if weight_logits.shape != (len(kernel_sizes),):
        raise ConfigError(
            f"{weight_logits.size} weight logits for {len(kernel_sizes)} kernels"
        )
    weights = softmax(weight_logits)
    trend = np.tensordot(weights, candidate_trends(m, kernel_sizes), axes=1)
    return TrendSeasonal(trend, m - trend, kernel_sizes, weights)
