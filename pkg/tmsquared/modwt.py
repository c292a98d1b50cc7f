"""Maximal overlap discrete wavelet transform (circular pyramid algorithm)"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd
import pywt

from tmsquared.display import print_warning
from tmsquared.errors import (
    ConfigError,
    LevelError,
    SeriesInvariantError,
    StructureError,
)

# Supported filters and their PyWavelets names
FILTERS = {"haar": "haar", "d4": "db2"}
MAX_DEFAULT_LEVELS = 4


@dataclass(frozen=True)
class WaveletFilter:
    """Orthonormal filter pair, DWT normalization (sum of g is sqrt(2))"""

    name: str
    scaling_taps: tuple
    wavelet_taps: tuple

    @property
    def length(self):
        """Number of taps L"""
        return len(self.scaling_taps)

    @property
    def modwt_scaling(self):
        """Level-1 MODWT scaling taps g / sqrt(2)"""
        return np.array(self.scaling_taps) / math.sqrt(2.0)

    @property
    def modwt_wavelet(self):
        """Level-1 MODWT wavelet taps h / sqrt(2)"""
        return np.array(self.wavelet_taps) / math.sqrt(2.0)


def get_filter(name="haar"):
    """Haar or Daubechies-4 filter, taps from PyWavelets"""
    if isinstance(name, WaveletFilter):
        return name
    key = str(name).lower()
    if key == "db2":
        key = "d4"
    if key not in FILTERS:
        raise ConfigError(f"unsupported wavelet filter {name!r}, use haar or d4")
    scaling = tuple(float(tap) for tap in pywt.Wavelet(FILTERS[key]).rec_lo)
    size = len(scaling)
    # quadrature mirror relation h_l = (-1)^l g_{L-1-l}
    wavelet = tuple((-1.0) ** l * scaling[size - 1 - l] for l in range(size))
    return WaveletFilter(key, scaling, wavelet)


@dataclass(frozen=True, eq=False)
class WaveletDecomposition:
    """MODWT details W_1..W_J and smooth V_J of one series"""

    details: tuple
    smooth: np.ndarray
    filter: WaveletFilter

    @property
    def levels(self):
        """Number of levels J"""
        return len(self.details)

    @property
    def source_length(self):
        """Length T of the transformed series"""
        return len(self.smooth)

    def check(self):
        """Raise StructureError unless every level has the smooth's length"""
        length = self.source_length
        for level, detail in enumerate(self.details, start=1):
            if len(detail) != length:
                raise StructureError(
                    f"level {level} has {len(detail)} coefficients, expected {length}"
                )


def default_levels(length):
    """floor(log2 T), capped at 4 and at least 1"""
    if length < 2:
        raise SeriesInvariantError("a series needs at least 2 points")
    return max(1, min(int(math.floor(math.log2(length))), MAX_DEFAULT_LEVELS))


def _analysis_step(smooth, wavelet_filter, level):
    shift = 2 ** (level - 1)
    detail = np.zeros_like(smooth)
    coarser = np.zeros_like(smooth)
    for l, (h_tap, g_tap) in enumerate(
        zip(wavelet_filter.modwt_wavelet, wavelet_filter.modwt_scaling)
    ):
        rolled = np.roll(smooth, shift * l, axis=-1)
        detail += h_tap * rolled
        coarser += g_tap * rolled
    return detail, coarser


def _synthesis_step(detail, smooth, wavelet_filter, level):
    shift = 2 ** (level - 1)
    finer = np.zeros_like(smooth)
    for l, (h_tap, g_tap) in enumerate(
        zip(wavelet_filter.modwt_wavelet, wavelet_filter.modwt_scaling)
    ):
        finer += h_tap * np.roll(detail, -shift * l, axis=-1)
        finer += g_tap * np.roll(smooth, -shift * l, axis=-1)
    return finer


def _forward(x, wavelet_filter, levels):
    details = []
    smooth = x
    for level in range(1, levels + 1):
        detail, smooth = _analysis_step(smooth, wavelet_filter, level)
        details.append(detail)
    return details, smooth


def _inverse(details, smooth, wavelet_filter):
    for level in range(len(details), 0, -1):
        smooth = _synthesis_step(details[level - 1], smooth, wavelet_filter, level)
    return smooth


def modwt_forward(x, wavelet_filter="haar", levels=None):
    """MODWT of a 1-D series with circular boundary handling"""
    wavelet_filter = get_filter(wavelet_filter)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise StructureError("modwt_forward transforms one series at a time")
    if len(x) < 2:
        raise SeriesInvariantError("a series needs at least 2 points")
    if levels is None:
        levels = default_levels(len(x))
    if levels < 1:
        raise ConfigError(f"levels must be >= 1, got {levels}")
    if len(x) < wavelet_filter.length * 2 ** (levels - 1):
        print_warning(
            f"series of length {len(x)} is shorter than the level-{levels}"
            f" {wavelet_filter.name} filter, coefficients wrap around",
            once_key=("modwt", wavelet_filter.name, len(x), levels),
        )
    details, smooth = _forward(x, wavelet_filter, levels)
    return WaveletDecomposition(tuple(details), smooth, wavelet_filter)


def modwt_inverse(decomposition):
    """Series whose MODWT is the given decomposition"""
    decomposition.check()
    return _inverse(
        [np.asarray(detail, dtype=float) for detail in decomposition.details],
        np.asarray(decomposition.smooth, dtype=float),
        decomposition.filter,
    )


def _check_level(decomposition, level):
    if not 1 <= level <= decomposition.levels:
        raise LevelError(f"level {level} outside 1..{decomposition.levels}")


def detail_reconstruct(decomposition, level):
    """Detail series D_j; the D_j and S_J add up to the source series"""
    _check_level(decomposition, level)
    decomposition.check()
    zeros = np.zeros(decomposition.source_length)
    details = [
        np.asarray(detail, dtype=float) if number == level else zeros
        for number, detail in enumerate(decomposition.details, start=1)
    ]
    return _inverse(details, zeros, decomposition.filter)


def smooth_reconstruct(decomposition):
    """Smooth series S_J"""
    decomposition.check()
    zeros = np.zeros(decomposition.source_length)
    return _inverse(
        [zeros] * decomposition.levels,
        np.asarray(decomposition.smooth, dtype=float),
        decomposition.filter,
    )


def replace_details(decomposition, level, new_w):
    """New decomposition with W_j replaced"""
    _check_level(decomposition, level)
    new_w = np.asarray(new_w, dtype=float)
    if new_w.shape != (decomposition.source_length,):
        raise StructureError(
            f"replacement has shape {new_w.shape},"
            f" expected ({decomposition.source_length},)"
        )
    details = list(decomposition.details)
    details[level - 1] = new_w.copy()
    return WaveletDecomposition(tuple(details), decomposition.smooth, decomposition.filter)


def _upsample(taps, factor):
    upsampled = np.zeros((len(taps) - 1) * factor + 1)
    upsampled[::factor] = taps
    return upsampled


def equivalent_filter(wavelet_filter, level):
    """Level-j MODWT wavelet filter, so that W_j = h_j circularly convolved with x"""
    wavelet_filter = get_filter(wavelet_filter)
    if level < 1:
        raise LevelError(f"level must be >= 1, got {level}")
    taps = np.array([1.0])
    for coarser in range(1, level):
        taps = np.convolve(
            taps, _upsample(wavelet_filter.modwt_scaling, 2 ** (coarser - 1))
        )
    return np.convolve(taps, _upsample(wavelet_filter.modwt_wavelet, 2 ** (level - 1)))


@lru_cache(maxsize=64)
def phase_shift(wavelet_filter, level):
    """Delay of the level-j wavelet filter (floor of its energy centre)"""
    taps = equivalent_filter(wavelet_filter, level)
    energy = taps**2
    return int(math.floor(np.dot(np.arange(len(taps)), energy) / energy.sum()))


@lru_cache(maxsize=32)
def transform_matrices(wavelet_filter, length, levels):
    """Analysis and synthesis operators of the MODWT on length-T series

    Returns (analysis, synthesis), two arrays of shape (J + 1, T, T): slot s
    holds W_{s+1} (the last slot V_J) as analysis[s] @ x, and x equals
    sum_s synthesis[s] @ analysis[s] @ x.
    """
    wavelet_filter = get_filter(wavelet_filter)
    identity = np.eye(length)
    details, smooth = _forward(identity, wavelet_filter, levels)
    analysis = np.stack([block.T for block in details + [smooth]])
    zeros = np.zeros((length, length))
    synthesis = []
    for slot in range(levels + 1):
        coefficients = [identity if slot == level else zeros for level in range(levels)]
        last = identity if slot == levels else zeros
        synthesis.append(_inverse(coefficients, last, wavelet_filter).T)
    synthesis = np.stack(synthesis)
    analysis.setflags(write=False)
    synthesis.setflags(write=False)
    return analysis, synthesis


def dump_coefficients(decomposition, path):
    """Write t, W_1..W_J, V_J columns to a CSV file"""
    decomposition.check()
    table = {"t": np.arange(decomposition.source_length)}
    for level, detail in enumerate(decomposition.details, start=1):
        table[f"W_{level}"] = detail
    table[f"V_{decomposition.levels}"] = decomposition.smooth
    pd.DataFrame(table).to_csv(path, index=False)
