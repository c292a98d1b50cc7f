"""Local linear scaling approximation: jump detection in MODWT coefficients

Each column is extended by its mirror image before the transform, so the
circular MODWT sees no jump where the series wraps around. Coefficients are
phase aligned, so a jump at index s produces its level-j peak at s on every
level. Regions are reported in time coordinates of the original column.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from tmsquared.errors import ConfigError, NoJumpFound, StructureError
from tmsquared.modwt import (
    default_levels,
    equivalent_filter,
    get_filter,
    modwt_forward,
    phase_shift,
)

MAD_SCALE = 0.6745
MIN_PEAK = 1e-9
# Relative cut-offs for zero filter gains and for numerical rank
SPECTRAL_TOL = 1e-10
RANK_TOL = 1e-9


@dataclass(frozen=True)
class ChangePointConfig:
    """Detection settings; levels and depth default to the series length"""

    levels: int = None
    depth: int = None
    max_jumps: int = 10
    threshold: float = 3.0

    def __post_init__(self):
        if self.levels is not None and self.levels < 1:
            raise ConfigError(f"levels must be >= 1, got {self.levels}")
        if self.depth is not None and self.depth < 0:
            raise ConfigError(f"depth must be >= 0, got {self.depth}")
        if (
            self.levels is not None
            and self.depth is not None
            and self.depth > self.levels
        ):
            raise ConfigError(
                f"depth {self.depth} exceeds the number of levels {self.levels}"
            )
        if self.max_jumps < 1:
            raise ConfigError(f"max_jumps must be >= 1, got {self.max_jumps}")
        if not self.threshold > 0:
            raise ConfigError(f"threshold must be > 0, got {self.threshold}")

    def resolve(self, length):
        """Concrete levels and depth for a series of the given length"""
        levels = default_levels(length) if self.levels is None else self.levels
        depth = levels - 1 if self.depth is None else self.depth
        return replace(self, levels=levels, depth=depth)


@dataclass(frozen=True)
class JumpRegion:
    """Jump at location l of level j, spanning [alpha, beta]"""

    level: int
    location: int
    alpha: int
    beta: int
    n_alpha: int = 0
    n_beta: int = 0
    refinement_miss: bool = False

    def __post_init__(self):
        if not self.alpha <= self.location <= self.beta:
            raise StructureError(
                f"jump region [{self.alpha}, {self.beta}]"
                f" does not contain {self.location}"
            )
        if self.n_alpha < 0 or self.n_beta < 0:
            raise StructureError("sign change counts must be >= 0")

    def __contains__(self, t):
        return self.alpha <= t <= self.beta


@dataclass(frozen=True, eq=False)
class ReconstructedSeries:
    """Denoised series with the jumps detected in each column"""

    series: object
    jumps: tuple
    config: ChangePointConfig = field(default_factory=ChangePointConfig)

    @property
    def values(self):
        """T x D reconstructed matrix"""
        return self.series.values

    @property
    def regions(self):
        """Per column, every region of every jump chain"""
        return tuple(
            [region for chain in chains for region in chain] for chains in self.jumps
        )


def _signs(w):
    return np.where(np.asarray(w) >= 0, 1, -1)


def sign_changes(w):
    """Half the summed absolute sign differences, sign(0) counted as +1"""
    if len(w) < 2:
        return 0
    return int(np.abs(np.diff(_signs(w))).sum() // 2)


def mad_scale(w):
    """Robust noise scale MAD / 0.6745"""
    w = np.asarray(w, dtype=float)
    return float(np.median(np.abs(w - np.median(w))) / MAD_SCALE)


def mirror_extend(column):
    """Column followed by its reverse; continuous where the circle closes"""
    column = np.asarray(column, dtype=float)
    return np.concatenate([column, column[::-1]])


def aligned_coefficients(decomposition):
    """Detail coefficients shifted so jumps peak at their time index"""
    return [
        np.roll(detail, -phase_shift(decomposition.filter, level))
        for level, detail in enumerate(decomposition.details, start=1)
    ]


@lru_cache(maxsize=64)
def template_reach(wavelet_filter, level):
    """Points (before, after) the peak that a noise-free jump's coefficients cover"""
    step = np.cumsum(equivalent_filter(wavelet_filter, level))
    nonzero = np.flatnonzero(np.abs(step) > 1e-12 * np.abs(step).max())
    peak = int(np.argmax(np.abs(step)))
    return peak - int(nonzero[0]), int(nonzero[-1]) - peak


def _extend(signs, location, limit, flips, step):
    bound = location
    crossed = 0
    t = location + step
    while (t >= limit) if step < 0 else (t <= limit):
        if signs[t] != signs[t - step]:
            crossed += 1
            if crossed > flips:
                break
        bound = t
        t += step
    return bound


def _region(w, location, level, wavelet_filter, low, high):
    before, after = template_reach(wavelet_filter, level)
    start = max(low, location - before)
    end = min(high, location + after)
    n_alpha = sign_changes(w[start : location + 1])
    n_beta = sign_changes(w[location : end + 1])
    signs = _signs(w)
    return JumpRegion(
        level=level,
        location=location,
        alpha=_extend(signs, location, start, n_alpha, -1),
        beta=_extend(signs, location, end, n_beta, 1),
        n_alpha=n_alpha,
        n_beta=n_beta,
    )


def _gap(length, location, excluded):
    low, high = 0, length - 1
    for region in excluded:
        if region.beta < location:
            low = max(low, region.beta + 1)
        elif region.alpha > location:
            high = min(high, region.alpha - 1)
    return low, high


def detect_kth_jump(
    w, excluded=(), level=1, wavelet_filter="haar", threshold=3.0, noise_scale=None
):
    """Largest aligned coefficient outside the excluded regions"""
    wavelet_filter = get_filter(wavelet_filter)
    w = np.asarray(w, dtype=float)
    if len(w) == 0:
        raise NoJumpFound("no coefficients")
    if noise_scale is None:
        noise_scale = mad_scale(w)
    candidates = np.abs(w)
    for region in excluded:
        candidates[region.alpha : region.beta + 1] = -1.0
    location = int(np.argmax(candidates))
    peak = candidates[location]
    if peak < 0:
        raise NoJumpFound("every index lies in an excluded region")
    if peak <= max(threshold * noise_scale, MIN_PEAK):
        raise NoJumpFound(
            f"peak {peak:.4g} below threshold {threshold} x noise {noise_scale:.4g}"
        )
    low, high = _gap(len(w), location, excluded)
    return _region(w, location, level, wavelet_filter, low, high)


def detect_first_jump(
    w, level=1, wavelet_filter="haar", threshold=3.0, noise_scale=None
):
    """Largest aligned coefficient and the extent of its jump"""
    return detect_kth_jump(w, (), level, wavelet_filter, threshold, noise_scale)


def refine_across_scales(decomposition, region, depth, aligned=None):
    """Follow a level-J jump down to level J - depth, within each parent region"""
    if aligned is None:
        aligned = aligned_coefficients(decomposition)
    chain = [region]
    parent = region
    lowest = max(1, region.level - depth)
    for level in range(region.level - 1, lowest - 1, -1):
        w = aligned[level - 1]
        window = np.abs(w[parent.alpha : parent.beta + 1])
        if not np.any(window > 0):
            parent = replace(parent, level=level, refinement_miss=True)
        else:
            location = parent.alpha + int(np.argmax(window))
            parent = _region(w, location, level, decomposition.filter, 0, len(w) - 1)
        chain.append(parent)
    return chain


def detect(column, config=ChangePointConfig(), wavelet_filter="haar"):
    """Jump chains (top level first) of one column, largest jump first

    The returned decomposition is that of the mirror-extended column.
    """
    column = np.asarray(column, dtype=float)
    length = len(column)
    config = config.resolve(length)
    decomposition = modwt_forward(mirror_extend(column), wavelet_filter, config.levels)
    aligned = [w[:length] for w in aligned_coefficients(decomposition)]
    top = aligned[-1]
    noise_scale = mad_scale(top)
    chains = []
    excluded = []
    while len(chains) < config.max_jumps:
        try:
            region = detect_kth_jump(
                top,
                excluded,
                config.levels,
                decomposition.filter,
                config.threshold,
                noise_scale,
            )
        except NoJumpFound:
            break
        excluded.append(region)
        chains.append(
            refine_across_scales(decomposition, region, config.depth, aligned)
        )
    return decomposition, chains


@lru_cache(maxsize=64)
def _aligned_spectra(wavelet_filter, size, levels):
    impulse = np.zeros(size)
    impulse[0] = 1.0
    decomposition = modwt_forward(impulse, wavelet_filter, levels)
    return tuple(np.fft.fft(column) for column in aligned_coefficients(decomposition))


def _mark(mask, start, end):
    size = len(mask)
    indices = np.arange(start, end + 1) % size
    mask[indices] = True
    mask[(size - indices) % size] = True


def keep_masks(chains, length, config, wavelet_filter):
    """Per refined level, the mirror-extended indices whose coefficients are kept

    Each region is kept together with the full reach of its jump around its
    own location and around the finest location of its chain, at both the
    index and its mirror image.
    """
    wavelet_filter = get_filter(wavelet_filter)
    config = config.resolve(length)
    lowest = max(1, config.levels - config.depth)
    masks = {
        level: np.zeros(2 * length, dtype=bool)
        for level in range(lowest, config.levels + 1)
    }
    for chain in chains:
        anchor = chain[-1].location
        for region in chain:
            if region.level not in masks:
                continue
            before, after = template_reach(wavelet_filter, region.level)
            mask = masks[region.level]
            _mark(mask, region.alpha, region.beta)
            _mark(mask, region.location - before, region.location + after)
            _mark(mask, anchor - before, anchor + after)
    return masks


def _null_modes(zero_gain, size):
    n = np.arange(size)
    modes = []
    for f in np.flatnonzero(zero_gain):
        if f > size // 2:
            continue
        modes.append(np.cos(2.0 * np.pi * f * n / size))
        if 0 < f and 2 * f != size:
            modes.append(np.sin(2.0 * np.pi * f * n / size))
    return modes


def _null_space(matrix):
    rows, width = matrix.shape
    if rows < width:
        matrix = np.vstack([matrix, np.zeros((width - rows, width))])
    _, singular, vh = np.linalg.svd(matrix, full_matrices=False)
    if singular.size == 0 or singular.max() == 0:
        return np.eye(width)
    rank = int(np.sum(singular > RANK_TOL * singular.max()))
    return vh[rank:].T


def _orthonormal(matrix):
    if matrix.shape[1] == 0:
        return matrix
    u, singular, _ = np.linalg.svd(matrix, full_matrices=False)
    if singular.max() == 0:
        return u[:, :0]
    return u[:, singular > RANK_TOL * singular.max()]


def jump_subspace(masks, wavelet_filter, size, levels):
    """Orthonormal basis of the length-size series whose aligned coefficients
    vanish outside the masks

    Every such series is the pseudo-inverse of the finest masked level applied
    to coefficients inside its mask, plus a component that level cannot see.
    The basis is searched in that span only.
    """
    wavelet_filter = get_filter(wavelet_filter)
    spectra = _aligned_spectra(wavelet_filter, size, levels)
    lowest = min(masks)
    finest = spectra[lowest - 1]
    gain = np.abs(finest)
    passes = gain > SPECTRAL_TOL * gain.max()
    kernel = np.fft.ifft(np.where(passes, 1.0 / np.where(passes, finest, 1.0), 0.0)).real
    columns = [np.roll(kernel, t) for t in np.flatnonzero(masks[lowest])]
    columns += _null_modes(~passes, size)
    basis = np.column_stack(columns)
    basis = basis / np.linalg.norm(basis, axis=0)
    spectrum = np.fft.fft(basis, axis=0)
    constraints = np.vstack(
        [
            np.fft.ifft(spectra[level - 1][:, None] * spectrum, axis=0).real[~mask]
            for level, mask in masks.items()
        ]
    )
    return _orthonormal(basis @ _null_space(constraints))


def _reconstruct_column(column, config, wavelet_filter):
    column = np.asarray(column, dtype=float)
    _, chains = detect(column, config, wavelet_filter)
    if not chains:
        return column.copy(), chains
    length = len(column)
    levels = config.resolve(length).levels
    masks = keep_masks(chains, length, config, wavelet_filter)
    basis = jump_subspace(masks, wavelet_filter, 2 * length, levels)
    extended = mirror_extend(column)
    return (basis @ (basis.T @ extended))[:length], chains


def reconstruct(series, config=ChangePointConfig(), wavelet_filter="haar"):
    """Column-wise denoising around the detected jumps

    A column with jumps becomes the closest series whose refined-level
    coefficients vanish outside the jump regions; reconstructing it again
    leaves it unchanged. Columns without jumps pass through as they are.
    """
    columns = []
    jumps = []
    for index in range(series.width):
        values, chains = _reconstruct_column(
            series.values[:, index], config, wavelet_filter
        )
        columns.append(values)
        jumps.append(tuple(tuple(chain) for chain in chains))
    return ReconstructedSeries(
        series.with_values(np.column_stack(columns)), tuple(jumps), config
    )


def regions_report(reconstructed):
    """Rows (column, k, level, l, alpha, beta, refinement_miss) of every region"""
    rows = []
    names = reconstructed.series.variable_names
    for name, chains in zip(names, reconstructed.jumps):
        for k, chain in enumerate(chains, start=1):
            for region in chain:
                rows.append(
                    {
                        "column": name,
                        "k": k,
                        "level": region.level,
                        "l": region.location,
                        "alpha": region.alpha,
                        "beta": region.beta,
                        "refinement_miss": region.refinement_miss,
                    }
                )
    return rows
