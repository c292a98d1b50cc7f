"""Multivariate time series container"""

from dataclasses import dataclass

import numpy as np

from tmsquared.errors import SeriesInvariantError


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MultivariateSeries:
    """A T x D real matrix with a strictly increasing time axis"""

    values: np.ndarray
    time_index: np.ndarray
    variable_names: tuple

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim == 1:
            values = _frozen(values[:, None])
        time_index = _frozen(self.time_index)
        names = tuple(self.variable_names)
        if values.ndim != 2:
            raise SeriesInvariantError("series values must be a T x D matrix")
        rows, columns = values.shape
        if rows < 2 or columns < 1:
            raise SeriesInvariantError(
                f"series needs T >= 2 and D >= 1, got {rows} x {columns}"
            )
        if not np.all(np.isfinite(values)):
            raise SeriesInvariantError("series contains NaN or Inf")
        if time_index.shape != (rows,):
            raise SeriesInvariantError("time index length differs from T")
        if np.any(np.diff(time_index) <= 0):
            raise SeriesInvariantError("time index must be strictly increasing")
        if len(names) != columns:
            raise SeriesInvariantError("one variable name per column is required")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "time_index", time_index)
        object.__setattr__(self, "variable_names", names)

    @property
    def length(self):
        """Number of time points T"""
        return self.values.shape[0]

    @property
    def width(self):
        """Number of variables D"""
        return self.values.shape[1]

    def column(self, name):
        """Return one variable as a vector"""
        try:
            return self.values[:, self.variable_names.index(name)]
        except ValueError as exception:
            raise SeriesInvariantError(f"unknown variable {name}") from exception

    def with_values(self, values):
        """Same time axis and names, new values"""
        return MultivariateSeries(values, self.time_index, self.variable_names)
