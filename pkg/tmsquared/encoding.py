"""Momentum encoding of whole matches"""

import numpy as np
from joblib import Parallel, delayed

from tmsquared.errors import ConfigError
from tmsquared.ingest import group_matches, to_series
from tmsquared.llsa import ChangePointConfig, reconstruct
from tmsquared.momentum import momentum
from tmsquared.schema import DEFAULT_SCHEMA
from tmsquared.series import MultivariateSeries

DEFAULT_HISTORY = 64


class MomentumEncoder:
    """Turns the records of a match into both players' momentum series

    Offline mode reconstructs each full match series at once. Causal mode
    reconstructs, for every point t, only the last `history` points, so
    nothing after t influences M(t).
    """

    def __init__(
        self,
        weights,
        pressure,
        schema=DEFAULT_SCHEMA,
        config=ChangePointConfig(),
        wavelet_filter="haar",
        causal=True,
        history=DEFAULT_HISTORY,
        strict=False,
        n_jobs=1,
    ):
        if history < 1:
            raise ConfigError(f"history must be >= 1, got {history}")
        self.weights = weights
        self.pressure = pressure
        self.schema = schema
        self.config = config
        self.wavelet_filter = wavelet_filter
        self.causal = causal
        self.history = history
        self.strict = strict
        self.n_jobs = n_jobs

    def _offline(self, series):
        return reconstruct(series, self.config, self.wavelet_filter).values

    def _causal(self, series):
        values = series.values
        rows = [values[0]]
        for t in range(1, len(values)):
            window = values[max(0, t - self.history + 1) : t + 1]
            if len(window) < 2:
                rows.append(window[-1])
                continue
            recent = MultivariateSeries(
                window, np.arange(len(window)), series.variable_names
            )
            rebuilt = reconstruct(recent, self.config, self.wavelet_filter)
            rows.append(rebuilt.values[-1])
        return np.array(rows)

    def reconstruct_features(self, series):
        """Reconstructed T x n feature matrix of one player"""
        return self._causal(series) if self.causal else self._offline(series)

    def encode(self, records):
        """(M_1, M_2) momentum series of one match, player 1 first"""
        player1, player2 = records[0].player1, records[0].player2
        raw1 = to_series(records, player1, self.schema)
        raw2 = to_series(records, player2, self.schema)
        rebuilt1 = self.reconstruct_features(raw1)
        rebuilt2 = self.reconstruct_features(raw2)
        first = momentum(
            rebuilt1,
            rebuilt2,
            self.weights,
            self.pressure,
            player1,
            player2,
            raw1.values,
            raw2.values,
            strict=self.strict,
        )
        second = momentum(
            rebuilt2,
            rebuilt1,
            self.weights,
            self.pressure,
            player2,
            player1,
            raw2.values,
            raw1.values,
            strict=self.strict,
        )
        return first, second

    def encode_matches(self, records):
        """Momentum pairs of every match, keyed by match_id in file order"""
        matches = group_matches(records)
        pairs = Parallel(n_jobs=self.n_jobs)(
            delayed(self.encode)(match) for match in matches.values()
        )
        return dict(zip(matches.keys(), pairs))
