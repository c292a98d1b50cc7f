"""Repeated 80/20 match-split comparison of TM² against the baselines"""

import json
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from rich.table import Table

from tmsquared.baselines import point_majority
from tmsquared.errors import ConfigError, DatasetTooSmallError, UnresolvedTieError
from tmsquared.forecast import ModelConfig, init_model
from tmsquared.ingest import group_matches
from tmsquared.metrics import (
    MetricsReport,
    classification_metrics,
    mean_report,
    regression_metrics,
)
from tmsquared.outcome import decide, simulate_match
from tmsquared.training import TrainConfig, make_windows, train

MIN_MATCHES = 10


@dataclass(frozen=True)
class BenchmarkConfig:
    """Benchmark protocol settings"""

    repetitions: int = 100
    train_fraction: float = 0.8
    split_seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not 0 < self.train_fraction < 1:
            raise ConfigError("train_fraction must be in (0, 1)")


@dataclass(frozen=True, eq=False)
class PointPredictions:
    """Predicted labels (1 = player 1 wins), continuous outputs and targets"""

    labels: np.ndarray
    truth: np.ndarray
    outputs: np.ndarray
    targets: np.ndarray
    match_winner: int


def _label_winner(labels, records, ranks):
    player1, player2 = records[0].player1, records[0].player2
    wins = float(np.sum(labels == 1))
    try:
        decision = decide(wins, float(len(labels)) - wins, player1, player2, ranks)
    except UnresolvedTieError:
        return 1
    return 1 if decision.winner == player1 else 2


class ProbabilityModel:
    """Adapter scoring a baseline that outputs player-1 win probabilities"""

    def __init__(self, baseline, ranks):
        self.baseline = baseline
        self.ranks = ranks
        self.name = baseline.name

    def fit(self, matches):
        """Fit the baseline on training matches"""
        self.baseline.fit(matches)
        return self

    def predict(self, records):
        """Point predictions for one test match"""
        probability = self.baseline.predict_proba(records)
        labels = np.where(probability >= 0.5, 1, 2)
        truth = np.array([record.point_victor for record in records[1:]])
        return PointPredictions(
            labels=labels,
            truth=truth,
            outputs=probability,
            targets=(truth == 1).astype(float),
            match_winner=_label_winner(labels, records, self.ranks),
        )


class TmSquaredModel:
    """Momentum encoder plus forecaster, trained on the training matches"""

    name = "tm2"

    def __init__(
        self,
        encoder,
        ranks,
        model_config=ModelConfig(),
        train_config=TrainConfig(),
        momentum_cache=None,
    ):
        self.encoder = encoder
        self.ranks = ranks
        self.model_config = model_config
        self.train_config = train_config
        self.momentum_cache = momentum_cache if momentum_cache is not None else {}
        self.model = None

    def _momentum(self, records):
        match_id = records[0].match_id
        if match_id not in self.momentum_cache:
            self.momentum_cache[match_id] = self.encoder.encode(records)
        return self.momentum_cache[match_id]

    def prepare(self, matches):
        """Encode every match once, before any split"""
        pending = [
            records
            for records in matches.values()
            if records[0].match_id not in self.momentum_cache
        ]
        if pending:
            encoded = self.encoder.encode_matches(
                [record for records in pending for record in records]
            )
            self.momentum_cache.update(encoded)

    def fit(self, matches):
        """Train one global forecaster on both players' momentum windows"""
        windows = []
        targets = []
        for records in matches:
            for series in self._momentum(records):
                match_windows, match_targets = make_windows(
                    series.values, self.model_config.window
                )
                windows.append(match_windows)
                targets.append(match_targets)
        model = init_model(self.model_config, self.train_config.seed)
        self.model, _ = train(
            model, np.vstack(windows), np.concatenate(targets), self.train_config
        )
        return self

    def predict(self, records):
        """Point predictions for one test match"""
        simulation = simulate_match(
            self.model, records, self.encoder, self.ranks, self._momentum(records)
        )
        labels = np.array(
            [1 if winner == simulation.player_i else 2 for winner in simulation.predicted]
        )
        return PointPredictions(
            labels=labels,
            truth=np.array([record.point_victor for record in records[1:]]),
            outputs=np.concatenate([simulation.forecast_i, simulation.forecast_j]),
            targets=np.concatenate([simulation.realized_i, simulation.realized_j]),
            match_winner=1 if simulation.winner.winner == simulation.player_i else 2,
        )


def split_matches(match_ids, rng, train_fraction=0.8):
    """Random split of match ids into (train, test)"""
    order = rng.permutation(len(match_ids))
    cut = int(round(train_fraction * len(match_ids)))
    cut = min(max(cut, 1), len(match_ids) - 1)
    return (
        [match_ids[index] for index in sorted(order[:cut])],
        [match_ids[index] for index in sorted(order[cut:])],
    )


def _score(model, test_matches, seed):
    predictions = [model.predict(records) for records in test_matches]
    labels = np.concatenate([p.labels for p in predictions])
    truth = np.concatenate([p.truth for p in predictions])
    mse, mae = regression_metrics(
        np.concatenate([p.outputs for p in predictions]),
        np.concatenate([p.targets for p in predictions]),
    )
    scores = classification_metrics(labels, truth, positive=1)
    decided = [
        (p.match_winner, point_majority(records))
        for p, records in zip(predictions, test_matches)
        if point_majority(records) is not None
    ]
    match_accuracy = (
        float(np.mean([predicted == actual for predicted, actual in decided]))
        if decided
        else 0.0
    )
    return MetricsReport(
        model=model.name,
        mse=mse,
        mae=mae,
        accuracy=scores["accuracy"],
        precision=scores["precision"],
        recall=scores["recall"],
        f1=scores["f1"],
        match_accuracy=match_accuracy,
        samples=len(labels),
        seed=seed,
        flags=scores["flags"],
    )


def run_repetition(matches, models, repetition, config):
    """Fit every model on one split and score it on the held-out matches"""
    rng = np.random.default_rng([config.split_seed, repetition])
    train_ids, test_ids = split_matches(list(matches), rng, config.train_fraction)
    reports = []
    for model in models:
        model.fit([matches[match_id] for match_id in train_ids])
        reports.append(
            _score(model, [matches[match_id] for match_id in test_ids], repetition)
        )
    return reports


@dataclass(frozen=True, eq=False)
class BenchmarkResult:
    """Mean report per model plus every repetition's reports"""

    reports: dict
    repetitions: list


def benchmark(records, models, config=BenchmarkConfig()):
    """Mean metrics per model over repeated random 80/20 match splits"""
    matches = group_matches(records)
    if len(matches) < MIN_MATCHES:
        raise DatasetTooSmallError(
            f"{len(matches)} matches, the benchmark needs at least {MIN_MATCHES}"
        )
    for model in models:
        if hasattr(model, "prepare"):
            model.prepare(matches)
    repetitions = Parallel(n_jobs=config.n_jobs)(
        delayed(run_repetition)(matches, models, repetition, config)
        for repetition in range(config.repetitions)
    )
    reports = {
        model.name: replace(
            mean_report([reports[index] for reports in repetitions]),
            seed=config.split_seed,
        )
        for index, model in enumerate(models)
    }
    return BenchmarkResult(reports, repetitions)


def write_report_json(result, path):
    """Write the mean reports as JSON"""
    document = {name: report.as_dict() for name, report in result.reports.items()}
    with open(path, "w", encoding="utf-8") as report_file:
        json.dump(document, report_file, indent=2, sort_keys=True)
        report_file.write("\n")


def write_repetitions_csv(result, path):
    """Write every repetition's report as one CSV row"""
    rows = []
    for repetition, reports in enumerate(result.repetitions):
        for report in reports:
            row = report.as_dict()
            row["repetition"] = repetition
            row["flags"] = ";".join(report.flags)
            rows.append(row)
    pd.DataFrame(rows).to_csv(path, index=False)


def report_table(result):
    """Rich table of the mean reports"""
    table = Table(title="Benchmark")
    table.add_column("model")
    for name in ("mse", "mae", "accuracy", "precision", "recall", "f1", "match acc."):
        table.add_column(name, justify="right")
    for name, report in result.reports.items():
        table.add_row(
            name,
            f"{report.mse:.4f}",
            f"{report.mae:.4f}",
            f"{report.accuracy:.4f}",
            f"{report.precision:.4f}",
            f"{report.recall:.4f}",
            f"{report.f1:.4f}",
            f"{report.match_accuracy:.4f}",
        )
    return table


def _sweep_run(matches, train_ids, test_ids, model, run):
    model.fit([matches[match_id] for match_id in train_ids])
    report = _score(model, [matches[match_id] for match_id in test_ids], run)
    return model.model_config.window, run, report.mse, report.mae


def sweep(
    records,
    encoder,
    ranks,
    windows,
    model_config=ModelConfig(),
    train_config=TrainConfig(),
    runs=10,
    config=BenchmarkConfig(),
):
    """Mean forecast MSE and MAE per window length on one train/test split

    Every window length is trained `runs` times with seeds train_config.seed,
    train_config.seed + 1, ... and scored on the same held-out matches.
    Returns one row per window: window, runs, mse, mae, mse_std, mae_std.
    """
    windows = sorted(set(int(window) for window in windows))
    if not windows:
        raise ConfigError("at least one window length is needed")
    if runs < 1:
        raise ConfigError(f"runs must be >= 1, got {runs}")
    matches = group_matches(records)
    if len(matches) < MIN_MATCHES:
        raise DatasetTooSmallError(
            f"{len(matches)} matches, the sweep needs at least {MIN_MATCHES}"
        )
    rng = np.random.default_rng([config.split_seed, 0])
    train_ids, test_ids = split_matches(list(matches), rng, config.train_fraction)
    cache = {}
    TmSquaredModel(encoder, ranks, momentum_cache=cache).prepare(matches)
    models = [
        (
            TmSquaredModel(
                encoder,
                ranks,
                replace(model_config, window=window),
                replace(train_config, seed=train_config.seed + run),
                momentum_cache=cache,
            ),
            run,
        )
        for window in windows
        for run in range(runs)
    ]
    rows = Parallel(n_jobs=config.n_jobs)(
        delayed(_sweep_run)(matches, train_ids, test_ids, model, run)
        for model, run in models
    )
    table = pd.DataFrame(rows, columns=["window", "run", "mse", "mae"])
    summary = table.groupby("window").agg(
        runs=("run", "count"),
        mse=("mse", "mean"),
        mae=("mae", "mean"),
        mse_std=("mse", "std"),
        mae_std=("mae", "std"),
    )
    return summary.fillna(0.0).reset_index()


def write_sweep_csv(summary, path):
    """Write the per-window sweep summary as CSV"""
    summary.to_csv(path, index=False)
