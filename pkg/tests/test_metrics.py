"""Test scores"""

import numpy as np
import pytest

from tmsquared.errors import EmptyInputError, StructureError
from tmsquared.metrics import (
    MetricsReport,
    classification_metrics,
    confusion_counts,
    mean_report,
    regression_metrics,
)


def test_regression_metrics():
    """MSE and MAE"""
    mse, mae = regression_metrics([1.0, 2.0, 4.0], [1.0, 3.0, 2.0])
    assert mse == pytest.approx(5.0 / 3.0)
    assert mae == pytest.approx(1.0)


def test_confusion_counts():
    """Counts against the positive label"""
    counts = confusion_counts([1, 1, 2, 2, 1], [1, 2, 2, 1, 1])
    assert (counts.tp, counts.fp, counts.tn, counts.fn) == (2, 1, 1, 1)
    assert counts.total == 5


def test_classification_metrics():
    """Accuracy, precision, recall and F1"""
    scores = classification_metrics([1, 1, 2, 2, 1], [1, 2, 2, 1, 1])
    assert scores["accuracy"] == pytest.approx(0.6)
    assert scores["precision"] == pytest.approx(2 / 3)
    assert scores["recall"] == pytest.approx(2 / 3)
    assert scores["f1"] == pytest.approx(2 / 3)
    assert scores["flags"] == ()


def test_zero_division_flagged(capsys, monkeypatch):
    """Never predicting the positive label reports 0 with a flag"""
    monkeypatch.setattr("tmsquared.display._warned", set())
    scores = classification_metrics([2, 2, 2], [1, 2, 2])
    assert scores["precision"] == 0.0
    assert scores["f1"] == 0.0
    assert "precision" in scores["flags"]
    assert "recall" not in scores["flags"]
    assert "Warning" in capsys.readouterr().out


def test_shape_and_empty_errors():
    """Mismatched and empty inputs"""
    with pytest.raises(StructureError):
        regression_metrics([1.0], [1.0, 2.0])
    with pytest.raises(EmptyInputError):
        classification_metrics([], [])


def _report(accuracy, flags=()):
    return MetricsReport(
        model="m",
        mse=1.0,
        mae=1.0,
        accuracy=accuracy,
        precision=0.5,
        recall=0.5,
        f1=0.5,
        match_accuracy=1.0,
        samples=10,
        flags=flags,
    )


def test_mean_report():
    """Scores averaged, samples summed, flags merged"""
    report = mean_report([_report(0.5, ("f1",)), _report(0.7, ("precision",))])
    assert report.accuracy == pytest.approx(0.6)
    assert report.samples == 20
    assert report.flags == ("f1", "precision")
    assert report.as_dict()["flags"] == ["f1", "precision"]
    with pytest.raises(EmptyInputError):
        mean_report([])


def _recount(pred, truth):
    tp = fp = tn = fn = 0
    for predicted, actual in zip(pred, truth):
        if predicted == 1 and actual == 1:
            tp += 1
        elif predicted == 1:
            fp += 1
        elif actual == 1:
            fn += 1
        else:
            tn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return (tp + tn) / len(pred), precision, recall, f1


def test_metrics_match_a_recount():
    """Random label vectors score exactly as a loop over the pairs"""
    rng = np.random.default_rng(21)
    for _ in range(1000):
        size = int(rng.integers(1, 30))
        pred = rng.integers(1, 3, size)
        truth = rng.integers(1, 3, size)
        scores = classification_metrics(pred, truth)
        expected = _recount(pred, truth)
        assert (
            scores["accuracy"],
            scores["precision"],
            scores["recall"],
            scores["f1"],
        ) == expected


def test_metrics_ignore_order():
    """Shuffling prediction and truth pairs together changes no score"""
    rng = np.random.default_rng(22)
    pred = rng.integers(1, 3, 200)
    truth = rng.integers(1, 3, 200)
    outputs = rng.normal(size=200)
    targets = rng.normal(size=200)
    scores = classification_metrics(pred, truth)
    errors = regression_metrics(outputs, targets)
    for _ in range(10):
        order = rng.permutation(200)
        shuffled = classification_metrics(pred[order], truth[order])
        assert shuffled["counts"] == scores["counts"]
        for name in ("accuracy", "precision", "recall", "f1"):
            assert shuffled[name] == scores[name]
        assert regression_metrics(outputs[order], targets[order]) == pytest.approx(
            errors, rel=1e-12
        )
