"""Regression and classification metrics"""

from dataclasses import asdict, dataclass, field

import numpy as np

from tmsquared.display import print_warning
from tmsquared.errors import EmptyInputError, StructureError


def _pair(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise StructureError(f"{pred.size} predictions for {truth.size} truths")
    if pred.size == 0:
        raise EmptyInputError("no predictions to score")
    return pred, truth


def regression_metrics(pred, truth):
    """(mean squared error, mean absolute error)"""
    pred, truth = _pair(pred, truth)
    error = pred.astype(float) - truth.astype(float)
    return float(np.mean(error**2)), float(np.mean(np.abs(error)))


@dataclass(frozen=True)
class ConfusionCounts:
    """Binary confusion matrix"""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self):
        """Number of scored samples"""
        return self.tp + self.fp + self.tn + self.fn


def confusion_counts(pred, truth, positive=1):
    """Confusion counts of predicted against true labels"""
    pred, truth = _pair(pred, truth)
    predicted = pred == positive
    actual = truth == positive
    return ConfusionCounts(
        tp=int(np.sum(predicted & actual)),
        fp=int(np.sum(predicted & ~actual)),
        tn=int(np.sum(~predicted & ~actual)),
        fn=int(np.sum(~predicted & actual)),
    )


def _ratio(numerator, denominator, flag, flags):
    if denominator == 0:
        flags.append(flag)
        print_warning(f"{flag}: zero denominator, reported as 0", once_key=flag)
        return 0.0
    return numerator / denominator


def classification_metrics(pred, truth, positive=1):
    """Accuracy, precision, recall, F1 and zero-division flags"""
    counts = confusion_counts(pred, truth, positive)
    flags = []
    precision = _ratio(counts.tp, counts.tp + counts.fp, "precision", flags)
    recall = _ratio(counts.tp, counts.tp + counts.fn, "recall", flags)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", flags)
    return {
        "accuracy": (counts.tp + counts.tn) / counts.total,
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "flags": tuple(flags),
        "counts": counts,
    }


@dataclass(frozen=True)
class MetricsReport:
    """Scores of one model, per point unless named otherwise"""

    model: str
    mse: float
    mae: float
    accuracy: float
    precision: float
    recall: float
    f1: float
    match_accuracy: float
    samples: int
    seed: int = 0
    flags: tuple = field(default_factory=tuple)

    def as_dict(self):
        """JSON-able dict"""
        report = asdict(self)
        report["flags"] = list(self.flags)
        return report


SCORES = ("mse", "mae", "accuracy", "precision", "recall", "f1", "match_accuracy")


def mean_report(reports):
    """Average of reports of one model, summed samples, merged flags"""
    if not reports:
        raise EmptyInputError("no reports to average")
    means = {name: float(np.mean([getattr(r, name) for r in reports])) for name in SCORES}
    flags = sorted({flag for report in reports for flag in report.flags})
    return MetricsReport(
        model=reports[0].model,
        samples=sum(report.samples for report in reports),
        seed=reports[0].seed,
        flags=tuple(flags),
        **means,
    )
