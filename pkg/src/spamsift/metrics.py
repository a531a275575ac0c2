"""Confusion-matrix evaluation and k-fold cross-validation.

Spam is the positive class throughout. Metrics with a zero denominator
evaluate to 0 and raise a degenerate flag instead of dividing by zero,
so reports always stay numeric.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass

from .chaid import ChaidConfig, ChaidTree, grow_tree, predict
from .dataset import Dataset, k_fold
from .errors import ValidationError
from .features import Label


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp,
                               self.tn + other.tn, self.fn + other.fn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0


def evaluate(tree: ChaidTree, test: Dataset) -> ConfusionMatrix:
    """Predict every record and tally against its true label."""
    tp = fp = tn = fn = 0
    for record in test.records:
        if record.label is Label.UNLABELED:
            raise ValidationError(f"record {record.url} is unlabeled")
        predicted_spam = predict(tree, record).label == "spam"
        actual_spam = record.label is Label.SPAM
        if predicted_spam and actual_spam:
            tp += 1
        elif predicted_spam:
            fp += 1
        elif actual_spam:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def precision(cm: ConfusionMatrix) -> float:
    return cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0


def recall(cm: ConfusionMatrix) -> float:
    return cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0


def f_measure(cm: ConfusionMatrix) -> float:
    p, r = precision(cm), recall(cm)
    return 2 * p * r / (p + r) if p + r else 0.0


@dataclass(frozen=True)
class MetricSummary:
    precision: float
    recall: float
    f_measure: float
    degenerate: frozenset[str]

    @classmethod
    def from_matrix(cls, cm: ConfusionMatrix) -> "MetricSummary":
        degenerate = set()
        if cm.tp + cm.fp == 0:
            degenerate.add("precision")
        if cm.tp + cm.fn == 0:
            degenerate.add("recall")
        if precision(cm) + recall(cm) == 0:
            degenerate.add("f_measure")
        return cls(precision=precision(cm), recall=recall(cm),
                   f_measure=f_measure(cm), degenerate=frozenset(degenerate))


@dataclass(frozen=True)
class FoldResult:
    fold: int
    matrix: ConfusionMatrix
    metrics: MetricSummary


@dataclass(frozen=True)
class CrossValidationResult:
    folds: tuple[FoldResult, ...]

    def mean(self, metric: str) -> float:
        return statistics.fmean(getattr(f.metrics, metric) for f in self.folds)

    def stdev(self, metric: str) -> float:
        values = [getattr(f.metrics, metric) for f in self.folds]
        return statistics.stdev(values) if len(values) > 1 else 0.0

    def pooled_matrix(self) -> ConfusionMatrix:
        total = ConfusionMatrix()
        for fold in self.folds:
            total = total + fold.matrix
        return total


def cross_validate(dataset: Dataset, config: ChaidConfig, k: int,
                   seed: int) -> CrossValidationResult:
    """Train on k-1 folds, test on the held-out one, for each fold in turn."""
    plan = k_fold(dataset, k, seed)
    folds = []
    for fold in range(k):
        train = dataset.subset(plan.train_indices(fold))
        test = dataset.subset(plan.test_indices(fold))
        tree = grow_tree(train, config)
        cm = evaluate(tree, test)
        folds.append(FoldResult(fold=fold, matrix=cm,
                                metrics=MetricSummary.from_matrix(cm)))
    return CrossValidationResult(folds=tuple(folds))


def metrics_csv(result: CrossValidationResult) -> str:
    """Per-fold report plus mean and stdev summary rows."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["fold", "precision", "recall", "f_measure", "tp", "fp", "tn", "fn"])
    for fold in result.folds:
        writer.writerow([
            fold.fold,
            f"{fold.metrics.precision:.6f}",
            f"{fold.metrics.recall:.6f}",
            f"{fold.metrics.f_measure:.6f}",
            fold.matrix.tp, fold.matrix.fp, fold.matrix.tn, fold.matrix.fn,
        ])
    pooled = result.pooled_matrix()
    writer.writerow([
        "mean",
        f"{result.mean('precision'):.6f}",
        f"{result.mean('recall'):.6f}",
        f"{result.mean('f_measure'):.6f}",
        pooled.tp, pooled.fp, pooled.tn, pooled.fn,
    ])
    writer.writerow([
        "stdev",
        f"{result.stdev('precision'):.6f}",
        f"{result.stdev('recall'):.6f}",
        f"{result.stdev('f_measure'):.6f}",
        "", "", "", "",
    ])
    return buffer.getvalue()
