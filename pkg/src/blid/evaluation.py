"""Confusion matrices and per-class / macro-averaged classification metrics.

Macro averaging (the unweighted mean over classes) is the reporting
convention throughout the toolkit.  A class that never occurs in either
gold or predictions is excluded from the macro mean; a class with a
zero denominator but a nonzero counterpart scores 0 for that metric.

All figures derive from small integer counts, so they are computed in
exact rational arithmetic and rounded to float once, when stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .corpus import TAGS, Tag
from .errors import ShapeError

__all__ = [
    "ConfusionMatrix",
    "ClassMetrics",
    "EvalReport",
    "confusion",
    "metrics",
    "evaluate_predictions",
    "averages",
    "format_report",
    "report_to_dict",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    """3x3 count matrix: rows are gold tags, columns predicted tags."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __getitem__(self, pair):
        gold, pred = pair
        return int(self.counts[int(gold), int(pred)])


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    per_class: dict[Tag, ClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float


def confusion(gold: Sequence[Tag], pred: Sequence[Tag]) -> ConfusionMatrix:
    """Count gold/predicted tag pairs."""
    if len(gold) != len(pred):
        raise ShapeError(f"gold and predictions differ in length: {len(gold)} vs {len(pred)}")
    if len(gold) == 0:
        raise ShapeError("cannot build a confusion matrix from zero items")
    counts = np.zeros((len(TAGS), len(TAGS)), dtype=np.int64)
    for g, p in zip(gold, pred):
        counts[int(g), int(p)] += 1
    return ConfusionMatrix(counts)


def metrics(matrix: ConfusionMatrix) -> EvalReport:
    """Per-class and macro precision/recall/F1 plus accuracy."""
    counts = matrix.counts
    if counts.sum() == 0:
        raise ShapeError("empty confusion matrix")
    per_class: dict[Tag, ClassMetrics] = {}
    included: list[tuple[Fraction, Fraction, Fraction]] = []
    for tag in TAGS:
        i = int(tag)
        tp = int(counts[i, i])
        gold_total = int(counts[i, :].sum())
        pred_total = int(counts[:, i].sum())
        if gold_total == 0 and pred_total == 0:
            per_class[tag] = ClassMetrics(0.0, 0.0, 0.0, 0)
            continue
        precision = Fraction(tp, pred_total) if pred_total else Fraction(0)
        recall = Fraction(tp, gold_total) if gold_total else Fraction(0)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else Fraction(0)
        per_class[tag] = ClassMetrics(float(precision), float(recall), float(f1), gold_total)
        included.append((precision, recall, f1))
    k = len(included)
    return EvalReport(
        per_class=per_class,
        macro_precision=float(sum(m[0] for m in included) / k),
        macro_recall=float(sum(m[1] for m in included) / k),
        macro_f1=float(sum(m[2] for m in included) / k),
        accuracy=float(Fraction(int(np.trace(counts)), int(counts.sum()))),
    )


def evaluate_predictions(gold: Sequence[Tag], pred: Sequence[Tag]) -> EvalReport:
    return metrics(confusion(gold, pred))


def averages(matrix: ConfusionMatrix, mode: str = "macro") -> tuple[float, float, float]:
    """(precision, recall, f1) under macro, micro or weighted averaging.

    Micro and weighted averaging exist for comparison runs; macro is the
    reporting default everywhere else.
    """
    report = metrics(matrix)
    if mode == "macro":
        return report.macro_precision, report.macro_recall, report.macro_f1
    counts = matrix.counts
    if mode == "micro":
        tp = float(np.trace(counts))
        p = r = tp / counts.sum()
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        return p, r, f1
    if mode == "weighted":
        total = counts.sum()
        p = sum(report.per_class[t].precision * report.per_class[t].support for t in TAGS) / total
        r = sum(report.per_class[t].recall * report.per_class[t].support for t in TAGS) / total
        f1 = sum(report.per_class[t].f1 * report.per_class[t].support for t in TAGS) / total
        return p, r, f1
    raise ValueError(f"unknown averaging mode {mode!r}")


def report_to_dict(report: EvalReport, model: str = "") -> dict:
    """JSON-ready report carrying full float precision."""
    return {
        "model": model,
        "per_class": {
            str(tag): {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for tag, m in report.per_class.items()
        },
        "macro": {
            "precision": report.macro_precision,
            "recall": report.macro_recall,
            "f1": report.macro_f1,
        },
        "accuracy": report.accuracy,
    }


def format_report(
    reports: EvalReport | Sequence[tuple[str, EvalReport]],
    style: str = "text-table",
) -> str:
    """Render one report (with per-class detail) or a model-comparison
    table with Precision/Recall/F1 columns, rounded to 2 decimals.
    JSON output keeps full precision."""
    rows: list[tuple[str, EvalReport]]
    if isinstance(reports, EvalReport):
        rows = [("", reports)]
        single = reports
    else:
        rows = list(reports)
        single = None

    if style == "json":
        if single is not None:
            return json.dumps(report_to_dict(single), indent=2)
        return json.dumps([report_to_dict(r, name) for name, r in rows], indent=2)
    if style != "text-table":
        raise ValueError(f"unknown report style {style!r}")

    if single is not None:
        lines = [f"{'class':<10}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"]
        for tag in TAGS:
            m = single.per_class[tag]
            lines.append(
                f"{str(tag):<10}{m.precision:>10.2f}{m.recall:>10.2f}{m.f1:>10.2f}{m.support:>10d}"
            )
        lines.append(
            f"{'macro':<10}{single.macro_precision:>10.2f}{single.macro_recall:>10.2f}"
            f"{single.macro_f1:>10.2f}{sum(m.support for m in single.per_class.values()):>10d}"
        )
        lines.append(f"accuracy  {single.accuracy:.2f}")
        return "\n".join(lines)

    width = max([len("model")] + [len(name) for name, _ in rows])
    lines = [f"{'model':<{width}}  {'precision':>9}  {'recall':>6}  {'f1':>4}"]
    for name, report in rows:
        lines.append(
            f"{name:<{width}}  {report.macro_precision:>9.2f}  "
            f"{report.macro_recall:>6.2f}  {report.macro_f1:>4.2f}"
        )
    return "\n".join(lines)
