"""Classification metrics and the perturbation-robustness sweep protocol.

Macro-F1 is the headline metric: real/fake benchmarks are imbalanced
enough that accuracy alone is misleading.  Per-class F1 with an empty
denominator is defined as 0; classes absent from the ground truth are
excluded from the macro mean (and the reports say so).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .imaging import apply_perturbation, spec_for_level
from .parallel import parallel_map

#: Sweep levels mirroring the reference robustness protocol.
DEFAULT_SWEEP_LEVELS = {
    "noise": (0.0, 0.1, 0.2),
    "jpeg": (100.0, 80.0, 60.0),
    "brightness": (1.0, 0.75, 0.5),
    "blur": (0.0, 2.0, 4.0),
}

MACRO_NOTE = "macro_f1 averages per-class f1 over classes present in the ground truth"


def confusion_matrix(truth, pred, num_classes: int) -> np.ndarray:
    """Counts with rows = truth, columns = prediction."""
    truth = np.asarray(truth, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if truth.shape != pred.shape:
        raise ValueError(f"length mismatch: {truth.shape} vs {pred.shape}")
    cm = np.zeros((num_classes, num_classes), dtype=np.int64)
    if truth.size == 0:
        return cm
    if truth.min() < 0 or truth.max() >= num_classes:
        raise ValueError(f"truth ids outside [0, {num_classes})")
    if pred.min() < 0 or pred.max() >= num_classes:
        raise ValueError(f"prediction ids outside [0, {num_classes})")
    np.add.at(cm, (truth, pred), 1)
    return cm


def accuracy(cm: np.ndarray) -> float:
    cm = np.asarray(cm)
    total = cm.sum()
    if total == 0:
        raise ValueError("empty confusion matrix")
    return float(np.trace(cm) / total)


def per_class_prf(cm: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-class (precision, recall, f1); any 0/0 ratio is defined as 0."""
    cm = np.asarray(cm, dtype=np.float64)
    diag = np.diag(cm)
    colsum = cm.sum(axis=0)
    rowsum = cm.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(colsum > 0, diag / colsum, 0.0)
        recall = np.where(rowsum > 0, diag / rowsum, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2.0 * precision * recall / np.where(pr > 0, pr, 1.0), 0.0)
    return precision, recall, f1


def macro_f1(cm: np.ndarray) -> float:
    """Unweighted mean of per-class F1 over classes present in the truth."""
    cm = np.asarray(cm)
    if cm.sum() == 0:
        raise ValueError("empty confusion matrix")
    _, _, f1 = per_class_prf(cm)
    present = cm.sum(axis=1) > 0
    return float(f1[present].mean())


@dataclass
class MetricsReport:
    confusion: np.ndarray
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    macro_f1: float

    @staticmethod
    def from_predictions(truth, pred, num_classes: int) -> "MetricsReport":
        cm = confusion_matrix(truth, pred, num_classes)
        p, r, f = per_class_prf(cm)
        return MetricsReport(
            confusion=cm,
            accuracy=accuracy(cm),
            precision=p,
            recall=r,
            f1=f,
            macro_f1=macro_f1(cm),
        )

    def to_json(self) -> dict:
        return {
            "note": MACRO_NOTE,
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "precision": self.precision.tolist(),
            "recall": self.recall.tolist(),
            "f1": self.f1.tolist(),
            "macro_f1": self.macro_f1,
        }


@dataclass
class SweepGrid:
    kind: str
    levels: list[float]
    reports: list[MetricsReport] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "levels": list(self.levels),
            "reports": [r.to_json() for r in self.reports],
        }


def robustness_sweep(
    images,
    truth,
    predict_fn,
    kind: str,
    levels=None,
    base_seed: int = 42,
    num_classes: int = 6,
    kernel: int = 5,
    jobs: int = 1,
) -> SweepGrid:
    """Evaluate a pipeline while one perturbation sweeps through levels.

    ``predict_fn`` maps a list of images to class ids.  Noise draws are
    seeded per record as base_seed + index, so sweeps reproduce exactly.
    """
    if levels is None:
        levels = DEFAULT_SWEEP_LEVELS[kind]
    levels = [float(v) for v in levels]
    if len(levels) == 0:
        raise ValueError("levels must be nonempty")
    diffs = np.diff(levels)
    if len(levels) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ValueError(f"levels must be strictly monotone, got {levels}")
    truth = np.asarray(truth, dtype=np.int64)
    if len(truth) != len(images):
        raise ValueError("images and truth lengths differ")

    def run_level(level: float) -> MetricsReport:
        perturbed = [
            apply_perturbation(
                img, spec_for_level(kind, level, seed=base_seed + idx, kernel=kernel)
            )
            for idx, img in enumerate(images)
        ]
        pred = np.asarray(predict_fn(perturbed), dtype=np.int64)
        return MetricsReport.from_predictions(truth, pred, num_classes)

    reports = parallel_map(run_level, levels, jobs=jobs)
    return SweepGrid(kind=kind, levels=levels, reports=list(reports))


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _sweep_csv(grid: SweepGrid) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    k = len(grid.reports[0].f1) if grid.reports else 0
    writer.writerow(["level", "accuracy", "macro_f1"] + [f"f1_class{i}" for i in range(k)])
    for level, rep in zip(grid.levels, grid.reports):
        writer.writerow([_fmt(level), _fmt(rep.accuracy), _fmt(rep.macro_f1)]
                        + [_fmt(v) for v in rep.f1])
    return buf.getvalue()


def _report_csv(report: MetricsReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    k = len(report.f1)
    writer.writerow(["accuracy", "macro_f1"] + [f"f1_class{i}" for i in range(k)])
    writer.writerow([_fmt(report.accuracy), _fmt(report.macro_f1)]
                    + [_fmt(v) for v in report.f1])
    return buf.getvalue()


def emit_report(obj: SweepGrid | MetricsReport, path) -> None:
    """Write a CSV (6 decimal places, stable columns) plus a JSON twin."""
    path = str(path)
    csv_text = _sweep_csv(obj) if isinstance(obj, SweepGrid) else _report_csv(obj)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text)
    json_path = path[:-4] + ".json" if path.endswith(".csv") else path + ".json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(obj.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
