"""Evaluation metrics for single-label and multi-label classification.

Zero-denominator convention: precision, recall and F1 fall back to 0.0
and the condition is recorded in the report's ``degenerate`` list.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MetricError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def precision_undefined(self) -> bool:
        return self.tp + self.fp == 0

    @property
    def recall_undefined(self) -> bool:
        return self.tp + self.fn == 0


def _pair(y_true, y_pred):
    yt, yp = np.asarray(y_true), np.asarray(y_pred)
    if yt.shape != yp.shape:
        raise MetricError(f"shape mismatch: {yt.shape} vs {yp.shape}")
    if yt.size == 0:
        raise MetricError("empty input")
    return yt, yp


def confusion(y_true, y_pred, cls: int) -> ConfusionCounts:
    """One-vs-rest counts for class ``cls``."""
    yt, yp = _pair(y_true, y_pred)
    t, p = yt == cls, yp == cls
    return ConfusionCounts(
        tp=int(np.sum(t & p)), fp=int(np.sum(~t & p)),
        fn=int(np.sum(t & ~p)), tn=int(np.sum(~t & ~p)),
    )


def precision(c: ConfusionCounts) -> float:
    denom = c.tp + c.fp
    return c.tp / denom if denom else 0.0


def recall(c: ConfusionCounts) -> float:
    denom = c.tp + c.fn
    return c.tp / denom if denom else 0.0


def f1(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def accuracy(y_true, y_pred) -> float:
    yt, yp = _pair(y_true, y_pred)
    if yt.ndim > 1:
        return float(np.mean(np.all(yt == yp, axis=tuple(range(1, yt.ndim)))))
    return float(np.mean(yt == yp))


def weighted_average(values: Sequence[float], supports: Sequence[float]) -> float:
    v = np.asarray(values, dtype=np.float64)
    s = np.asarray(supports, dtype=np.float64)
    if v.shape != s.shape:
        raise MetricError("values and supports differ in length")
    total = s.sum()
    if total <= 0:
        raise MetricError("total support is zero")
    keep = s > 0
    return float(np.dot(v[keep], s[keep]) / total)


def _label_matrices(Y_true, Y_pred):
    T = np.asarray(Y_true).astype(bool)
    P = np.asarray(Y_pred).astype(bool)
    if T.ndim != 2 or T.shape != P.shape:
        raise MetricError(f"label matrices must share a 2-D shape, got {T.shape} vs {P.shape}")
    if T.shape[0] == 0:
        raise MetricError("empty input")
    return T, P


@dataclass(frozen=True)
class SampleAverage:
    precision: float
    recall: float
    f1: float
    empty_predictions: int = 0
    empty_truths: int = 0


def sample_average_prf(Y_true, Y_pred) -> SampleAverage:
    """Per-instance precision/recall/F1 over label sets, averaged over instances."""
    T, P = _label_matrices(Y_true, Y_pred)
    inter = np.sum(T & P, axis=1).astype(np.float64)
    n_pred = P.sum(axis=1)
    n_true = T.sum(axis=1)
    p = np.divide(inter, n_pred, out=np.zeros_like(inter), where=n_pred > 0)
    r = np.divide(inter, n_true, out=np.zeros_like(inter), where=n_true > 0)
    s = p + r
    f = np.divide(2 * p * r, s, out=np.zeros_like(s), where=s > 0)
    return SampleAverage(float(p.mean()), float(r.mean()), float(f.mean()),
                         int(np.sum(n_pred == 0)), int(np.sum(n_true == 0)))


def hamming_loss(Y_true, Y_pred) -> float:
    T, P = _label_matrices(Y_true, Y_pred)
    return float(np.mean(T != P))


def hamming_score(Y_true, Y_pred) -> float:
    """Mean per-instance |T & P| / |T | P|; empty-vs-empty counts as 1."""
    T, P = _label_matrices(Y_true, Y_pred)
    inter = np.sum(T & P, axis=1).astype(np.float64)
    union = np.sum(T | P, axis=1).astype(np.float64)
    score = np.divide(inter, union, out=np.ones_like(inter), where=union > 0)
    return float(score.mean())


def auc_roc(scores, y) -> float:
    """Mann-Whitney estimate of P(score_pos > score_neg), ties counting one half."""
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(y).astype(bool)
    if s.shape != t.shape or s.ndim != 1:
        raise MetricError("scores and labels must be 1-D and of equal length")
    n_pos, n_neg = int(t.sum()), int((~t).sum())
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC is undefined when only one class is present")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s))
    sorted_s = s[order]
    # average ranks over tied groups
    starts = np.flatnonzero(np.r_[True, sorted_s[1:] != sorted_s[:-1]])
    ends = np.r_[starts[1:], len(s)]
    for a, b in zip(starts, ends):
        ranks[order[a:b]] = (a + 1 + b) / 2.0
    u = ranks[t].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_curve(scores, y) -> tuple[np.ndarray, np.ndarray]:
    """(false positive rate, true positive rate) at every distinct threshold."""
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(y).astype(bool)
    order = np.argsort(-s, kind="mergesort")
    s, t = s[order], t[order]
    last = np.r_[np.flatnonzero(s[1:] != s[:-1]), len(s) - 1]
    tps = np.cumsum(t)[last]
    fps = np.cumsum(~t)[last]
    tpr = np.r_[0.0, tps / max(t.sum(), 1)]
    fpr = np.r_[0.0, fps / max((~t).sum(), 1)]
    return fpr, tpr


def auc_trapezoid(scores, y) -> float:
    fpr, tpr = roc_curve(scores, y)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


# --- reports -----------------------------------------------------------------

@dataclass
class ClassRow:
    name: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class ClassReport:
    rows: list[ClassRow]
    accuracy: float
    n_instances: int
    macro: ClassRow
    weighted: ClassRow
    degenerate: list[str] = field(default_factory=list)

    def to_text(self, digits: int = 2) -> str:
        return format_report(self, digits)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "precision", "recall", "f1", "support"])
        for r in self.rows:
            w.writerow([r.name, repr(r.precision), repr(r.recall), repr(r.f1), r.support])
        w.writerow(["accuracy", "", "", repr(self.accuracy), self.n_instances])
        for r in (self.macro, self.weighted):
            w.writerow([r.name, repr(r.precision), repr(r.recall), repr(r.f1), r.support])
        return buf.getvalue()

    def to_dict(self) -> dict:
        def row(r):
            return {"name": r.name, "precision": r.precision, "recall": r.recall,
                    "f1": r.f1, "support": r.support}
        return {
            "rows": [row(r) for r in self.rows],
            "accuracy": self.accuracy,
            "n_instances": self.n_instances,
            "macro": row(self.macro),
            "weighted": row(self.weighted),
            "degenerate": list(self.degenerate),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassReport":
        def row(r):
            return ClassRow(r["name"], r["precision"], r["recall"], r["f1"], r["support"])
        return cls([row(r) for r in d["rows"]], d["accuracy"], d["n_instances"],
                   row(d["macro"]), row(d["weighted"]), list(d["degenerate"]))


def classification_report(y_true, y_pred, names: Sequence[str]) -> ClassReport:
    """Per-class precision/recall/F1/support plus accuracy, macro and weighted rows."""
    yt, yp = _pair(y_true, y_pred)
    names = list(names)
    rows, degenerate = [], []
    for c, name in enumerate(names):
        cc = confusion(yt, yp, c)
        p, r = precision(cc), recall(cc)
        if cc.precision_undefined:
            degenerate.append(f"{name}:precision")
        if cc.recall_undefined:
            degenerate.append(f"{name}:recall")
        rows.append(ClassRow(name, p, r, f1(p, r), cc.tp + cc.fn))
    supports = [r.support for r in rows]
    n = int(len(yt))

    def avg(attr, weighted):
        vals = [getattr(r, attr) for r in rows]
        if weighted:
            return weighted_average(vals, supports)
        return float(np.mean(vals))

    macro = ClassRow("macro avg", avg("precision", False), avg("recall", False), avg("f1", False), n)
    weighted = ClassRow("weighted avg", avg("precision", True), avg("recall", True), avg("f1", True), n)
    return ClassReport(rows, accuracy(yt, yp), n, macro, weighted, degenerate)


def format_report(report: ClassReport, digits: int = 2) -> str:
    """Aligned text: per-class rows, a blank line, then accuracy/macro/weighted rows."""
    headers = ["precision", "recall", "f1-score", "support"]
    labels = [r.name for r in report.rows] + ["weighted avg"]
    width = max(max(len(x) for x in labels), len("weighted avg"), digits)
    head = " " * width + " " + " ".join(f"{h:>9}" for h in headers)
    lines = [head, ""]
    fmt = "{:>{w}} {:>9.{d}f} {:>9.{d}f} {:>9.{d}f} {:>9}"
    for r in report.rows:
        lines.append(fmt.format(r.name, r.precision, r.recall, r.f1, r.support, w=width, d=digits))
    lines.append("")
    lines.append("{:>{w}} {:>9} {:>9} {:>9.{d}f} {:>9}".format(
        "accuracy", "", "", report.accuracy, report.n_instances, w=width, d=digits))
    for r in (report.macro, report.weighted):
        lines.append(fmt.format(r.name, r.precision, r.recall, r.f1, r.support, w=width, d=digits))
    return "\n".join(lines) + "\n"


@dataclass
class MultiLabelReport:
    label_names: list[str]
    per_label_accuracy: list[float]
    per_label_precision: list[float]
    per_label_recall: list[float]
    per_label_f1: list[float]
    per_label_support: list[int]
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    support: int
    sample_precision: float
    sample_recall: float
    sample_f1: float
    per_label_auc: list[float | None]
    weighted_auc: float | None
    macro_auc: float | None
    hamming_score: float
    hamming_loss: float
    subset_accuracy: float
    empty_predictions: int
    degenerate: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "MultiLabelReport":
        return cls(**d)


def per_label_accuracy(Y_true, Y_pred) -> np.ndarray:
    T, P = _label_matrices(Y_true, Y_pred)
    return np.mean(T == P, axis=0)


def multilabel_report(Y_true, Y_pred, scores, names: Sequence[str]) -> MultiLabelReport:
    """Every multi-label quantity for one prediction matrix.

    ``scores`` is an (instances x labels) matrix of positive-class scores
    used for AUC. Labels whose test column holds a single class get no AUC
    and are skipped in the AUC averages.
    """
    T, P = _label_matrices(Y_true, Y_pred)
    S = np.asarray(scores, dtype=np.float64)
    if S.shape != T.shape:
        raise MetricError(f"score matrix shape {S.shape} != label shape {T.shape}")
    names = list(names)
    if len(names) != T.shape[1]:
        raise MetricError("label names do not match the label matrix width")
    degenerate = []
    precs, recs, f1s, sups, aucs = [], [], [], [], []
    for j, name in enumerate(names):
        cc = confusion(T[:, j], P[:, j], True)
        p, r = precision(cc), recall(cc)
        if cc.precision_undefined:
            degenerate.append(f"{name}:precision")
        if cc.recall_undefined:
            degenerate.append(f"{name}:recall")
        precs.append(p)
        recs.append(r)
        f1s.append(f1(p, r))
        sups.append(cc.tp + cc.fn)
        if 0 < T[:, j].sum() < T.shape[0]:
            aucs.append(auc_roc(S[:, j], T[:, j]))
        else:
            aucs.append(None)
            degenerate.append(f"{name}:auc")
    total = sum(sups)
    if total == 0:
        raise MetricError("no positive labels in the evaluation set")
    wp = weighted_average(precs, sups)
    wr = weighted_average(recs, sups)
    wf = weighted_average(f1s, sups)
    auc_vals = [(a, s) for a, s in zip(aucs, sups) if a is not None]
    if auc_vals:
        weighted_auc = weighted_average([a for a, _ in auc_vals], [s for _, s in auc_vals])
        macro_auc = float(np.mean([a for a, _ in auc_vals]))
    else:
        weighted_auc = macro_auc = None
    sa = sample_average_prf(T, P)
    if sa.empty_predictions:
        degenerate.append(f"sample:empty_predictions={sa.empty_predictions}")
    return MultiLabelReport(
        label_names=names,
        per_label_accuracy=[float(a) for a in per_label_accuracy(T, P)],
        per_label_precision=precs,
        per_label_recall=recs,
        per_label_f1=f1s,
        per_label_support=[int(s) for s in sups],
        weighted_precision=wp,
        weighted_recall=wr,
        weighted_f1=wf,
        support=int(total),
        sample_precision=sa.precision,
        sample_recall=sa.recall,
        sample_f1=sa.f1,
        per_label_auc=aucs,
        weighted_auc=weighted_auc,
        macro_auc=macro_auc,
        hamming_score=hamming_score(T, P),
        hamming_loss=hamming_loss(T, P),
        subset_accuracy=accuracy(T, P),
        empty_predictions=sa.empty_predictions,
        degenerate=degenerate,
    )
