"""Dataset splitting, training loops, staged rounds, metrics, and reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tensor_nn as nn
from .models import Classifier

DEFAULT_FRACTIONS = (0.70, 0.15, 0.15)
DEFAULT_ROUNDS = ((5, 16), (10, 32), (15, 64))
EVAL_BATCH = 64


class TooFewVideos(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class NonFiniteLoss(FloatingPointError):
    pass


@dataclass
class SplitPlan:
    train: set
    validation: set
    test: set
    fractions: tuple = DEFAULT_FRACTIONS
    seed: int = 0

    def assert_valid(self, all_ids) -> None:
        all_ids = set(all_ids)
        parts = [self.train, self.validation, self.test]
        for i in range(3):
            for j in range(i + 1, 3):
                if parts[i] & parts[j]:
                    raise ValueError("split partitions overlap")
        if self.train | self.validation | self.test != all_ids:
            raise ValueError("split does not cover all video ids")


def split(video_labels: dict, fractions=DEFAULT_FRACTIONS, seed: int = 0) -> SplitPlan:
    """Shuffle videos with the seed, stratify by label, partition 70/15/15.

    Counts: validation and test get floor(fraction * N) globally, remainder
    goes to train. Within each count, videos are allocated per label by
    largest remainder so both partitions stay stratified. All segments and
    splices derived from one video inherit its partition: no leakage.
    """
    ids = list(video_labels)
    if len(ids) < 3:
        raise TooFewVideos(f"need at least 3 videos, got {len(ids)}")
    rng = np.random.default_rng(seed)

    by_label: dict[int, list] = {}
    for vid in ids:
        by_label.setdefault(video_labels[vid], []).append(vid)
    for group in by_label.values():
        rng.shuffle(group)

    total = len(ids)
    n_val = int(fractions[1] * total)
    n_test = int(fractions[2] * total)

    validation = _take_stratified(by_label, n_val, total)
    remaining = {lbl: g for lbl, g in by_label.items() if g}
    test = _take_stratified(remaining, n_test, total - n_val)
    train = {vid for group in by_label.values() for vid in group}

    plan = SplitPlan(train, validation, test, tuple(fractions), seed)
    plan.assert_valid(ids)
    return plan


def _take_stratified(by_label: dict, want: int, pool_size: int) -> set:
    """Remove `want` videos from the label groups, proportionally by size."""
    taken: set = set()
    if want == 0 or pool_size == 0:
        return taken
    labels = sorted(by_label)
    quotas = {}
    remainders = []
    for lbl in labels:
        exact = want * len(by_label[lbl]) / pool_size
        quotas[lbl] = int(exact)
        remainders.append((-(exact - int(exact)), lbl))
    shortfall = want - sum(quotas.values())
    for _, lbl in sorted(remainders):
        if shortfall == 0:
            break
        if quotas[lbl] < len(by_label[lbl]):
            quotas[lbl] += 1
            shortfall -= 1
    for lbl in labels:
        take = min(quotas[lbl], len(by_label[lbl]))
        for _ in range(take):
            taken.add(by_label[lbl].pop())
    return taken


# --- metrics ----------------------------------------------------------------

@dataclass
class EvalReport:
    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    roc_auc: float
    curves: list = field(default_factory=list)  # per-epoch dicts


def metrics(scores, labels, threshold: float = 0.5) -> EvalReport:
    """Confusion counts, the four rates, and ROC-AUC from scores and labels.

    Thresholding matches predict_label: score >= threshold classifies as fake.
    Zero-denominator precision/recall and P+R = 0 F1 default to 0.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise LengthMismatch(f"{scores.shape} scores vs {labels.shape} labels")
    if scores.size == 0:
        raise EmptyInput("no samples to evaluate")

    predicted = scores >= threshold
    actual = labels == 1
    tp = int(np.sum(predicted & actual))
    fp = int(np.sum(predicted & ~actual))
    tn = int(np.sum(~predicted & ~actual))
    fn = int(np.sum(~predicted & actual))

    accuracy = (tp + tn) / scores.size
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(tp, fp, tn, fn, accuracy, precision, recall, f1,
                      roc_auc(scores, labels))


def roc_auc(scores, labels) -> float:
    """Trapezoidal area under the ROC curve, averaging ranks across ties.

    Walks thresholds from high to low; a group of tied scores contributes one
    diagonal chord, whose trapezoid equals the rank-average tie convention.
    Degenerate single-class inputs return 0.5.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return 0.5
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    area = 0.0
    tpr_prev = fpr_prev = 0.0
    tp = fp = 0
    idx = 0
    while idx < scores.size:
        stop = idx
        while stop < scores.size and sorted_scores[stop] == sorted_scores[idx]:
            stop += 1
        tp += int(np.sum(sorted_labels[idx:stop] == 1))
        fp += (stop - idx) - int(np.sum(sorted_labels[idx:stop] == 1))
        tpr = tp / n_pos
        fpr = fp / n_neg
        area += (fpr - fpr_prev) * (tpr + tpr_prev) / 2.0
        tpr_prev, fpr_prev = tpr, fpr
        idx = stop
    return area


# --- training ---------------------------------------------------------------

def evaluate(model: Classifier, x: np.ndarray, y: np.ndarray,
             batch_size: int = EVAL_BATCH):
    """Inference-mode loss/accuracy/scores over a dataset, batched."""
    scores = np.empty(len(x))
    for start in range(0, len(x), batch_size):
        scores[start : start + batch_size] = model.forward(
            x[start : start + batch_size], training=False
        )
    loss, _ = nn.bce_loss(scores, np.asarray(y, dtype=np.float64))
    predicted = scores >= 0.5
    acc = float(np.mean(predicted == (np.asarray(y) == 1)))
    return loss, acc, scores


def train(model: Classifier, x_train, y_train, x_val, y_val, epochs: int,
          batch_size: int, lr: float = 0.0005, shuffle_rng=None,
          opt: nn.Adam | None = None, restore_best: bool = True) -> list[dict]:
    """Mini-batch Adam training with BCE; returns per-epoch curves.

    Each epoch logs train/validation loss and accuracy. When restore_best is
    set, the parameters with the lowest validation loss seen during this call
    are restored into the model before returning (overfitting guardrail).
    """
    if x_train.shape[0] != len(y_train):
        raise nn.ShapeMismatch("train features/labels length mismatch")
    shuffle_rng = shuffle_rng or np.random.default_rng(0)
    opt = opt or nn.Adam(model.params(), lr=lr)
    y_train = np.asarray(y_train, dtype=np.float64)

    curves = []
    best_loss = np.inf
    best_params = None
    for epoch in range(epochs):
        perm = shuffle_rng.permutation(len(x_train))
        total_loss = 0.0
        correct = 0
        for start in range(0, len(perm), batch_size):
            take = perm[start : start + batch_size]
            xb, yb = x_train[take], y_train[take]
            scores = model.forward(xb, training=True)
            loss, dscore = nn.bce_loss(scores, yb)
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"epoch {epoch}: loss is not finite")
            model.backward(dscore)
            opt.step(model.grads())
            total_loss += loss * len(take)
            correct += int(np.sum((scores >= 0.5) == (yb == 1)))
        val_loss, val_acc, _ = evaluate(model, x_val, y_val)
        curves.append({
            "epoch": epoch + 1,
            "train_loss": total_loss / len(x_train),
            "train_acc": correct / len(x_train),
            "val_loss": val_loss,
            "val_acc": val_acc,
        })
        if val_loss < best_loss:
            best_loss = val_loss
            best_params = {k: v.copy() for k, v in model.params().items()}
    if restore_best and best_params is not None:
        model.load_params(best_params)
    return curves


def cross_validate(model: Classifier, x_train, y_train, x_val, y_val,
                   rounds=DEFAULT_ROUNDS, lr: float = 0.0005,
                   shuffle_rng=None) -> tuple[list[dict], list[EvalReport]]:
    """Staged re-training rounds with growing epochs and batch sizes.

    This follows the staged "cross-validation" training regimen (not k-fold
    rotation): each round continues training the same parameters with its own
    (epochs, batch_size) and reports validation metrics. A single round is
    exactly equivalent to plain train().
    """
    if not rounds:
        raise ValueError("rounds must be nonempty")
    shuffle_rng = shuffle_rng or np.random.default_rng(0)
    opt = nn.Adam(model.params(), lr=lr)
    curves = []
    reports = []
    for epochs, batch_size in rounds:
        curves += train(model, x_train, y_train, x_val, y_val, epochs,
                        batch_size, lr=lr, shuffle_rng=shuffle_rng, opt=opt)
        _, _, val_scores = evaluate(model, x_val, y_val)
        reports.append(metrics(val_scores, np.asarray(y_val)))
    return curves, reports


# --- run report file --------------------------------------------------------
#
# Key-value header, one blank line, then tab-separated per-epoch rows. Floats
# are emitted with repr() so replays are byte-identical.

CURVE_COLUMNS = ("epoch", "train_loss", "train_acc", "val_loss", "val_acc")


def write_report(path, kind: str, seed: int, report: EvalReport) -> None:
    lines = [
        f"kind={kind}",
        f"seed={seed}",
        f"samples={report.tp + report.fp + report.tn + report.fn}",
        f"tp={report.tp}",
        f"fp={report.fp}",
        f"tn={report.tn}",
        f"fn={report.fn}",
        f"accuracy={report.accuracy!r}",
        f"precision={report.precision!r}",
        f"recall={report.recall!r}",
        f"f1={report.f1!r}",
        f"roc_auc={report.roc_auc!r}",
        "",
        "\t".join(CURVE_COLUMNS),
    ]
    for row in report.curves:
        lines.append("\t".join(repr(row[c]) if c != "epoch" else str(row[c])
                               for c in CURVE_COLUMNS))
    Path(path).write_text("\n".join(lines) + "\n")


def read_report(path) -> tuple[dict, list[dict]]:
    text = Path(path).read_text()
    header_part, _, curve_part = text.partition("\n\n")
    header = {}
    for line in header_part.splitlines():
        key, _, value = line.partition("=")
        header[key] = value
    curve_lines = curve_part.splitlines()
    curves = []
    for line in curve_lines[1:]:
        cells = line.split("\t")
        row = dict(zip(CURVE_COLUMNS, cells))
        curves.append({
            "epoch": int(row["epoch"]),
            "train_loss": float(row["train_loss"]),
            "train_acc": float(row["train_acc"]),
            "val_loss": float(row["val_loss"]),
            "val_acc": float(row["val_acc"]),
        })
    return header, curves
