"""Ranking metrics and ring recovery over externally supplied score files.

Conventions, fixed here and relied on by the tests:
  - AUC is the Mann-Whitney statistic with half credit for ties.
  - AP walks ranks ordered by (-score, id): stable id order breaks ties.
  - The F1 threshold is chosen on validation scores (candidates = distinct
    val scores, predict positive iff score >= t, argmax ties -> lowest t);
    macro-F1 is then reported on test. An empty-denominator F1 counts as 0.
  - A ring is recovered when at least 80% of members score strictly above
    the decision threshold; the fraction test uses exact integer math.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import norm, rankdata

from .errors import ConfigError, ValidationError
from .rings import RingRecord
from .schema import RING_TYPE_NAMES
from .split import PARTITIONS, SplitAssignment


def auc_roc(scores, labels) -> float:
    """P(score_pos > score_neg) + 0.5 * P(tie), via average ranks."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("AUC needs both classes present")
    ranks = rankdata(scores)
    rank_sum = float(ranks[labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def average_precision(scores, labels) -> float:
    """Mean over positives of precision at that positive's rank."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    n_pos = int((labels == 1).sum())
    if n_pos == 0:
        raise ValidationError("AP needs at least one positive")
    order = np.lexsort((np.arange(scores.size), -scores))
    sorted_labels = labels[order] == 1
    cum_pos = np.cumsum(sorted_labels)
    ranks = np.arange(1, scores.size + 1)
    precision_at_pos = cum_pos[sorted_labels] / ranks[sorted_labels]
    return float(precision_at_pos.mean())


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return 2.0 * tp / denom if denom else 0.0


def _positive_f1_curve(scores: np.ndarray, labels: np.ndarray,
                       thresholds: np.ndarray) -> np.ndarray:
    """Positive-class F1 at each threshold (predict 1 iff score >= t)."""
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order] == 1
    total_pos = int(sorted_labels.sum())
    # positives/negatives with score >= t, via suffix sums
    pos_cum = np.concatenate([[0], np.cumsum(sorted_labels)])
    idx = np.searchsorted(sorted_scores, thresholds, side="left")
    pos_ge = total_pos - pos_cum[idx]
    count_ge = scores.size - idx
    tp = pos_ge
    fp = count_ge - pos_ge
    fn = total_pos - tp
    denom = 2 * tp + fp + fn
    with np.errstate(invalid="ignore", divide="ignore"):
        f1 = np.where(denom > 0, 2.0 * tp / np.maximum(denom, 1), 0.0)
    return f1


def macro_f1_at_val_threshold(val_scores, val_labels, test_scores, test_labels):
    """Pick the F1-optimal threshold on val, report macro-F1 on test.

    Returns (macro_f1, threshold).
    """
    val_scores = np.asarray(val_scores, dtype=float)
    val_labels = np.asarray(val_labels)
    test_scores = np.asarray(test_scores, dtype=float)
    test_labels = np.asarray(test_labels)
    if np.unique(val_labels).size < 2:
        raise ValidationError("threshold selection needs both classes in val")

    thresholds = np.unique(val_scores)
    f1s = _positive_f1_curve(val_scores, val_labels, thresholds)
    best = int(np.flatnonzero(f1s == f1s.max())[0])  # ties -> lower threshold
    threshold = float(thresholds[best])

    pred = test_scores >= threshold
    actual = test_labels == 1
    tp = int((pred & actual).sum())
    fp = int((pred & ~actual).sum())
    fn = int((~pred & actual).sum())
    tn = int((~pred & ~actual).sum())
    macro = 0.5 * (_f1(tp, fp, fn) + _f1(tn, fn, fp))
    return macro, threshold


def wilson_interval(successes: int, trials: int, confidence: float = 0.90):
    """Two-sided Wilson score interval."""
    if trials < 1:
        raise ConfigError("wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise ConfigError(f"successes must be in [0, {trials}], got {successes}")
    if not 0.0 < confidence < 1.0:
        raise ConfigError("confidence must be in (0, 1)")
    z = float(norm.ppf((1.0 + confidence) / 2.0))
    n = trials
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


RECOVERY_MEMBER_FRACTION = 0.80  # >= this fraction of members above threshold


@dataclass(frozen=True)
class RecoveryRow:
    ring_type: str
    recovered: int
    total: int
    fraction: float
    wilson_low: float
    wilson_high: float


def ring_recovery(
    scores_by_user: dict[int, float],
    rings: list[RingRecord],
    assignment: SplitAssignment,
    threshold: float = 0.5,
    partition: str = "test",
    confidence: float = 0.90,
) -> list[RecoveryRow]:
    """Per-type recovery of rings in the given partition.

    A ring is recovered iff the number of members with score strictly above
    the threshold is at least 80% of its size (exact integer comparison).
    Every member of an eligible ring must be scored.
    """
    part_idx = PARTITIONS.index(partition)
    counts: dict[int, list[int]] = {t: [0, 0] for t in RING_TYPE_NAMES}
    for ring in rings:
        if assignment.ring_partition.get(ring.ring_id) != part_idx:
            continue
        flagged = 0
        for uid in ring.member_user_ids.tolist():
            if uid not in scores_by_user:
                raise ValidationError(
                    f"ring {ring.ring_id} member user {uid} has no score"
                )
            if scores_by_user[uid] > threshold:
                flagged += 1
        size = ring.size
        recovered = 10 * flagged >= int(round(RECOVERY_MEMBER_FRACTION * 10)) * size
        counts[ring.ring_type][0] += int(recovered)
        counts[ring.ring_type][1] += 1

    rows = []
    for ring_type, (recovered, total) in sorted(counts.items()):
        if total == 0:
            rows.append(RecoveryRow(RING_TYPE_NAMES[ring_type], 0, 0, 0.0, 0.0, 0.0))
            continue
        lo, hi = wilson_interval(recovered, total, confidence)
        rows.append(RecoveryRow(
            RING_TYPE_NAMES[ring_type], recovered, total,
            recovered / total, lo, hi,
        ))
    return rows


@dataclass
class MetricsReport:
    """Task 1 ranking metrics plus Task 2 ring recovery."""

    auc_roc: float
    average_precision: float
    macro_f1: float
    threshold: float
    recovery: list[RecoveryRow]

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"auc_roc            {self.auc_roc:.4f}\n")
        out.write(f"average_precision  {self.average_precision:.4f}\n")
        out.write(f"macro_f1           {self.macro_f1:.4f}\n")
        out.write(f"threshold          {self.threshold:.6f}\n")
        out.write("\nring recovery (test partition, score > 0.5, 80% member bar)\n")
        out.write(f"{'ring_type':<14}{'recovered':>10}{'total':>7}{'fraction':>10}"
                  f"{'wilson_90':>20}\n")
        for r in self.recovery:
            interval = f"[{r.wilson_low:.3f}, {r.wilson_high:.3f}]"
            out.write(f"{r.ring_type:<14}{r.recovered:>10}{r.total:>7}"
                      f"{r.fraction:>10.3f}{interval:>20}\n")
        return out.getvalue()

    def to_csv(self) -> str:
        lines = ["metric,value"]
        lines.append(f"auc_roc,{self.auc_roc!r}")
        lines.append(f"average_precision,{self.average_precision!r}")
        lines.append(f"macro_f1,{self.macro_f1!r}")
        lines.append(f"threshold,{self.threshold!r}")
        lines.append("ring_type,recovered,total,fraction,wilson_low,wilson_high")
        for r in self.recovery:
            lines.append(f"{r.ring_type},{r.recovered},{r.total},"
                         f"{r.fraction!r},{r.wilson_low!r},{r.wilson_high!r}")
        return "\n".join(lines) + "\n"


def evaluate_scores(
    scores_by_user: dict[int, float],
    labels: np.ndarray,
    rings: list[RingRecord],
    assignment: SplitAssignment,
) -> MetricsReport:
    """Score a prediction file: AUC/AP on test, F1 at the val threshold,
    ring recovery over test rings."""
    def _pull(partition: str):
        ids = assignment.users_in(partition)
        missing = [int(i) for i in ids if int(i) not in scores_by_user]
        if missing:
            raise ValidationError(
                f"score file is missing {len(missing)} {partition} user(s), "
                f"first missing ids: {missing[:5]}"
            )
        s = np.array([scores_by_user[int(i)] for i in ids], dtype=float)
        return s, labels[ids]

    test_scores, test_labels = _pull("test")
    val_scores, val_labels = _pull("val")
    macro, threshold = macro_f1_at_val_threshold(
        val_scores, val_labels, test_scores, test_labels)
    return MetricsReport(
        auc_roc=auc_roc(test_scores, test_labels),
        average_precision=average_precision(test_scores, test_labels),
        macro_f1=macro,
        threshold=threshold,
        recovery=ring_recovery(scores_by_user, rings, assignment),
    )


# ---------------------------------------------------------------------------
# score files: one row per user, "user_id<TAB>score"

def write_score_file(path: str | Path, scores_by_user: dict[int, float]) -> None:
    lines = [f"{uid}\t{score!r}" for uid, score in sorted(scores_by_user.items())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_score_file(path: str | Path) -> dict[int, float]:
    scores: dict[int, float] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 'user_id<TAB>score'")
        uid, score = int(parts[0]), float(parts[1])
        if not np.isfinite(score):
            raise ValidationError(f"{path}:{lineno}: score must be finite")
        scores[uid] = score
    return scores
