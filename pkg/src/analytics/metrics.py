"""Run metrics: localisation error, detections over time and confidence intervals across seeds"""
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.optimize import linear_sum_assignment

if TYPE_CHECKING:
    from experiments.runner import RunRecord

CONFIDENCE = 0.95


def match_found(found: np.ndarray, truth: np.ndarray, penalty: float) -> Tuple[np.ndarray, np.ndarray]:
    """Minimum-cost one-to-one matching with squared distances capped at penalty^2.

    Returns, per found target, the matched truth index (-1 when unmatched or
    farther than penalty) and the distance charged to it.
    """
    found = np.asarray(found, dtype=float).reshape(-1, 3)
    truth = np.asarray(truth, dtype=float).reshape(-1, 3)
    index = np.full(found.shape[0], -1, dtype=int)
    charged = np.full(found.shape[0], float(penalty))
    if found.shape[0] == 0 or truth.shape[0] == 0:
        return index, charged
    distance = np.linalg.norm(found[:, None, :] - truth[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(np.minimum(distance ** 2, penalty ** 2))
    for r, c in zip(rows, cols):
        if distance[r, c] <= penalty:
            index[r] = c
            charged[r] = distance[r, c]
    return index, charged


def rmse_found(found: np.ndarray, truth: np.ndarray, penalty: float) -> Optional[float]:
    """RMS matched distance; None when nothing was found"""
    found = np.asarray(found, dtype=float).reshape(-1, 3)
    if found.shape[0] == 0:
        return None
    _, charged = match_found(found, truth, penalty)
    return float(np.sqrt(np.mean(charged ** 2)))


def detections_curve(record: "RunRecord", length: int) -> np.ndarray:
    """|found| per step, carried flat past an early stop"""
    counts = np.array([row.n_found for row in record.rows], dtype=float)
    if counts.size == 0:
        return np.zeros(length)
    if counts.size >= length:
        return counts[:length]
    return np.concatenate([counts, np.full(length - counts.size, counts[-1])])


def steps_to_all_found(record: "RunRecord") -> Optional[int]:
    """Steps executed until every true target was found, counting the finding step"""
    total = record.truth.shape[0]
    if total == 0:
        return None
    for row in record.rows:
        if row.n_found >= total:
            return row.step + 1
    return None


def confidence_interval(values: Sequence[float], confidence: float = CONFIDENCE) -> Tuple[float, float]:
    """Mean and Student-t half-width; half-width is NaN below two samples"""
    values = np.asarray([v for v in values if v is not None], dtype=float)
    if values.size == 0:
        return float('nan'), float('nan')
    mean = float(values.mean())
    if values.size < 2:
        return mean, float('nan')
    sem = values.std(ddof=1) / np.sqrt(values.size)
    return mean, float(stats.t.ppf(0.5 + confidence / 2, values.size - 1) * sem)


@dataclass
class Metrics:
    runs: int
    detections_mean: np.ndarray
    detections_half_width: np.ndarray
    rmse_mean: float
    rmse_half_width: float
    steps_to_all_found_mean: float
    steps_to_all_found_half_width: float
    all_found_fraction: float


def aggregate(records: List["RunRecord"]) -> Metrics:
    if not records:
        raise ValueError("aggregate needs at least one run")
    length = max(r.max_steps for r in records)
    curves = np.vstack([detections_curve(r, length) for r in records])
    mean = curves.mean(axis=0)
    if len(records) < 2:
        half = np.full(length, np.nan)
    else:
        sem = curves.std(axis=0, ddof=1) / np.sqrt(len(records))
        half = stats.t.ppf(0.5 + CONFIDENCE / 2, len(records) - 1) * sem

    rmse_mean, rmse_half = confidence_interval([r.rmse for r in records])
    completions = [steps_to_all_found(r) for r in records]
    steps_mean, steps_half = confidence_interval(completions)
    return Metrics(
        runs=len(records),
        detections_mean=mean,
        detections_half_width=half,
        rmse_mean=rmse_mean,
        rmse_half_width=rmse_half,
        steps_to_all_found_mean=steps_mean,
        steps_to_all_found_half_width=steps_half,
        all_found_fraction=float(np.mean([c is not None for c in completions])),
    )


def trend_correlation(swept: Sequence[float], outcome: Sequence[float]) -> Tuple[float, float]:
    """Spearman rank correlation and p-value; NaN when fewer than three finite pairs"""
    pairs = [(s, o) for s, o in zip(swept, outcome) if o is not None and np.isfinite(o)]
    if len(pairs) < 3:
        return float('nan'), float('nan')
    result = stats.spearmanr([p[0] for p in pairs], [p[1] for p in pairs])
    return float(result.statistic), float(result.pvalue)
