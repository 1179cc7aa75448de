"""Quantile-normalized classification of persistence intervals.

An interval of length r is a topological signal when r / (r_q + delta)
exceeds tau, with r_q the q-quantile of the run's interval lengths.  The
parameters are trained by brute-force grid search on ensembles with known
Betti numbers, with the indicator smoothed by a sigmoid during training.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .persistence import PersistenceDiagram


@dataclass
class ClassifierParams:
    q: float
    delta: float
    tau: float
    alpha: float = 20.0

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError("q must be in (0, 1)")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


# presets matching the reported fixed-threshold configuration
PRESET_DIM0 = ClassifierParams(q=0.5, delta=0.7, tau=25.0)
PRESET_DIM1 = ClassifierParams(q=0.5, delta=0.7, tau=30.0)


@dataclass
class IntervalSet:
    """Finite persistence interval lengths of one dimension."""

    lengths: np.ndarray

    def __post_init__(self):
        self.lengths = np.asarray(self.lengths, dtype=float).ravel()
        if len(self.lengths) and self.lengths.min() < 0:
            raise ValueError("interval lengths must be non-negative")

    @classmethod
    def from_diagram(cls, diagram: PersistenceDiagram, dim: int) -> "IntervalSet":
        return cls(diagram.interval_lengths(dim))


@dataclass
class ClassificationOutcome:
    beta_hat: int
    signal_indices: set[int]
    noise_indices: set[int]
    normalized_scores: np.ndarray
    lengths: np.ndarray = field(default_factory=lambda: np.zeros(0))


def estimate_betti(intervals: IntervalSet, params: ClassifierParams) -> ClassificationOutcome:
    """Count intervals whose quantile-normalized length exceeds tau."""
    r = intervals.lengths
    if len(r) == 0:
        return ClassificationOutcome(0, set(), set(), np.zeros(0), r)
    r_q = float(np.quantile(r, params.q))
    scores = r / (r_q + params.delta)
    signal = np.nonzero(scores > params.tau)[0]
    noise = np.nonzero(scores <= params.tau)[0]
    return ClassificationOutcome(
        int(len(signal)), set(map(int, signal)), set(map(int, noise)), scores, r
    )


def betti_error(estimates, truth: int) -> float:
    """Mean absolute deviation of the estimated Betti numbers."""
    est = np.asarray(list(estimates), dtype=float)
    if len(est) == 0:
        raise ValueError("need at least one run")
    return float(np.mean(np.abs(est - truth)))


@dataclass
class TrainingGrid:
    q_values: np.ndarray = field(default_factory=lambda: np.round(np.arange(0.3, 0.91, 0.1), 10))
    delta_values: np.ndarray = field(default_factory=lambda: np.round(np.arange(0.0, 1.01, 0.1), 10))
    tau_values: np.ndarray = field(default_factory=lambda: np.arange(1.0, 51.0, 1.0))


@dataclass
class TrainResult:
    params: ClassifierParams
    smoothed_error: float
    hard_error: float


def train(
    ensembles: list[tuple[IntervalSet, int]],
    grid: TrainingGrid | None = None,
    alpha: float = 20.0,
) -> TrainResult:
    """Brute-force grid search minimizing the sigmoid-smoothed Betti error.

    Each ensemble entry is (interval lengths, true Betti number).  Ties on
    the smoothed error break toward the earlier grid point, so the result
    is deterministic.
    """
    if grid is None:
        grid = TrainingGrid()
    if len(ensembles) < 2:
        raise ValueError("training needs at least 2 ensembles")
    if len(grid.q_values) == 0 or len(grid.delta_values) == 0 or len(grid.tau_values) == 0:
        raise ValueError("parameter grid is empty")

    lengths = [np.asarray(iv.lengths, dtype=float) for iv, _ in ensembles]
    truths = np.array([float(t) for _, t in ensembles])
    taus = np.asarray(grid.tau_values, dtype=float)

    best = None
    for q in grid.q_values:
        r_q = np.array([np.quantile(r, q) if len(r) else 0.0 for r in lengths])
        for delta in grid.delta_values:
            smooth = np.zeros(len(taus))
            hard = np.zeros(len(taus))
            for run, r in enumerate(lengths):
                if len(r):
                    scores = r / (r_q[run] + delta)
                    margin = scores[None, :] - taus[:, None]
                    soft_count = expit(alpha * margin).sum(axis=1)
                    hard_count = (margin > 0).sum(axis=1)
                else:
                    soft_count = np.zeros(len(taus))
                    hard_count = np.zeros(len(taus))
                smooth += np.abs(soft_count - truths[run])
                hard += np.abs(hard_count - truths[run])
            smooth /= len(lengths)
            hard /= len(lengths)
            k = int(np.argmin(smooth))
            if best is None or smooth[k] < best[0] - 1e-15:
                best = (float(smooth[k]), float(hard[k]), float(q), float(delta), float(taus[k]))
    s_err, h_err, q, delta, tau = best
    return TrainResult(ClassifierParams(q, delta, tau, alpha), s_err, h_err)


def snr(outcomes: list[ClassificationOutcome]) -> float:
    """Ratio of mean signal power to mean noise power across runs.

    Power of an empty set counts as zero for its run; zero total noise
    power is signaled as infinite SNR.
    """
    if not outcomes:
        raise ValueError("need at least one outcome")
    p_signal = []
    p_noise = []
    for out in outcomes:
        r = np.asarray(out.lengths, dtype=float)
        sig = sorted(out.signal_indices)
        noi = sorted(out.noise_indices)
        p_signal.append(float(np.sum(r[sig] ** 2) / len(sig)) if sig else 0.0)
        p_noise.append(float(np.sum(r[noi] ** 2) / len(noi)) if noi else 0.0)
    ps = float(np.mean(p_signal))
    pn = float(np.mean(p_noise))
    if pn == 0.0:
        return math.inf
    return ps / pn


def sensitivity(detections: list[tuple[int, int]]) -> float:
    """Pooled TP / (TP + FN) over runs."""
    tp = sum(int(t) for t, _ in detections)
    fn = sum(int(f) for _, f in detections)
    if tp + fn == 0:
        raise ValueError("sensitivity undefined with no positives")
    return tp / (tp + fn)


def classify_diagram(
    diagram: PersistenceDiagram,
    params_dim0: ClassifierParams = PRESET_DIM0,
    params_dim1: ClassifierParams = PRESET_DIM1,
) -> tuple[int, int, ClassificationOutcome, ClassificationOutcome]:
    """Betti estimates for dims 0 and 1 of one diagram.

    Essential dim-0 classes each count as one component; the finite bars of
    both dimensions go through the quantile-normalized estimator.
    """
    out0 = estimate_betti(IntervalSet.from_diagram(diagram, 0), params_dim0)
    out1 = estimate_betti(IntervalSet.from_diagram(diagram, 1), params_dim1)
    essential0 = len(diagram.essential_births(0))
    beta0 = essential0 + out0.beta_hat
    beta1 = out1.beta_hat + len(diagram.essential_births(1))
    return beta0, beta1, out0, out1
