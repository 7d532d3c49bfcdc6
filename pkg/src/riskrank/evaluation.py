"""Signal evaluation: contingency counts, loss, usefulness, ROC/AUC.

Binarized signals B (one when the probability strictly exceeds a threshold)
are crossed with the ideal indicator C into TP/TN/FP/FN.  With type I and II
error rates T1 = FN/(FN+TP), T2 = FP/(TN+FP), class priors P1, P2 and a
preference weight mu in [0,1] between the two error types, the loss is

    L(mu) = mu * T1 * P1 + (1 - mu) * T2 * P2,

absolute usefulness U_a = min(mu*P1, (1-mu)*P2) - L compares against the best
unconditional guess, and relative usefulness U_r = U_a / min(mu*P1, (1-mu)*P2)
rescales by what a perfect model would gain.  AUC is computed by a threshold
sweep with trapezoidal integration, which coincides with the rank statistic
(ties counted one half).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ContingencyMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        cells = (self.tp, self.tn, self.fp, self.fn)
        if any(c < 0 for c in cells):
            raise ValueError("contingency cells must be nonnegative")
        if sum(cells) < 1:
            raise ValueError("contingency matrix must hold at least one observation")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def p1(self) -> float:
        """Unconditional probability of the positive (pre-crisis) class."""
        return (self.tp + self.fn) / self.total

    @property
    def p2(self) -> float:
        return (self.tn + self.fp) / self.total


def binarize(probs, tau: float) -> np.ndarray:
    """Signal when the probability strictly exceeds the threshold."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("threshold must lie in [0,1]")
    return (np.asarray(probs, dtype=float) > tau).astype(np.int8)


def contingency(predictions, labels, mask=None) -> ContingencyMatrix:
    """Count the four cells, skipping masked entries."""
    b = np.asarray(predictions)
    c = np.asarray(labels)
    if b.shape != c.shape:
        raise ValueError("predictions and labels must have equal shape")
    keep = np.ones(b.shape, dtype=bool) if mask is None else ~np.asarray(mask, dtype=bool)
    if keep.shape != b.shape:
        raise ValueError("mask shape mismatch")
    b, c = b[keep], c[keep]
    if b.size == 0:
        raise ValueError("no observations left after masking")
    tp = int(np.sum((b == 1) & (c == 1)))
    tn = int(np.sum((b == 0) & (c == 0)))
    fp = int(np.sum((b == 1) & (c == 0)))
    fn = int(np.sum((b == 0) & (c == 1)))
    return ContingencyMatrix(tp, tn, fp, fn)


def error_rates(cm: ContingencyMatrix) -> tuple[float | None, float | None]:
    """(T1, T2); a rate with an empty class is reported as None."""
    t1 = cm.fn / (cm.fn + cm.tp) if cm.fn + cm.tp > 0 else None
    t2 = cm.fp / (cm.tn + cm.fp) if cm.tn + cm.fp > 0 else None
    return t1, t2


def loss(cm: ContingencyMatrix, mu_pref: float) -> float:
    """Preference-weighted loss; an undefined rate has prior zero and drops out."""
    if not 0.0 <= mu_pref <= 1.0:
        raise ValueError("preference must lie in [0,1]")
    t1, t2 = error_rates(cm)
    term1 = mu_pref * t1 * cm.p1 if t1 is not None else 0.0
    term2 = (1.0 - mu_pref) * t2 * cm.p2 if t2 is not None else 0.0
    return term1 + term2


def usefulness(cm: ContingencyMatrix, mu_pref: float) -> tuple[float, float]:
    """(U_a, U_r).  When the best unconditional guess already achieves zero
    loss (mu_pref at the boundary), U_r is reported as zero."""
    best_guess = min(mu_pref * cm.p1, (1.0 - mu_pref) * cm.p2)
    u_a = best_guess - loss(cm, mu_pref)
    u_r = u_a / best_guess if best_guess > 0.0 else 0.0
    return u_a, u_r


@dataclass(frozen=True)
class ClassMetrics:
    """Precision/recall per class and accuracy; None marks an empty ratio."""

    precision_signal: float | None
    recall_signal: float | None
    precision_tranquil: float | None
    recall_tranquil: float | None
    accuracy: float


def metrics(cm: ContingencyMatrix) -> ClassMetrics:
    def ratio(num: int, den: int) -> float | None:
        return num / den if den > 0 else None

    return ClassMetrics(
        precision_signal=ratio(cm.tp, cm.fp + cm.tp),
        recall_signal=ratio(cm.tp, cm.fn + cm.tp),
        precision_tranquil=ratio(cm.tn, cm.fn + cm.tn),
        recall_tranquil=ratio(cm.tn, cm.fp + cm.tn),
        accuracy=(cm.tp + cm.tn) / cm.total,
    )


def roc_auc(probs, labels) -> float:
    """Area under the ROC curve via a descending threshold sweep."""
    p = np.asarray(probs, dtype=float)
    y = np.asarray(labels)
    if p.shape != y.shape or p.ndim != 1:
        raise ValueError("probs and labels must be equal-length vectors")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    order = np.argsort(-p, kind="stable")
    p_sorted, y_sorted = p[order], y[order]
    tp = np.cumsum(y_sorted == 1)
    fp = np.cumsum(y_sorted == 0)
    # keep one operating point per distinct score (ties move together)
    last_of_group = np.append(p_sorted[1:] != p_sorted[:-1], True)
    tpr = np.concatenate([[0.0], tp[last_of_group] / n_pos])
    fpr = np.concatenate([[0.0], fp[last_of_group] / n_neg])
    return float(np.trapezoid(tpr, fpr))


def optimal_threshold(probs, labels, mu_pref: float, mask=None) -> float:
    """Threshold from the grid of observed probabilities maximizing U_a,
    ties resolved toward the smaller value."""
    p = np.asarray(probs, dtype=float)
    y = np.asarray(labels)
    keep = np.ones(p.shape, dtype=bool) if mask is None else ~np.asarray(mask, dtype=bool)
    p, y = p[keep], y[keep]
    if np.unique(y).size < 2:
        raise ValueError("threshold selection needs both classes present")
    best_tau = None
    best_ua = -np.inf
    for tau in np.unique(p):
        cm = contingency(binarize(p, float(tau)), y)
        u_a, _ = usefulness(cm, mu_pref)
        if u_a > best_ua + 1e-15:
            best_ua, best_tau = u_a, float(tau)
    return best_tau


@dataclass(frozen=True)
class EvalRow:
    """Everything reported for one preference point."""

    mu_pref: float
    tau: float
    cm: ContingencyMatrix
    t1: float | None
    t2: float | None
    loss: float
    u_a: float
    u_r: float
    metrics: ClassMetrics


@dataclass(frozen=True)
class EvalReport:
    model: str
    auc: float
    rows: tuple[EvalRow, ...]


def evaluate_series(probs, labels, mu_grid, model: str = "model",
                    mask=None) -> EvalReport:
    """Full report for one probability series against binary labels."""
    p = np.asarray(probs, dtype=float)
    y = np.asarray(labels)
    keep = np.ones(p.shape, dtype=bool) if mask is None else ~np.asarray(mask, dtype=bool)
    p, y = p[keep], y[keep]
    auc = roc_auc(p, y)
    rows = []
    for mu_pref in mu_grid:
        tau = optimal_threshold(p, y, mu_pref)
        cm = contingency(binarize(p, tau), y)
        t1, t2 = error_rates(cm)
        u_a, u_r = usefulness(cm, mu_pref)
        rows.append(EvalRow(mu_pref, tau, cm, t1, t2, loss(cm, mu_pref), u_a, u_r, metrics(cm)))
    return EvalReport(model, auc, tuple(rows))
