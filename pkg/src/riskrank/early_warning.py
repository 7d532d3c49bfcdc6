"""Pre-crisis labeling and recursive out-of-sample crisis probabilities.

A quarter q gets label one when some crisis of that entity starts within the
horizon window [q + h1, q + h2]; quarters inside a crisis episode are masked
out of both training and evaluation.  Probabilities come from a pooled
logistic regression refit each evaluation quarter on an increasing window
that ends a publication lag before it, so no model ever sees data dated
after evaluation-quarter minus lag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError

RIDGE_LAMBDA = 1e-6
IRLS_TOL = 1e-8
IRLS_MAX_ITER = 100
MIN_TRAIN_QUARTERS = 8


@dataclass(frozen=True, eq=False)
class IndicatorPanel:
    """Entity x quarter x indicator values, NaN marking missing cells."""

    entities: tuple[str, ...]
    quarters: tuple[int, ...]
    values: np.ndarray
    indicator_names: tuple[str, ...]

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float).copy()
        expected = (len(self.entities), len(self.quarters), len(self.indicator_names))
        if arr.shape != expected:
            raise ValueError(f"values shape {arr.shape} != {expected}")
        q = np.asarray(self.quarters)
        if q.size and np.any(np.diff(q) <= 0):
            raise ValueError("quarters must be strictly increasing")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n_indicators(self) -> int:
        return len(self.indicator_names)


@dataclass(frozen=True)
class CrisisEvent:
    entity: str
    start: int
    end: int | None = None

    def __post_init__(self):
        if self.end is not None and self.end < self.start:
            raise ValueError(f"crisis end {self.end} before start {self.start}")

    @property
    def last_quarter(self) -> int:
        return self.start if self.end is None else self.end


@dataclass(frozen=True)
class CrisisEvents:
    events: tuple[CrisisEvent, ...]

    def for_entity(self, entity: str) -> tuple[CrisisEvent, ...]:
        return tuple(e for e in self.events if e.entity == entity)


@dataclass(frozen=True, eq=False)
class LabelSeries:
    """Binary pre-crisis labels plus the in-crisis exclusion mask."""

    entities: tuple[str, ...]
    quarters: tuple[int, ...]
    labels: np.ndarray
    excluded: np.ndarray


def label_precrisis(events: CrisisEvents, panel: IndicatorPanel,
                    h1: int, h2: int) -> LabelSeries:
    """Label one within [start - h2, start - h1]; mask crisis quarters."""
    if not 1 <= h1 <= h2:
        raise ValueError("horizon must satisfy 1 <= h1 <= h2")
    nq = len(panel.quarters)
    qarr = np.asarray(panel.quarters)
    labels = np.zeros((len(panel.entities), nq), dtype=np.int8)
    excluded = np.zeros((len(panel.entities), nq), dtype=bool)
    for ei, entity in enumerate(panel.entities):
        for event in events.for_entity(entity):
            pre = (qarr >= event.start - h2) & (qarr <= event.start - h1)
            labels[ei, pre] = 1
            inside = (qarr >= event.start) & (qarr <= event.last_quarter)
            excluded[ei, inside] = True
    labels[excluded] = 0
    return LabelSeries(panel.entities, panel.quarters, labels, excluded)


def label_cells(events: CrisisEvents, cells, h1: int, h2: int):
    """Labels and exclusion mask for arbitrary (entity, quarter) cells.

    Same rule as label_precrisis, applied to a flat cell list such as the
    rows of a probability series.
    """
    if not 1 <= h1 <= h2:
        raise ValueError("horizon must satisfy 1 <= h1 <= h2")
    labels = np.zeros(len(cells), dtype=np.int8)
    excluded = np.zeros(len(cells), dtype=bool)
    episodes: dict[str, tuple[CrisisEvent, ...]] = {}
    for i, (entity, quarter) in enumerate(cells):
        if entity not in episodes:
            episodes[entity] = events.for_entity(entity)
        for event in episodes[entity]:
            if event.start - h2 <= quarter <= event.start - h1:
                labels[i] = 1
            if event.start <= quarter <= event.last_quarter:
                excluded[i] = True
    labels[excluded] = 0
    return labels, excluded


@dataclass(frozen=True, eq=False)
class LogitModel:
    coefficients: np.ndarray
    intercept: float
    training_end: int

    def __post_init__(self):
        coefs = np.asarray(self.coefficients, dtype=float).copy()
        if not np.all(np.isfinite(coefs)) or not np.isfinite(self.intercept):
            raise ValueError("model coefficients must be finite")
        coefs.flags.writeable = False
        object.__setattr__(self, "coefficients", coefs)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _penalized_loglik(beta: np.ndarray, X: np.ndarray, y: np.ndarray,
                      ridge: float) -> float:
    z = X @ beta
    return float(np.sum(y * z - np.logaddexp(0.0, z)) - 0.5 * ridge * beta @ beta)


def fit_logit(X, y, ridge: float = RIDGE_LAMBDA, training_end: int = 0) -> LogitModel:
    """Ridge-penalized logistic regression by iteratively reweighted Newton steps.

    Rows containing missing values are dropped.  The tiny ridge keeps the
    maximizer finite under separation; steps are halved whenever they would
    lower the penalized log-likelihood.  Convergence is declared when the
    accepted step changes no coefficient by more than IRLS_TOL, within
    IRLS_MAX_ITER iterations.
    """
    Xv = np.asarray(X, dtype=float)
    yv = np.asarray(y, dtype=float)
    if Xv.ndim != 2 or yv.shape != (Xv.shape[0],):
        raise ValueError("X must be 2-d with one label per row")
    keep = ~np.isnan(Xv).any(axis=1) & ~np.isnan(yv)
    Xv, yv = Xv[keep], yv[keep]
    if Xv.shape[0] == 0:
        raise DegenerateFitError("no complete training rows")
    classes = np.unique(yv)
    if classes.size < 2:
        raise DegenerateFitError("training data contains a single class")

    design = np.column_stack([np.ones(Xv.shape[0]), Xv])
    beta = np.zeros(design.shape[1])
    ll = _penalized_loglik(beta, design, yv, ridge)
    for _ in range(IRLS_MAX_ITER):
        p = _sigmoid(design @ beta)
        w = p * (1.0 - p)
        hess = design.T @ (design * w[:, None]) + ridge * np.eye(design.shape[1])
        grad = design.T @ (yv - p) - ridge * beta
        step = np.linalg.solve(hess, grad)
        scale = 1.0
        for _ in range(30):
            candidate = beta + scale * step
            new_ll = _penalized_loglik(candidate, design, yv, ridge)
            if new_ll >= ll - 1e-12:
                break
            scale *= 0.5
        beta = beta + scale * step
        ll = new_ll
        if np.max(np.abs(scale * step)) < IRLS_TOL:
            break
    return LogitModel(beta[1:], float(beta[0]), training_end)


def predict_prob(model: LogitModel, X) -> np.ndarray:
    """Probabilities for indicator rows; rows with missing values give NaN."""
    Xv = np.atleast_2d(np.asarray(X, dtype=float))
    if Xv.shape[1] != model.coefficients.size:
        raise ValueError(
            f"expected {model.coefficients.size} indicators, got {Xv.shape[1]}"
        )
    out = np.full(Xv.shape[0], np.nan)
    complete = ~np.isnan(Xv).any(axis=1)
    if complete.any():
        z = Xv[complete] @ model.coefficients + model.intercept
        out[complete] = _sigmoid(z)
    return out


@dataclass(frozen=True, eq=False)
class BacktestResult:
    """Out-of-sample probabilities (NaN = masked) and per-quarter window ends."""

    entities: tuple[str, ...]
    quarters: tuple[int, ...]
    probabilities: np.ndarray
    training_end: dict[int, int]
    labels: LabelSeries


def recursive_backtest(panel: IndicatorPanel, events: CrisisEvents,
                       h1: int, h2: int, lag: int = 1,
                       start: int | None = None) -> BacktestResult:
    """Increasing-window backtest: refit at each quarter t >= start on all
    labeled rows dated at most t - lag, then predict quarter t.

    The start quarter must leave at least MIN_TRAIN_QUARTERS panel quarters
    of training data.  Quarters whose training window holds a single class
    yield masked predictions rather than a model.
    """
    if lag < 0:
        raise ValueError("publication lag must be >= 0")
    qarr = np.asarray(panel.quarters)
    if start is None:
        if len(panel.quarters) < MIN_TRAIN_QUARTERS + lag + 1:
            raise ValueError("panel too short for a backtest")
        start = int(qarr[MIN_TRAIN_QUARTERS + lag - 1] + 1)
    n_train_quarters = int(np.sum(qarr <= start - lag))
    if n_train_quarters < MIN_TRAIN_QUARTERS:
        raise ValueError(
            f"start {start} leaves {n_train_quarters} training quarters, "
            f"need >= {MIN_TRAIN_QUARTERS}"
        )
    labels = label_precrisis(events, panel, h1, h2)
    usable = ~labels.excluded & ~np.isnan(panel.values).any(axis=2)
    probs = np.full((len(panel.entities), len(panel.quarters)), np.nan)
    training_end: dict[int, int] = {}
    for qi, t in enumerate(panel.quarters):
        if t < start:
            continue
        window = usable & (qarr <= t - lag)[None, :]
        rows = np.argwhere(window)
        if rows.size == 0:
            continue
        X = panel.values[rows[:, 0], rows[:, 1], :]
        y = labels.labels[rows[:, 0], rows[:, 1]]
        actual_end = int(qarr[rows[:, 1].max()])
        try:
            model = fit_logit(X, y, training_end=actual_end)
        except DegenerateFitError:
            continue
        training_end[t] = model.training_end
        probs[:, qi] = predict_prob(model, panel.values[:, qi, :])
    probs.flags.writeable = False
    return BacktestResult(panel.entities, panel.quarters, probs, training_end, labels)
