"""Monotone set functions (capacities) and aggregation operators built on them.

A capacity mu on N = {1..n} satisfies mu(empty) = 0, mu(N) = 1 and
mu(A) <= mu(B) whenever A is a subset of B.  The discrete Choquet integral
aggregates a value vector x in [0,1]^n against such a measure via the sorted
telescoping sum

    C(x) = sum_i (x_(i) - x_(i-1)) * mu(C_(i)),    x_(0) = 0,

where x_(1) <= ... <= x_(n) and C_(i) is the index set of the i-th and larger
sorted values.  Importance of single elements is summarized by the Shapley
vector, pairwise synergy by the Shapley interaction index; for a 2-additive
capacity the interaction index coincides with the pair Moebius mass.

Plain weighted means and ordered weighted averages are included as the
baseline operators every capacity-based aggregate is compared against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

MAX_GROUND_SIZE = 20
MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a structural check: empty violation list means valid."""

    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(self.violations)


def _subset_label(mask: int) -> str:
    """Human-readable 1-based subset label for a bitmask."""
    members = [str(i + 1) for i in range(mask.bit_length()) if mask >> i & 1]
    return "{" + ",".join(members) + "}"


@dataclass(frozen=True, eq=False)
class FuzzyMeasure:
    """Dense capacity: ``values[mask]`` is mu of the subset encoded by ``mask``.

    The table is exhaustive (all 2^n subsets), which keeps the general Choquet
    integral and the index computations exact; the ground size is capped at
    MAX_GROUND_SIZE for that reason.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float).copy()
        if arr.ndim != 1 or arr.size < 2 or arr.size & (arr.size - 1):
            raise ValueError("values must be a 1-d array of length 2^n, n >= 1")
        n = arr.size.bit_length() - 1
        if n > MAX_GROUND_SIZE:
            raise ValueError(f"ground size {n} exceeds cap {MAX_GROUND_SIZE}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.size.bit_length() - 1

    @property
    def full_set(self) -> int:
        return self.values.size - 1

    def mu(self, mask: int) -> float:
        return float(self.values[mask])

    @classmethod
    def from_subsets(cls, n: int, table: dict) -> "FuzzyMeasure":
        """Build from a map of 1-based index tuples (or iterables) to values.

        Every one of the 2^n subsets must be present; a missing entry is a
        structural error.
        """
        values = np.full(2**n, np.nan)
        for subset, val in table.items():
            mask = 0
            for idx in subset:
                if not 1 <= idx <= n:
                    raise ValueError(f"index {idx} outside 1..{n}")
                mask |= 1 << (idx - 1)
            values[mask] = val
        missing = np.flatnonzero(np.isnan(values))
        if missing.size:
            raise ValueError(
                f"missing subset entry {_subset_label(int(missing[0]))}"
            )
        return cls(values)

    @classmethod
    def additive(cls, weights) -> "FuzzyMeasure":
        """Additive measure with the given singleton masses."""
        w = np.asarray(weights, dtype=float)
        n = w.size
        values = np.zeros(2**n)
        for i in range(n):
            bit = 1 << i
            masks = np.arange(2**n)
            values[masks & bit != 0] += w[i]
        return cls(values)

    def to_json(self) -> str:
        entries = {}
        for mask in range(self.values.size):
            key = ",".join(
                str(i + 1) for i in range(self.n) if mask >> i & 1
            )
            entries[key] = float(self.values[mask])
        return json.dumps({"n": self.n, "mu": entries}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "FuzzyMeasure":
        doc = json.loads(text)
        n = int(doc["n"])
        if not 1 <= n <= MAX_GROUND_SIZE:
            raise ValueError(f"n must be in 1..{MAX_GROUND_SIZE}")
        values = np.full(2**n, np.nan)
        for key, val in doc["mu"].items():
            mask = 0
            if key.strip():
                for part in key.split(","):
                    idx = int(part)
                    if not 1 <= idx <= n:
                        raise ValueError(f"index {idx} outside 1..{n}")
                    mask |= 1 << (idx - 1)
            values[mask] = float(val)
        missing = np.flatnonzero(np.isnan(values))
        if missing.size:
            raise ValueError(
                f"missing subset entry {_subset_label(int(missing[0]))}"
            )
        return cls(values)


def validate_measure(measure: FuzzyMeasure) -> ValidationReport:
    """Check boundary conditions, value ranges and monotonicity.

    Monotonicity is verified on every covering pair (A, A + {i}); a violation
    on any pair A strictly inside B implies a violation on some covering pair
    along a chain between them, so this detects all of them.
    """
    mu = measure.values
    n = measure.n
    violations: list[str] = []
    if abs(mu[0]) > MONOTONE_SLACK:
        violations.append(f"boundary: mu({{}}) = {mu[0]:.6g}, expected 0")
    if abs(mu[-1] - 1.0) > MONOTONE_SLACK:
        violations.append(
            f"boundary: mu({_subset_label(measure.full_set)}) = {mu[-1]:.6g}, expected 1"
        )
    out_of_range = np.flatnonzero(
        (mu < -MONOTONE_SLACK) | (mu > 1.0 + MONOTONE_SLACK)
    )
    for mask in out_of_range:
        violations.append(
            f"range: mu({_subset_label(int(mask))}) = {mu[mask]:.6g} outside [0,1]"
        )
    masks = np.arange(mu.size)
    for i in range(n):
        bit = 1 << i
        without = masks[masks & bit == 0]
        bad = without[mu[without] > mu[without | bit] + MONOTONE_SLACK]
        for mask in bad:
            violations.append(
                "monotonicity: mu({a}) = {va:.6g} > mu({b}) = {vb:.6g}".format(
                    a=_subset_label(int(mask)),
                    va=mu[mask],
                    b=_subset_label(int(mask) | bit),
                    vb=mu[mask | bit],
                )
            )
    return ValidationReport(tuple(violations))


def choquet_general(x, measure: FuzzyMeasure) -> float:
    """Discrete Choquet integral of x against the measure.

    Ties are broken by sorting on (value, original index), which leaves the
    integral unchanged but makes the evaluation deterministic.
    """
    xv = np.asarray(x, dtype=float)
    if xv.shape != (measure.n,):
        raise ValueError(f"expected {measure.n} values, got {xv.shape}")
    order = np.argsort(xv, kind="stable")
    remaining = measure.full_set
    total = 0.0
    prev = 0.0
    for idx in order:
        total += (xv[idx] - prev) * measure.mu(remaining)
        prev = xv[idx]
        remaining &= ~(1 << int(idx))
    return float(total)


def shapley(measure: FuzzyMeasure) -> np.ndarray:
    """Shapley importance vector.

    v_i = sum over K not containing i of
          (n-|K|-1)! |K|! / n! * (mu(K + {i}) - mu(K)).

    Efficiency gives sum(v) = mu(N).
    """
    n = measure.n
    mu = measure.values
    fact = [math.factorial(k) for k in range(n + 1)]
    coef = np.array(
        [fact[n - k - 1] * fact[k] / fact[n] for k in range(n)]
    )
    masks = np.arange(mu.size)
    sizes = np.array([int(m).bit_count() for m in masks])
    v = np.zeros(n)
    for i in range(n):
        bit = 1 << i
        without = masks[masks & bit == 0]
        v[i] = float(np.sum(coef[sizes[without]] * (mu[without | bit] - mu[without])))
    return v


def interaction_index(measure: FuzzyMeasure) -> np.ndarray:
    """Shapley interaction index for every unordered pair, as a symmetric matrix.

    I(i,j) = sum over K avoiding both of
             (n-|K|-2)! |K|! / (n-1)! *
             (mu(K+{i,j}) - mu(K+{i}) - mu(K+{j}) + mu(K)).

    For a 2-additive capacity this recovers the pair Moebius mass exactly.
    """
    n = measure.n
    out = np.zeros((n, n))
    if n < 2:
        return out
    mu = measure.values
    fact = [math.factorial(k) for k in range(n + 1)]
    coef = np.array(
        [fact[n - k - 2] * fact[k] / fact[n - 1] for k in range(n - 1)]
    )
    masks = np.arange(mu.size)
    sizes = np.array([int(m).bit_count() for m in masks])
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = 1 << i, 1 << j
            without = masks[(masks & (bi | bj)) == 0]
            delta = (
                mu[without | bi | bj]
                - mu[without | bi]
                - mu[without | bj]
                + mu[without]
            )
            val = float(np.sum(coef[sizes[without]] * delta))
            out[i, j] = out[j, i] = val
    return out


@dataclass(frozen=True, eq=False)
class TwoAdditiveCapacity:
    """Capacity whose Moebius transform lives on singletons and pairs only.

    ``singleton[i]`` is the mass a_i, ``pairs[i, j]`` the symmetric pair mass
    a_ij (zero diagonal).  The induced set function is
    mu(A) = sum_{i in A} a_i + sum_{{i,j} in A} a_ij; with ``normalized`` on,
    the masses sum to one so mu(N) = 1.  Shapley values come in closed form,
    v_i = a_i + 0.5 * sum_j a_ij, and the interaction index is a_ij itself.
    """

    singleton: np.ndarray
    pairs: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        a = np.asarray(self.singleton, dtype=float).copy()
        p = np.asarray(self.pairs, dtype=float).copy()
        n = a.size
        if n < 1 or p.shape != (n, n):
            raise ValueError("singleton must be length n, pairs n-by-n")
        if not np.array_equal(p, p.T):
            raise ValueError("pair masses must be symmetric")
        if np.any(np.diag(p) != 0.0):
            raise ValueError("pair masses must have a zero diagonal")
        if self.normalized and abs(a.sum() + p.sum() / 2.0 - 1.0) > 1e-9:
            raise ValueError("normalized capacity must have total mass 1")
        a.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "singleton", a)
        object.__setattr__(self, "pairs", p)

    @property
    def n(self) -> int:
        return self.singleton.size

    @property
    def total_mass(self) -> float:
        return float(self.singleton.sum() + self.pairs.sum() / 2.0)

    def shapley_values(self) -> np.ndarray:
        return self.singleton + 0.5 * self.pairs.sum(axis=1)

    def interaction_matrix(self) -> np.ndarray:
        return self.pairs.copy()

    def is_monotone(self, tol: float = MONOTONE_SLACK) -> bool:
        """Monotone iff a_i plus the worst-case negative pair load stays >= 0."""
        worst = self.singleton + np.minimum(self.pairs, 0.0).sum(axis=1)
        return bool(np.all(worst >= -tol))

    def normalize(self) -> "TwoAdditiveCapacity":
        z = self.total_mass
        if z <= 0.0:
            raise ValueError("total mass must be positive to normalize")
        return TwoAdditiveCapacity(self.singleton / z, self.pairs / z, normalized=True)

    def induced_measure(self) -> FuzzyMeasure:
        """Expand to the dense set function (ground size capped as usual)."""
        n = self.n
        if n > MAX_GROUND_SIZE:
            raise ValueError(f"ground size {n} exceeds cap {MAX_GROUND_SIZE}")
        masks = np.arange(2**n)
        mu = np.zeros(2**n)
        for i in range(n):
            has_i = masks & (1 << i) != 0
            mu[has_i] += self.singleton[i]
            for j in range(i + 1, n):
                both = has_i & (masks & (1 << j) != 0)
                mu[both] += self.pairs[i, j]
        return FuzzyMeasure(mu)


def choquet_2additive(x, cap: TwoAdditiveCapacity) -> float:
    """2-additive Choquet integral in Shapley/interaction form:

    sum_i (v_i - 0.5 * sum_j |I_ij|) x_i
      + sum_{I_ij > 0} I_ij * min(x_i, x_j)
      + sum_{I_ij < 0} |I_ij| * max(x_i, x_j).

    The absolute value in the correction term is what makes this equal the
    general integral on the induced set function for either interaction
    sign; with nonnegative interactions it reduces to v_i - 0.5 * sum I_ij.
    """
    xv = np.asarray(x, dtype=float)
    if xv.shape != (cap.n,):
        raise ValueError(f"expected {cap.n} values, got {xv.shape}")
    v = cap.shapley_values()
    inter = cap.pairs
    total = float(np.sum((v - 0.5 * np.abs(inter).sum(axis=1)) * xv))
    for i in range(cap.n):
        for j in range(i + 1, cap.n):
            a = inter[i, j]
            if a > 0.0:
                total += a * min(xv[i], xv[j])
            elif a < 0.0:
                total += -a * max(xv[i], xv[j])
    return total


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Nonnegative weights summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty 1-d vector")
        if np.any(w < 0.0) or np.any(w > 1.0):
            raise ValueError("weights must lie in [0,1]")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {w.sum():.6g}, expected 1")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size


def owa(x, w: WeightVector) -> float:
    """Ordered weighted average: weights applied to x sorted descending."""
    xv = np.asarray(x, dtype=float)
    if xv.shape != (w.n,):
        raise ValueError(f"expected {w.n} values, got {xv.shape}")
    return float(np.sort(xv)[::-1] @ w.weights)


def weighted_mean(x, w: WeightVector) -> float:
    xv = np.asarray(x, dtype=float)
    if xv.shape != (w.n,):
        raise ValueError(f"expected {w.n} values, got {xv.shape}")
    return float(xv @ w.weights)
