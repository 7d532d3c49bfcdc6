"""Interconnected-risk scores over a snapshot: totals and their decomposition.

The score for a target aggregates neighbor risk levels x_i with the capacity
from ``build_capacity``: writing v_i for the Shapley values and I_ij for the
pairwise interactions,

    score = sum_i (v_i - 0.5 * sum_j I_ij) x_i   (direct effects)
          + sum_{i<j} I_ij * x_i * x_j           (indirect effects),

where the conjunctive min of the 2-additive Choquet integral is replaced by
the product, so risk spreads along two-step paths in proportion to both node
levels.  Algebraically this equals the Moebius form
sum_i a_i x_i + sum_{i<j} a_ij x_i x_j, which the tests cross-check.

For a non-root target, its own risk level x_c enters through a self-loop
singleton: either with the weight the normalized capacity assigns it
("shapley" mode) or with weight one ("unit" mode, clamped at one), in which
case the neighbor masses are normalized among themselves exactly as in root
mode.  Longer chains of influence are handled by the path-based variant,
which gives every simple path of length up to k a mass equal to its link
weight product and a value equal to the product of the risk levels along it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoCapacityError
from .network import (
    NetworkSnapshot,
    assert_same_structure,
    build_capacity,
    default_self_exposure,
    k_paths,
)

CENTRAL_WEIGHT_MODES = ("unit", "shapley")


@dataclass(frozen=True)
class RiskDecomposition:
    """Individual / direct / indirect split of one target's score."""

    target: str
    individual: float
    direct: float
    indirect: float
    total_raw: float
    total: float


def _finish(target: str, individual: float, direct: float, indirect: float,
            clamp: bool) -> RiskDecomposition:
    total_raw = individual + direct + indirect
    total = min(total_raw, 1.0) if clamp else total_raw
    return RiskDecomposition(target, individual, direct, indirect, total_raw, total)


@dataclass(frozen=True)
class RiskRankConfig:
    """Evaluation knobs: self-weight mode, clamping, and path-length bound."""

    central_weight_mode: str = "unit"
    clamp: bool = True
    max_path_length: int = 2

    def __post_init__(self):
        if self.central_weight_mode not in CENTRAL_WEIGHT_MODES:
            raise ValueError(
                f"central_weight_mode must be one of {CENTRAL_WEIGHT_MODES}"
            )
        if self.max_path_length < 1:
            raise ValueError("max_path_length must be >= 1")


def _pairwise_parts(capacity, x: np.ndarray) -> tuple[float, float]:
    """Direct and indirect sums from Shapley values and interactions."""
    v = capacity.shapley_values()
    inter = capacity.pairs
    direct = float(np.sum((v - 0.5 * inter.sum(axis=1)) * x))
    indirect = 0.5 * float(x @ inter @ x)
    return direct, indirect


def riskrank_root(snapshot: NetworkSnapshot) -> RiskDecomposition:
    """Systemic score at the root; no individual term, normalized capacity."""
    net = snapshot.network
    root = net.root()
    build = build_capacity(net, root.id, mode="root")
    x = np.array([net.risk_of(nid) for nid in build.elements])
    direct, indirect = _pairwise_parts(build.capacity, x)
    return _finish(root.id, 0.0, direct, indirect, clamp=True)


def riskrank_node(snapshot: NetworkSnapshot, target: str,
                  cfg: RiskRankConfig = RiskRankConfig()) -> RiskDecomposition:
    """Score for a non-root node, self-loop included per the configured mode."""
    net = snapshot.network
    node = net.nodes.get(target)
    if node is None:
        raise ValueError(f"unknown node {target!r}")
    if node.level == 0:
        raise ValueError("target is the root; use riskrank_root")
    x_c = net.risk_of(target)

    if cfg.central_weight_mode == "unit":
        individual = x_c
        try:
            build = build_capacity(net, target, mode="root")
        except NoCapacityError:
            return _finish(target, individual, 0.0, 0.0, cfg.clamp)
        x = np.array([net.risk_of(nid) for nid in build.elements])
        direct, indirect = _pairwise_parts(build.capacity, x)
        return _finish(target, individual, direct, indirect, cfg.clamp)

    build = build_capacity(net, target, mode="central")
    if build.raw_mass <= 0.0:
        raise NoCapacityError(
            f"node {target!r} has no incoming mass or self exposure"
        )
    capacity = build.capacity.normalize()
    x = np.array([
        x_c if nid == target else net.risk_of(nid) for nid in build.elements
    ])
    v = capacity.shapley_values()
    self_idx = build.index_of(target)
    individual = float(v[self_idx] * x_c)
    x_neighbors = x.copy()
    x_neighbors[self_idx] = 0.0
    v_masked = v.copy()
    v_masked[self_idx] = 0.0
    inter = capacity.pairs
    direct = float(np.sum((v_masked - 0.5 * inter.sum(axis=1)) * x_neighbors))
    indirect = 0.5 * float(x_neighbors @ inter @ x_neighbors)
    return _finish(target, individual, direct, indirect, cfg.clamp)


def riskrank_kpath(snapshot: NetworkSnapshot, target: str,
                   cfg: RiskRankConfig = RiskRankConfig()) -> RiskDecomposition:
    """Path-based generalization: simple paths up to length k carry mass equal
    to the product of their link weights and value equal to the product of the
    risk levels of the nodes they pass through.  k = 2 reproduces the base
    operators exactly; k = 1 keeps direct effects only.
    """
    k = cfg.max_path_length
    net = snapshot.network
    node = net.nodes.get(target)
    if node is None:
        raise ValueError(f"unknown node {target!r}")
    is_root = node.level == 0
    paths = k_paths(net, target, k)
    masses = np.array([p.weight for p in paths]) if paths else np.zeros(0)
    path_mass = float(masses.sum())

    self_mass = 0.0
    if not is_root and cfg.central_weight_mode == "shapley":
        self_mass = default_self_exposure(net, target)
    z = path_mass + self_mass

    if z <= 0.0:
        if is_root:
            raise NoCapacityError(f"node {target!r} has no incoming mass")
        if cfg.central_weight_mode == "shapley":
            raise NoCapacityError(
                f"node {target!r} has no incoming mass or self exposure"
            )
        return _finish(target, net.risk_of(target), 0.0, 0.0, cfg.clamp)

    if is_root:
        individual = 0.0
        clamp = True
    elif cfg.central_weight_mode == "unit":
        # self term bypasses the normalizer: z is the path mass alone
        individual = net.risk_of(target)
        clamp = cfg.clamp
    else:
        individual = (self_mass / z) * net.risk_of(target)
        clamp = cfg.clamp

    direct = 0.0
    indirect = 0.0
    for hit in paths:
        value = hit.weight * math.prod(net.risk_of(nid) for nid in hit.nodes[:-1])
        if hit.length == 1:
            direct += value / z
        else:
            indirect += value / z
    return _finish(target, individual, direct, indirect, clamp)


def riskrank_for(snapshot: NetworkSnapshot, target: str,
                 cfg: RiskRankConfig = RiskRankConfig()) -> RiskDecomposition:
    """Dispatch to the base operators at k = 2, the path variant otherwise."""
    is_root = target in snapshot.network.nodes and snapshot.network.nodes[target].level == 0
    if cfg.max_path_length == 2:
        return riskrank_root(snapshot) if is_root else riskrank_node(snapshot, target, cfg)
    return riskrank_kpath(snapshot, target, cfg)


@dataclass(frozen=True)
class SeriesRow:
    date: int
    target: str
    decomposition: RiskDecomposition


def riskrank_series(snapshots, targets, cfg: RiskRankConfig = RiskRankConfig()) -> list[SeriesRow]:
    """One decomposition per (date, target), snapshots taken in order.

    All snapshots must share one structure; a drifting series is an error.
    """
    snaps = list(snapshots)
    assert_same_structure(snaps)
    rows: list[SeriesRow] = []
    for snap in snaps:
        for target in targets:
            rows.append(SeriesRow(snap.date, target, riskrank_for(snap, target, cfg)))
    return rows
