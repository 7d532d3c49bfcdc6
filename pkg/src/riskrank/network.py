"""Hierarchical risk networks and the capacity built from their link weights.

The system is a directed graph arranged in levels: a single root at level 0,
whose children form a complete sub-network among themselves and each link to
the root; every deeper node belongs to exactly one such sibling group under
its parent.  Node values are risk levels in [0,1] (the root carries none),
link weights are nonnegative impact measures.

For a target node, the aggregation capacity is assembled from paths of length
at most two ending at the target: a direct link i -> target contributes the
singleton mass a_i = l(i, target), and each directed two-step path j -> i ->
target contributes l(j, i) * l(i, target) to the pair mass a_ij (both
directions are summed).  Nodes that only reach the target through such a
two-step path therefore enter the ground set with zero singleton mass and one
pair term.  In root mode the masses are normalized to total one; central mode
additionally gives the target itself a self-exposure singleton (interactions
with the target stay zero) and leaves the masses raw for the caller to weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacity import TwoAdditiveCapacity, ValidationReport
from .errors import NoCapacityError, StructuralDriftError


@dataclass(frozen=True)
class Node:
    id: str
    level: int
    parent_id: str | None = None
    risk_value: float | None = None
    self_exposure: float | None = None


@dataclass(frozen=True)
class RiskNetwork:
    """Immutable-by-convention container of nodes and directed weighted links."""

    nodes: dict[str, Node]
    links: dict[tuple[str, str], float]

    @classmethod
    def build(cls, nodes, links) -> "RiskNetwork":
        """Assemble from Node iterables and (source, target, weight) triples.

        Duplicate ids/links and links touching unknown nodes are hard errors;
        semantic problems (extra roots, bad ranges...) are left for
        validate_hierarchy so they can be reported rather than raised.
        """
        node_map: dict[str, Node] = {}
        for node in nodes:
            if node.id in node_map:
                raise ValueError(f"duplicate node id {node.id!r}")
            node_map[node.id] = node
        link_map: dict[tuple[str, str], float] = {}
        for source, target, weight in links:
            key = (source, target)
            if key in link_map:
                raise ValueError(f"duplicate link {source!r} -> {target!r}")
            if source not in node_map or target not in node_map:
                raise ValueError(f"link {source!r} -> {target!r} references unknown node")
            link_map[key] = float(weight)
        return cls(node_map, link_map)

    def root(self) -> Node:
        roots = [n for n in self.nodes.values() if n.level == 0]
        if len(roots) != 1:
            raise ValueError(f"expected exactly one level-0 node, found {len(roots)}")
        return roots[0]

    def weight(self, source: str, target: str) -> float:
        return self.links.get((source, target), 0.0)

    def in_links(self, node_id: str) -> list[tuple[str, float]]:
        """Incoming links sorted by source id (zero-weight links included)."""
        found = [
            (s, w) for (s, t), w in self.links.items() if t == node_id
        ]
        found.sort()
        return found

    def risk_of(self, node_id: str) -> float:
        value = self.nodes[node_id].risk_value
        if value is None:
            raise ValueError(f"node {node_id!r} carries no risk value")
        return value

    def with_risk_values(self, values: dict[str, float]) -> "RiskNetwork":
        """Copy of the network with risk values replaced where given."""
        replaced = {
            nid: (
                Node(n.id, n.level, n.parent_id, float(values[nid]), n.self_exposure)
                if nid in values
                else n
            )
            for nid, n in self.nodes.items()
        }
        return RiskNetwork(replaced, dict(self.links))

    def structure_key(self):
        node_part = tuple(
            sorted((n.id, n.level, n.parent_id) for n in self.nodes.values())
        )
        return node_part, tuple(sorted(self.links))


@dataclass(frozen=True)
class NetworkSnapshot:
    """A network observed at one quarter; a series shares one structure."""

    date: int
    network: RiskNetwork


@dataclass(frozen=True)
class HierarchySpec:
    """Level sizes and per-parent sub-network sizes implied by a network.

    Each level's node count must be the sum of the sibling-group sizes hanging
    off the previous level, which ``consistent_with`` re-derives and checks.
    """

    level_sizes: tuple[int, ...]
    group_sizes: dict[str, int]

    @classmethod
    def of(cls, net: RiskNetwork) -> "HierarchySpec":
        depth = max(n.level for n in net.nodes.values())
        sizes = [0] * (depth + 1)
        groups: dict[str, int] = {}
        for node in net.nodes.values():
            sizes[node.level] += 1
            if node.parent_id is not None:
                groups[node.parent_id] = groups.get(node.parent_id, 0) + 1
        return cls(tuple(sizes), groups)

    def consistent_with(self, net: RiskNetwork) -> bool:
        for level in range(1, len(self.level_sizes)):
            from_groups = sum(
                count
                for parent, count in self.group_sizes.items()
                if parent in net.nodes and net.nodes[parent].level == level - 1
            )
            if from_groups != self.level_sizes[level]:
                return False
        return True


def validate_hierarchy(net: RiskNetwork) -> ValidationReport:
    """Report root uniqueness, level/parent consistency, value ranges and
    links that escape their sibling group."""
    violations: list[str] = []
    roots = [n for n in net.nodes.values() if n.level == 0]
    if len(roots) != 1:
        violations.append(f"hierarchy: found {len(roots)} level-0 nodes, expected 1")
    for node in sorted(net.nodes.values(), key=lambda n: n.id):
        if node.level < 0:
            violations.append(f"hierarchy: node {node.id} has negative level")
        if node.level == 0:
            if node.risk_value is not None:
                violations.append(f"hierarchy: root {node.id} must not carry a risk value")
            if node.parent_id is not None:
                violations.append(f"hierarchy: root {node.id} must not have a parent")
            continue
        if node.risk_value is None:
            violations.append(f"range: node {node.id} lacks a risk value")
        elif not 0.0 <= node.risk_value <= 1.0:
            violations.append(
                f"range: node {node.id} risk value {node.risk_value:.6g} outside [0,1]"
            )
        if node.self_exposure is not None and node.self_exposure < 0.0:
            violations.append(f"range: node {node.id} self exposure negative")
        if node.parent_id is None:
            violations.append(f"hierarchy: node {node.id} at level {node.level} has no parent")
        elif node.parent_id not in net.nodes:
            violations.append(f"hierarchy: node {node.id} parent {node.parent_id} unknown")
        elif net.nodes[node.parent_id].level != node.level - 1:
            violations.append(
                f"hierarchy: node {node.id} at level {node.level} has parent "
                f"{node.parent_id} at level {net.nodes[node.parent_id].level}"
            )
    for (source, target), weight in sorted(net.links.items()):
        if weight < 0.0:
            violations.append(f"range: link {source} -> {target} weight negative")
        if source == target:
            violations.append(
                f"structure: self-link on {source}; self-exposure belongs on the node"
            )
            continue
        src, dst = net.nodes[source], net.nodes[target]
        is_parent_link = src.parent_id == target
        is_sibling_link = (
            src.parent_id is not None
            and src.parent_id == dst.parent_id
            and src.level == dst.level
        )
        if not (is_parent_link or is_sibling_link):
            violations.append(
                f"structure: link {source} -> {target} leaves its sibling group"
            )
    return ValidationReport(tuple(violations))


@dataclass(frozen=True)
class PathHit:
    """A simple directed path ending at the target, with its weight product."""

    nodes: tuple[str, ...]
    weight: float

    @property
    def length(self) -> int:
        return len(self.nodes) - 1


def k_paths(net: RiskNetwork, target: str, k: int) -> list[PathHit]:
    """All simple directed paths of length 1..k ending at ``target``.

    Enumeration walks incoming links backwards from the target; nodes never
    repeat.  Zero-weight links are structural and appear with weight-product
    zero.  Results are sorted by (length, node sequence).
    """
    if k < 1:
        raise ValueError("path length bound k must be >= 1")
    if target not in net.nodes:
        raise ValueError(f"unknown node {target!r}")
    hits: list[PathHit] = []

    def extend(path: tuple[str, ...], product: float) -> None:
        if len(path) - 1 >= k:
            return
        for source, weight in net.in_links(path[0]):
            if source in path:
                continue
            grown = (source,) + path
            hits.append(PathHit(grown, product * weight))
            extend(grown, product * weight)

    extend((target,), 1.0)
    hits.sort(key=lambda h: (h.length, h.nodes))
    return hits


@dataclass(frozen=True)
class CapacityBuild:
    """Capacity over a target's two-step in-neighborhood.

    ``elements`` maps capacity indices to node ids; in central mode the target
    itself is the last element.  ``raw_mass`` is the pre-normalization total.
    """

    capacity: TwoAdditiveCapacity
    elements: tuple[str, ...]
    target: str
    mode: str
    raw_mass: float

    def index_of(self, node_id: str) -> int:
        return self.elements.index(node_id)


def default_self_exposure(net: RiskNetwork, node_id: str) -> float:
    """Fallback self-loop weight: incoming weight total capped at one."""
    node = net.nodes[node_id]
    if node.self_exposure is not None:
        return node.self_exposure
    return min(sum(w for _, w in net.in_links(node_id)), 1.0)


def build_capacity(net: RiskNetwork, target: str, mode: str = "root") -> CapacityBuild:
    """Construct the 2-additive capacity used to aggregate risk at ``target``.

    mode "root": ground set is the two-step in-neighborhood, masses normalized
    to one; a target with no incoming mass has no capacity.  mode "central":
    the target joins the ground set with its self-exposure as singleton mass
    and zero interactions, and the masses are left unnormalized.
    """
    if mode not in ("root", "central"):
        raise ValueError(f"unknown capacity mode {mode!r}")
    if target not in net.nodes:
        raise ValueError(f"unknown node {target!r}")
    direct = dict(net.in_links(target))
    reach2 = set(direct)
    for mid in direct:
        for source, _ in net.in_links(mid):
            if source != target:
                reach2.add(source)
    elements = sorted(reach2)
    if mode == "central":
        elements.append(target)
    n = len(elements)
    if n == 0:
        raise NoCapacityError(f"node {target!r} has no incoming links")
    singles = np.zeros(n)
    pairs = np.zeros((n, n))
    for i, nid in enumerate(elements):
        if nid == target:
            singles[i] = default_self_exposure(net, target)
        else:
            singles[i] = direct.get(nid, 0.0)
    neighbor_count = n - 1 if mode == "central" else n
    for i in range(neighbor_count):
        for j in range(i + 1, neighbor_count):
            a, b = elements[i], elements[j]
            mass = net.weight(b, a) * direct.get(a, 0.0) + net.weight(a, b) * direct.get(b, 0.0)
            pairs[i, j] = pairs[j, i] = mass
    raw = TwoAdditiveCapacity(singles, pairs, normalized=False)
    total = raw.total_mass
    if mode == "root":
        if total <= 0.0:
            raise NoCapacityError(f"node {target!r} has no incoming mass")
        return CapacityBuild(raw.normalize(), tuple(elements), target, mode, total)
    return CapacityBuild(raw, tuple(elements), target, mode, total)


def assert_same_structure(snapshots) -> None:
    """Raise StructuralDriftError unless all snapshots share one structure."""
    snaps = list(snapshots)
    if not snaps:
        return
    reference = snaps[0].network.structure_key()
    for snap in snaps[1:]:
        if snap.network.structure_key() != reference:
            raise StructuralDriftError(
                f"snapshot {snap.date} does not share the series structure"
            )
