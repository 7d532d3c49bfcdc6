"""Score computation: hand cases, the Moebius identity, and path variants."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskrank.engine import (
    RiskRankConfig,
    riskrank_for,
    riskrank_kpath,
    riskrank_node,
    riskrank_root,
    riskrank_series,
)
from riskrank.errors import NoCapacityError, StructuralDriftError
from riskrank.network import NetworkSnapshot, Node, RiskNetwork, build_capacity

from conftest import random_snapshot

UNIT = RiskRankConfig(central_weight_mode="unit")
SHAPLEY = RiskRankConfig(central_weight_mode="shapley")


def mobius_score(net, target):
    """Independent evaluation: normalized masses dotted with value products."""
    build = build_capacity(net, target, mode="root")
    x = np.array([net.risk_of(nid) for nid in build.elements])
    singles = build.capacity.singleton
    pairs = build.capacity.pairs
    total = float(singles @ x)
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            total += pairs[i, j] * x[i] * x[j]
    return total


def two_child_snapshot(x_a=0.8, x_b=0.5):
    net = RiskNetwork.build(
        [Node("S", 0), Node("A", 1, "S", x_a), Node("B", 1, "S", x_b)],
        [("A", "S", 0.6), ("B", "S", 0.4), ("B", "A", 0.5)],
    )
    return NetworkSnapshot(0, net)


# ------------------------------------------------------------ root mode

def test_zero_risks_give_zero_total():
    dec = riskrank_root(two_child_snapshot(0.0, 0.0))
    assert dec.total == pytest.approx(0.0, abs=1e-12)
    assert dec.individual == 0.0


def test_no_interactions_reduce_to_weighted_mean():
    net = RiskNetwork.build(
        [Node("S", 0), Node("A", 1, "S", 0.9), Node("B", 1, "S", 0.1)],
        [("A", "S", 0.75), ("B", "S", 0.25)],
    )
    dec = riskrank_root(NetworkSnapshot(0, net))
    assert dec.indirect == pytest.approx(0.0, abs=1e-12)
    assert dec.total == pytest.approx(0.75 * 0.9 + 0.25 * 0.1, abs=1e-12)


def test_worked_two_child_example():
    dec = riskrank_root(two_child_snapshot())
    assert dec.total == pytest.approx(0.8 / 1.3, abs=1e-12)
    assert dec.direct == pytest.approx(0.68 / 1.3, abs=1e-12)
    assert dec.indirect == pytest.approx(0.12 / 1.3, abs=1e-12)
    assert dec.individual == 0.0
    assert dec.total_raw == pytest.approx(dec.individual + dec.direct + dec.indirect,
                                          abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_root_score_equals_mobius_form(seed):
    rng = np.random.default_rng(seed)
    snap = random_snapshot(rng, two_level=bool(rng.integers(2)))
    dec = riskrank_root(snap)
    assert dec.total_raw == pytest.approx(mobius_score(snap.network, "ROOT"),
                                          abs=1e-12)
    assert dec.individual + dec.direct + dec.indirect == pytest.approx(
        dec.total_raw, abs=1e-12
    )
    assert 0.0 <= dec.total <= 1.0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_root_monotone_in_any_risk_value(seed):
    rng = np.random.default_rng(seed)
    snap = random_snapshot(rng, two_level=bool(rng.integers(2)))
    before = riskrank_root(snap).total
    non_root = [nid for nid, n in snap.network.nodes.items() if n.level > 0]
    victim = non_root[int(rng.integers(len(non_root)))]
    bumped = min(snap.network.risk_of(victim) + float(rng.uniform(0, 0.5)), 1.0)
    after = riskrank_root(
        NetworkSnapshot(0, snap.network.with_risk_values({victim: bumped}))
    ).total
    assert after >= before - 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_indirect_never_exceeds_min_form(seed):
    # with x in [0,1], x_i * x_j <= min(x_i, x_j), so the product-form
    # indirect sum is dominated by the min-form one
    rng = np.random.default_rng(seed)
    snap = random_snapshot(rng)
    build = build_capacity(snap.network, "ROOT")
    x = np.array([snap.network.risk_of(nid) for nid in build.elements])
    dec = riskrank_root(snap)
    min_form = sum(
        build.capacity.pairs[i, j] * min(x[i], x[j])
        for i in range(len(x)) for j in range(i + 1, len(x))
    )
    assert dec.indirect <= min_form + 1e-12


def test_root_bounds_and_corners():
    snap = two_child_snapshot(1.0, 1.0)
    assert riskrank_root(snap).total == pytest.approx(1.0, abs=1e-12)
    rng = np.random.default_rng(5)
    for _ in range(20):
        s = random_snapshot(rng)
        dec = riskrank_root(s)
        xs = [n.risk_value for n in s.network.nodes.values() if n.level > 0]
        assert dec.total <= max(xs) + 1e-12
        assert 0.0 <= dec.total <= 1.0


def test_pair_free_network_is_idempotent():
    net = RiskNetwork.build(
        [Node("S", 0), Node("A", 1, "S", 0.37), Node("B", 1, "S", 0.37)],
        [("A", "S", 0.6), ("B", "S", 0.4)],
    )
    assert riskrank_root(NetworkSnapshot(0, net)).total == pytest.approx(0.37, abs=1e-12)


# ------------------------------------------------------------ node mode

def test_isolated_node_unit_mode():
    net = RiskNetwork.build(
        [Node("S", 0), Node("A", 1, "S", 0.7), Node("B", 1, "S", 0.2)],
        [("A", "S", 1.0), ("B", "S", 1.0)],
    )
    dec = riskrank_node(NetworkSnapshot(0, net), "A", UNIT)
    assert (dec.individual, dec.direct, dec.indirect) == (0.7, 0.0, 0.0)
    assert dec.total == 0.7


def test_unit_mode_clamps_at_one():
    net = RiskNetwork.build(
        [Node("S", 0), Node("A", 1, "S", 0.9), Node("B", 1, "S", 0.3)],
        [("A", "S", 1.0), ("B", "S", 1.0), ("B", "A", 1.0)],
    )
    dec = riskrank_node(NetworkSnapshot(0, net), "A", UNIT)
    assert dec.individual == pytest.approx(0.9)
    assert dec.direct == pytest.approx(0.3, abs=1e-12)
    assert dec.total_raw == pytest.approx(1.2, abs=1e-12)
    assert dec.total == 1.0
    unclamped = riskrank_node(
        NetworkSnapshot(0, net), "A", RiskRankConfig("unit", clamp=False)
    )
    assert unclamped.total == pytest.approx(1.2, abs=1e-12)


def shapley_mode_fixture():
    net = RiskNetwork.build(
        [Node("S", 0), Node("T", 1, "S", 0.5, self_exposure=0.6),
         Node("A", 1, "S", 0.9), Node("B", 1, "S", 0.2)],
        [("T", "S", 1.0), ("A", "S", 1.0), ("B", "S", 1.0),
         ("A", "T", 0.5), ("B", "T", 0.3), ("B", "A", 0.4)],
    )
    return NetworkSnapshot(0, net)


def test_shapley_mode_three_node_case():
    # masses at T: a_A=0.5, a_B=0.3, a_AB=0.4*0.5=0.2, self=0.6, Z=1.6
    dec = riskrank_node(shapley_mode_fixture(), "T", SHAPLEY)
    assert dec.individual == pytest.approx(0.6 * 0.5 / 1.6, abs=1e-12)
    assert dec.direct == pytest.approx((0.5 * 0.9 + 0.3 * 0.2) / 1.6, abs=1e-12)
    assert dec.indirect == pytest.approx(0.2 * 0.9 * 0.2 / 1.6, abs=1e-12)
    # Moebius form with the self-loop as a pure singleton
    expected = (0.6 * 0.5 + 0.5 * 0.9 + 0.3 * 0.2 + 0.2 * 0.9 * 0.2) / 1.6
    assert dec.total == pytest.approx(expected, abs=1e-12)
    assert dec.total == pytest.approx(0.52875, abs=1e-12)


def test_node_requires_risk_value_and_non_root():
    net = RiskNetwork.build(
        [Node("S", 0), Node("A", 1, "S", None)], [("A", "S", 1.0)]
    )
    snap = NetworkSnapshot(0, net)
    with pytest.raises(ValueError, match="risk value"):
        riskrank_node(snap, "A", UNIT)
    with pytest.raises(ValueError, match="root"):
        riskrank_node(snap, "S", UNIT)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_node_modes_monotone_in_risk_values(seed):
    rng = np.random.default_rng(seed)
    snap = random_snapshot(rng)
    target = "C0"
    non_root = [nid for nid, n in snap.network.nodes.items() if n.level > 0]
    victim = non_root[int(rng.integers(len(non_root)))]
    bumped = min(snap.network.risk_of(victim) + 0.3, 1.0)
    bumped_snap = NetworkSnapshot(
        0, snap.network.with_risk_values({victim: bumped})
    )
    for cfg in (UNIT, SHAPLEY):
        try:
            before = riskrank_node(snap, target, cfg).total
        except NoCapacityError:
            continue  # no in-links and zero exposure: outside the precondition
        after = riskrank_node(bumped_snap, target, cfg).total
        assert after >= before - 1e-12


# ------------------------------------------------------------ k > 2

def chain_snapshot():
    net = RiskNetwork.build(
        [Node("S", 0), Node("A", 1, "S", 0.4),
         Node("B", 2, "A", 0.7), Node("C", 3, "B", 0.5)],
        [("A", "S", 0.6), ("B", "A", 0.8), ("C", "B", 0.9)],
    )
    return NetworkSnapshot(0, net)


def test_kpath_chain_hand_case():
    # masses: 0.6 (A), 0.48 (B->A->S), 0.432 (C->B->A->S); Z = 1.512
    cfg = RiskRankConfig(max_path_length=3)
    dec = riskrank_kpath(chain_snapshot(), "S", cfg)
    z = 0.6 + 0.48 + 0.432
    assert dec.direct == pytest.approx(0.6 * 0.4 / z, abs=1e-12)
    assert dec.indirect == pytest.approx(
        (0.48 * 0.7 * 0.4 + 0.432 * 0.5 * 0.7 * 0.4) / z, abs=1e-12
    )
    assert dec.total == pytest.approx(0.43488 / 1.512, abs=1e-12)


def test_kpath_k1_keeps_direct_only():
    dec = riskrank_kpath(chain_snapshot(), "S", RiskRankConfig(max_path_length=1))
    assert dec.indirect == 0.0
    assert dec.direct == pytest.approx(0.4, abs=1e-12)  # single in-link, normalized


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_kpath_k2_equals_base_operators(seed):
    rng = np.random.default_rng(seed)
    snap = random_snapshot(rng, two_level=True)
    base = riskrank_root(snap)
    via_paths = riskrank_kpath(snap, "ROOT", RiskRankConfig(max_path_length=2))
    for field in ("individual", "direct", "indirect", "total_raw", "total"):
        assert getattr(via_paths, field) == pytest.approx(
            getattr(base, field), abs=1e-12
        )
    for cfg in (UNIT, SHAPLEY):
        cfg2 = RiskRankConfig(cfg.central_weight_mode, cfg.clamp, 2)
        node_base = riskrank_node(snap, "C0", cfg)
        node_paths = riskrank_kpath(snap, "C0", cfg2)
        for field in ("individual", "direct", "indirect", "total_raw", "total"):
            assert getattr(node_paths, field) == pytest.approx(
                getattr(node_base, field), abs=1e-12
            )


def test_kpath_rejects_bad_k():
    with pytest.raises(ValueError):
        RiskRankConfig(max_path_length=0)


# ------------------------------------------------------------- series

def test_single_snapshot_series_matches_node_call():
    snap = two_child_snapshot()
    rows = riskrank_series([snap], ["A"], UNIT)
    assert len(rows) == 1
    assert rows[0].decomposition == riskrank_node(snap, "A", UNIT)


def test_constant_snapshots_give_constant_series():
    snap = two_child_snapshot()
    series = [NetworkSnapshot(q, snap.network) for q in range(4)]
    rows = riskrank_series(series, ["S", "A"], UNIT)
    totals = {target: {r.decomposition.total for r in rows if r.target == target}
              for target in ("S", "A")}
    assert all(len(v) == 1 for v in totals.values())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**9))
def test_randomized_series_equals_per_snapshot_calls(seed):
    rng = np.random.default_rng(seed)
    base = random_snapshot(rng)
    snaps = []
    for q in range(3):
        values = {
            nid: float(rng.uniform())
            for nid, node in base.network.nodes.items() if node.level > 0
        }
        snaps.append(NetworkSnapshot(q, base.network.with_risk_values(values)))
    rows = riskrank_series(snaps, ["ROOT", "C0"], UNIT)
    for row in rows:
        snap = snaps[row.date]
        assert row.decomposition == riskrank_for(snap, row.target, UNIT)


def test_series_rejects_structural_drift():
    snap = two_child_snapshot()
    other = RiskNetwork.build(
        [Node("S", 0), Node("A", 1, "S", 0.8)], [("A", "S", 0.6)]
    )
    with pytest.raises(StructuralDriftError):
        riskrank_series(
            [snap, NetworkSnapshot(1, other)], ["S"], UNIT
        )
