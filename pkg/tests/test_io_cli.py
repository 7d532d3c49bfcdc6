"""File formats, schema diagnostics, synthetic generation, CLI contract."""

import json

import numpy as np
import pytest

from riskrank.cli import main
from riskrank.early_warning import CrisisEvent, CrisisEvents, IndicatorPanel
from riskrank.errors import SchemaError
from riskrank.io import (
    RunConfig,
    load_config,
    parse_inputs,
    read_events,
    read_indicators,
    read_nodes_links,
    read_series,
    write_events,
    write_indicators,
    write_links_csv,
    write_nodes_csv,
)
from riskrank.network import NetworkSnapshot, Node, RiskNetwork
from riskrank.quarters import quarter_index, quarter_label
from riskrank.synth import SynthSpec, generate_synthetic


def small_snapshots():
    def net(xa, xb):
        return RiskNetwork.build(
            [Node("S", 0), Node("A", 1, "S", xa, self_exposure=0.4),
             Node("B", 1, "S", xb)],
            [("A", "S", 0.6), ("B", "S", 0.4), ("B", "A", 0.5)],
        )
    q = quarter_index("2005-Q1")
    return [NetworkSnapshot(q, net(0.8, 0.5)), NetworkSnapshot(q + 1, net(0.3, 0.9))]


# -------------------------------------------------------------- quarters

def test_quarter_roundtrip_and_validation():
    assert quarter_index("2008-Q1") == 2008 * 4
    assert quarter_label(quarter_index("1999-Q4")) == "1999-Q4"
    for bad in ("2008-Q5", "2008Q1", "08-Q1", "2008-q1"):
        with pytest.raises(ValueError):
            quarter_index(bad)


# ------------------------------------------------------------ round trips

def test_network_csv_roundtrip(tmp_path):
    snapshots = small_snapshots()
    nodes, links = tmp_path / "nodes.csv", tmp_path / "links.csv"
    write_nodes_csv(nodes, snapshots)
    write_links_csv(links, snapshots)
    again = read_nodes_links(nodes, links)
    assert [s.date for s in again] == [s.date for s in snapshots]
    for a, b in zip(again, snapshots):
        assert a.network == b.network
    # writing what was read back reproduces the bytes
    nodes2, links2 = tmp_path / "nodes2.csv", tmp_path / "links2.csv"
    write_nodes_csv(nodes2, again)
    write_links_csv(links2, again)
    assert nodes2.read_bytes() == nodes.read_bytes()
    assert links2.read_bytes() == links.read_bytes()


def test_indicator_roundtrip_with_missing_cells(tmp_path):
    q0 = quarter_index("2010-Q1")
    values = np.array([
        [[1.5, np.nan], [0.25, -2.0]],
        [[np.nan, np.nan], [3.0, 4.0]],
    ])
    panel = IndicatorPanel(("A", "B"), (q0, q0 + 1), values, ("ind_1", "ind_2"))
    path = tmp_path / "indicators.csv"
    write_indicators(path, panel)
    again = read_indicators(path)
    assert again.entities == panel.entities
    assert again.quarters == panel.quarters
    assert np.array_equal(again.values, panel.values, equal_nan=True)


def test_events_roundtrip(tmp_path):
    events = CrisisEvents((
        CrisisEvent("A", quarter_index("2008-Q1"), quarter_index("2009-Q2")),
        CrisisEvent("B", quarter_index("2011-Q3")),
    ))
    path = tmp_path / "events.csv"
    write_events(path, events)
    assert read_events(path) == events


def test_parse_inputs_counts(tmp_path):
    generate_synthetic(SynthSpec(entities=4, seed=5), tmp_path)
    panel, events, snapshots = parse_inputs(
        tmp_path / "indicators.csv", tmp_path / "events.csv",
        tmp_path / "nodes.csv", tmp_path / "links.csv",
    )
    assert panel.entities == ("E01", "E02", "E03", "E04")
    assert panel.n_indicators == 14
    assert len(panel.quarters) == 76
    assert len(snapshots) == 76
    assert len(snapshots[0].network.nodes) == 5
    assert all(e.entity in panel.entities for e in events.events)


# --------------------------------------------------------- schema errors

def test_bad_quarter_reports_line(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text("entity,crisis_start,crisis_end\nA,2008-Q9,\n")
    with pytest.raises(SchemaError) as err:
        read_events(path)
    assert err.value.line == 2


def test_unknown_entity_in_links(tmp_path):
    nodes = tmp_path / "nodes.csv"
    links = tmp_path / "links.csv"
    nodes.write_text(
        "date,node_id,level,parent_id,risk_value,self_exposure\n"
        "2005-Q1,S,0,,,\n2005-Q1,A,1,S,0.5,\n"
    )
    links.write_text("date,source_id,target_id,weight\n2005-Q1,A,GHOST,1.0\n")
    with pytest.raises(SchemaError, match="unknown entity"):
        read_nodes_links(nodes, links)


def test_out_of_range_risk_value(tmp_path):
    nodes = tmp_path / "nodes.csv"
    nodes.write_text(
        "date,node_id,level,parent_id,risk_value,self_exposure\n"
        "2005-Q1,S,0,,,\n2005-Q1,A,1,S,1.5,\n"
    )
    links = tmp_path / "links.csv"
    links.write_text("date,source_id,target_id,weight\n")
    with pytest.raises(SchemaError, match="outside"):
        read_nodes_links(nodes, links)


def test_wrong_header_is_rejected(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text("entity,start\nA,2008-Q1\n")
    with pytest.raises(SchemaError, match="header"):
        read_events(path)


def test_duplicate_indicator_cell(tmp_path):
    path = tmp_path / "indicators.csv"
    path.write_text("entity,date,ind_1\nA,2005-Q1,1.0\nA,2005-Q1,2.0\n")
    with pytest.raises(SchemaError, match="duplicate"):
        read_indicators(path)


# ------------------------------------------------------------ series files

def test_read_series_prob_and_decomposition(tmp_path):
    probs = tmp_path / "p.csv"
    probs.write_text("entity,date,p\nB,2005-Q2,0.25\nA,2005-Q1,0.5\n")
    series = read_series(probs)
    assert series.name == "p"
    assert series.cells[0][0] == "A"  # sorted by (entity, date)
    decomp = tmp_path / "rr.csv"
    decomp.write_text(
        "date,target,individual,direct,indirect,total_raw,total\n"
        "2005-Q1,A,0.1,0.2,0.0,0.3,0.3\n"
    )
    series = read_series(decomp)
    assert series.cells == (("A", quarter_index("2005-Q1"), 0.3),)
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(SchemaError, match="unrecognized"):
        read_series(bad)


# ------------------------------------------------------------- synthesis

def test_synth_same_seed_identical_bytes(tmp_path):
    spec = SynthSpec(entities=3, seed=11)
    paths_a = generate_synthetic(spec, tmp_path / "a")
    paths_b = generate_synthetic(spec, tmp_path / "b")
    for key in paths_a:
        assert paths_a[key].read_bytes() == paths_b[key].read_bytes()
    paths_c = generate_synthetic(SynthSpec(entities=3, seed=12), tmp_path / "c")
    assert any(
        paths_a[k].read_bytes() != paths_c[k].read_bytes() for k in paths_a
    )


def test_synth_zero_intensity_means_no_events(tmp_path):
    paths = generate_synthetic(
        SynthSpec(entities=3, crisis_intensity=0.0, seed=1), tmp_path
    )
    assert read_events(paths["events"]).events == ()


def test_synth_spec_validation():
    with pytest.raises(ValueError):
        SynthSpec(entities=0)
    with pytest.raises(ValueError):
        SynthSpec(start="2010-Q1", end="2009-Q1")
    with pytest.raises(ValueError):
        SynthSpec(network_density=1.5)


# ------------------------------------------------------------------- CLI

def test_cli_validate_ok(tmp_path, capsys):
    snapshots = small_snapshots()
    write_nodes_csv(tmp_path / "nodes.csv", snapshots)
    write_links_csv(tmp_path / "links.csv", snapshots)
    code = main(["validate", "--nodes", str(tmp_path / "nodes.csv"),
                 "--links", str(tmp_path / "links.csv")])
    assert code == 0
    assert "ok:" in capsys.readouterr().out


def test_cli_validate_empty_links_is_no_capacity(tmp_path, capsys):
    (tmp_path / "nodes.csv").write_text(
        "date,node_id,level,parent_id,risk_value,self_exposure\n"
        "2005-Q1,S,0,,,\n2005-Q1,A,1,S,0.5,\n"
    )
    (tmp_path / "links.csv").write_text("date,source_id,target_id,weight\n")
    code = main(["validate", "--nodes", str(tmp_path / "nodes.csv"),
                 "--links", str(tmp_path / "links.csv")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error: no-capacity:")
    assert err.count("\n") == 1


def test_cli_validate_reports_hierarchy_violation(tmp_path, capsys):
    (tmp_path / "nodes.csv").write_text(
        "date,node_id,level,parent_id,risk_value,self_exposure\n"
        "2005-Q1,S,0,,,\n2005-Q1,S2,0,,,\n2005-Q1,A,1,S,0.5,\n"
    )
    (tmp_path / "links.csv").write_text(
        "date,source_id,target_id,weight\n2005-Q1,A,S,1.0\n"
    )
    code = main(["validate", "--nodes", str(tmp_path / "nodes.csv"),
                 "--links", str(tmp_path / "links.csv")])
    assert code == 1
    captured = capsys.readouterr()
    assert "level-0" in captured.out
    assert captured.err.startswith("error: invalid: hierarchy:")


def test_cli_schema_error_has_single_diagnostic_line(tmp_path, capsys):
    (tmp_path / "events.csv").write_text("entity,crisis_start,crisis_end\nA,huh,\n")
    (tmp_path / "indicators.csv").write_text("entity,date,ind_1\nA,2005-Q1,1.0\n")
    code = main(["backtest", "--indicators", str(tmp_path / "indicators.csv"),
                 "--events", str(tmp_path / "events.csv"),
                 "--out", str(tmp_path / "p.csv")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error: schema:")
    assert "events.csv:2" in err


def test_cli_shapley_output(tmp_path, capsys):
    measure = {"n": 2, "mu": {"": 0.0, "1": 0.4, "2": 0.4, "1,2": 1.0}}
    path = tmp_path / "measure.json"
    path.write_text(json.dumps(measure))
    assert main(["shapley", "--measure", str(path)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "shapley 1 0.5"
    assert out[2] == "interaction 1,2 0.2"


def test_cli_shapley_rejects_invalid_measure(tmp_path, capsys):
    measure = {"n": 2, "mu": {"": 0.0, "1": 0.9, "2": 0.4, "1,2": 0.5}}
    path = tmp_path / "measure.json"
    path.write_text(json.dumps(measure))
    assert main(["shapley", "--measure", str(path)]) == 1
    assert "monotonicity" in capsys.readouterr().err


def test_cli_fixture_check_passes(capsys):
    assert main(["evaluate", "--table2-fixture"]) == 0
    out = capsys.readouterr().out
    assert "flagged-inconsistent" in out
    assert "MISMATCH" not in out


def test_cli_pipeline_and_config_override(tmp_path, capsys):
    data = tmp_path / "data"
    assert main(["synth", "--outdir", str(data), "--entities", "5",
                 "--seed", "3"]) == 0
    config = {
        "indicators": str(data / "indicators.csv"),
        "events": str(data / "events.csv"),
        "nodes": str(data / "nodes.csv"),
        "links": str(data / "links.csv"),
        "h2": 12,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    probs = tmp_path / "probabilities.csv"
    assert main(["backtest", "--config", str(config_path), "--out", str(probs)]) == 0
    rr = tmp_path / "riskrank.csv"
    assert main(["riskrank", "--config", str(config_path),
                 "--probabilities", str(probs), "--targets", "all",
                 "--out", str(rr)]) == 0
    report = tmp_path / "eval_report.csv"
    assert main(["evaluate", "--config", str(config_path), str(probs), str(rr),
                 "--out", str(report)]) == 0
    lines = report.read_text().splitlines()
    header = lines[0]
    assert header.startswith("model,mu_pref,tau,TP,TN,FP,FN,T1,T2,L,U_a,U_r,AUC")
    # the generated crises correlate with the indicators: real signal
    auc_col = header.split(",").index("AUC")
    aucs = {row.split(",")[0]: float(row.split(",")[auc_col]) for row in lines[1:]}
    assert all(auc > 0.5 for auc in aucs.values())
    # flag overrides config: an impossible horizon from the flag must error
    assert main(["backtest", "--config", str(config_path), "--h1", "13",
                 "--out", str(probs)]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_k1_keeps_direct_effects_only(tmp_path):
    data = tmp_path / "data"
    main(["synth", "--outdir", str(data), "--entities", "4", "--seed", "6"])
    out = tmp_path / "rr.csv"
    assert main(["riskrank", "--nodes", str(data / "nodes.csv"),
                 "--links", str(data / "links.csv"),
                 "--targets", "root", "--k", "1", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()[1:]
    indirect_col = 4
    assert all(float(r.split(",")[indirect_col]) == 0.0 for r in rows)


def test_cli_report_long_form(tmp_path):
    data = tmp_path / "data"
    main(["synth", "--outdir", str(data), "--entities", "3", "--seed", "2"])
    out = tmp_path / "series.csv"
    assert main(["report", "--nodes", str(data / "nodes.csv"),
                 "--links", str(data / "links.csv"),
                 "--targets", "root", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "date,target,component,value"
    assert len(lines) == 1 + 76 * 4


def test_run_config_validation(tmp_path):
    with pytest.raises(ValueError):
        RunConfig(h1=8, h2=5)
    with pytest.raises(ValueError):
        RunConfig(mu_grid=(0.5, 1.2))
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"h1": 4, "mu_grid": [0.2, 0.4]}))
    cfg = load_config(path)
    assert cfg.h1 == 4 and cfg.mu_grid == (0.2, 0.4)
    path.write_text(json.dumps({"who": 1}))
    with pytest.raises(ValueError, match="unknown config"):
        load_config(path)
