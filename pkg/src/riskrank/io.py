"""CSV schemas, readers/writers, and run configuration.

All files are UTF-8 CSV with a mandatory header row and ``YYYY-Qn`` dates:

    nodes.csv          date,node_id,level,parent_id,risk_value,self_exposure
    links.csv          date,source_id,target_id,weight
    indicators.csv     entity,date,ind_1,...,ind_K
    events.csv         entity,crisis_start,crisis_end
    probabilities.csv  entity,date,p
    decompositions     date,target,individual,direct,indirect,total_raw,total

The root node row leaves risk_value empty; empty cells generally mean
"absent".  Floats are written with 10 significant digits so that identical
runs produce identical bytes.  Schema problems are reported with the file
and line they occur on.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .early_warning import CrisisEvent, CrisisEvents, IndicatorPanel
from .errors import SchemaError
from .network import NetworkSnapshot, Node, RiskNetwork, assert_same_structure
from .quarters import quarter_index, quarter_label

NODES_HEADER = ["date", "node_id", "level", "parent_id", "risk_value", "self_exposure"]
LINKS_HEADER = ["date", "source_id", "target_id", "weight"]
EVENTS_HEADER = ["entity", "crisis_start", "crisis_end"]
PROBS_HEADER = ["entity", "date", "p"]
DECOMP_HEADER = ["date", "target", "individual", "direct", "indirect", "total_raw", "total"]
EVAL_HEADER = [
    "model", "mu_pref", "tau", "TP", "TN", "FP", "FN", "T1", "T2", "L",
    "U_a", "U_r", "AUC", "precision_signal", "recall_signal",
    "precision_tranquil", "recall_tranquil", "accuracy",
]


def fmt(value: float | None) -> str:
    if value is None:
        return "-"
    return f"{value:.10g}"


def _rows(path: Path, expected_header: list[str] | None = None):
    """Yield (line_number, row) pairs after checking the header."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(path, 1, "missing header row") from None
        if expected_header is not None and header != expected_header:
            raise SchemaError(
                path, 1, f"header {header} != expected {expected_header}"
            )
        for row in reader:
            if not row:
                continue
            yield reader.line_num, row, header


def _parse_quarter(path: Path, line: int, text: str) -> int:
    try:
        return quarter_index(text)
    except ValueError as exc:
        raise SchemaError(path, line, str(exc)) from None


def _parse_float(path: Path, line: int, text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SchemaError(path, line, f"bad {what} {text!r}") from None


def read_nodes_links(nodes_path, links_path) -> list[NetworkSnapshot]:
    """Parse a snapshot series; all dates must share one structure."""
    nodes_path, links_path = Path(nodes_path), Path(links_path)
    per_date_nodes: dict[int, list[Node]] = {}
    for line, row, _ in _rows(nodes_path, NODES_HEADER):
        if len(row) != len(NODES_HEADER):
            raise SchemaError(nodes_path, line, f"expected {len(NODES_HEADER)} columns")
        date = _parse_quarter(nodes_path, line, row[0])
        node_id = row[1].strip()
        if not node_id:
            raise SchemaError(nodes_path, line, "empty node_id")
        try:
            level = int(row[2])
        except ValueError:
            raise SchemaError(nodes_path, line, f"bad level {row[2]!r}") from None
        if level < 0:
            raise SchemaError(nodes_path, line, "level must be >= 0")
        parent = row[3].strip() or None
        risk = None
        if row[4].strip():
            risk = _parse_float(nodes_path, line, row[4], "risk_value")
            if not 0.0 <= risk <= 1.0:
                raise SchemaError(nodes_path, line, f"risk_value {risk} outside [0,1]")
        exposure = None
        if row[5].strip():
            exposure = _parse_float(nodes_path, line, row[5], "self_exposure")
            if exposure < 0.0:
                raise SchemaError(nodes_path, line, "self_exposure must be >= 0")
        per_date_nodes.setdefault(date, []).append(
            Node(node_id, level, parent, risk, exposure)
        )
    if not per_date_nodes:
        raise SchemaError(nodes_path, 2, "no node rows")

    per_date_links: dict[int, list[tuple[str, str, float]]] = {}
    for line, row, _ in _rows(links_path, LINKS_HEADER):
        if len(row) != len(LINKS_HEADER):
            raise SchemaError(links_path, line, f"expected {len(LINKS_HEADER)} columns")
        date = _parse_quarter(links_path, line, row[0])
        if date not in per_date_nodes:
            raise SchemaError(links_path, line, f"link date {row[0]} has no node rows")
        source, target = row[1].strip(), row[2].strip()
        known = {n.id for n in per_date_nodes[date]}
        if source not in known or target not in known:
            raise SchemaError(links_path, line, f"unknown entity in link {source}->{target}")
        weight = _parse_float(links_path, line, row[3], "weight")
        if weight < 0.0:
            raise SchemaError(links_path, line, "weight must be >= 0")
        per_date_links.setdefault(date, []).append((source, target, weight))

    snapshots = []
    for date in sorted(per_date_nodes):
        try:
            net = RiskNetwork.build(per_date_nodes[date], per_date_links.get(date, []))
        except ValueError as exc:
            raise SchemaError(nodes_path, 0, f"date {quarter_label(date)}: {exc}") from None
        snapshots.append(NetworkSnapshot(date, net))
    assert_same_structure(snapshots)
    return snapshots


def write_nodes_csv(path, snapshots) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(NODES_HEADER)
        for snap in snapshots:
            for nid in sorted(snap.network.nodes):
                node = snap.network.nodes[nid]
                writer.writerow([
                    quarter_label(snap.date),
                    node.id,
                    node.level,
                    node.parent_id or "",
                    fmt(node.risk_value) if node.risk_value is not None else "",
                    fmt(node.self_exposure) if node.self_exposure is not None else "",
                ])


def write_links_csv(path, snapshots) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(LINKS_HEADER)
        for snap in snapshots:
            for (source, target) in sorted(snap.network.links):
                writer.writerow([
                    quarter_label(snap.date), source, target,
                    fmt(snap.network.links[(source, target)]),
                ])


def read_indicators(path) -> IndicatorPanel:
    path = Path(path)
    cells: dict[tuple[str, int], list[float]] = {}
    names: tuple[str, ...] | None = None
    for line, row, header in _rows(path):
        if names is None:
            if len(header) < 3 or header[:2] != ["entity", "date"]:
                raise SchemaError(path, 1, "header must be entity,date,ind_1,...")
            names = tuple(header[2:])
        if len(row) != 2 + len(names):
            raise SchemaError(path, line, f"expected {2 + len(names)} columns")
        entity = row[0].strip()
        if not entity:
            raise SchemaError(path, line, "empty entity")
        date = _parse_quarter(path, line, row[1])
        if (entity, date) in cells:
            raise SchemaError(path, line, f"duplicate cell {entity} {row[1]}")
        values = [
            _parse_float(path, line, cell, "indicator") if cell.strip() else np.nan
            for cell in row[2:]
        ]
        cells[(entity, date)] = values
    if names is None or not cells:
        raise SchemaError(path, 2, "no indicator rows")
    entities = tuple(sorted({e for e, _ in cells}))
    quarters = tuple(sorted({q for _, q in cells}))
    values = np.full((len(entities), len(quarters), len(names)), np.nan)
    e_index = {e: i for i, e in enumerate(entities)}
    q_index = {q: i for i, q in enumerate(quarters)}
    for (entity, date), row_values in cells.items():
        values[e_index[entity], q_index[date], :] = row_values
    return IndicatorPanel(entities, quarters, values, names)


def write_indicators(path, panel: IndicatorPanel) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity", "date", *panel.indicator_names])
        for ei, entity in enumerate(panel.entities):
            for qi, quarter in enumerate(panel.quarters):
                row_values = panel.values[ei, qi, :]
                if np.isnan(row_values).all():
                    continue
                writer.writerow([
                    entity, quarter_label(quarter),
                    *("" if np.isnan(v) else fmt(float(v)) for v in row_values),
                ])


def read_events(path) -> CrisisEvents:
    path = Path(path)
    events = []
    for line, row, _ in _rows(path, EVENTS_HEADER):
        if len(row) != len(EVENTS_HEADER):
            raise SchemaError(path, line, f"expected {len(EVENTS_HEADER)} columns")
        entity = row[0].strip()
        if not entity:
            raise SchemaError(path, line, "empty entity")
        start = _parse_quarter(path, line, row[1])
        end = _parse_quarter(path, line, row[2]) if row[2].strip() else None
        try:
            events.append(CrisisEvent(entity, start, end))
        except ValueError as exc:
            raise SchemaError(path, line, str(exc)) from None
    return CrisisEvents(tuple(events))


def write_events(path, events: CrisisEvents) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENTS_HEADER)
        for event in events.events:
            writer.writerow([
                event.entity,
                quarter_label(event.start),
                quarter_label(event.end) if event.end is not None else "",
            ])


def parse_inputs(indicators_path, events_path, nodes_path, links_path):
    """Load the full input set: panel, crisis events, snapshot series."""
    panel = read_indicators(indicators_path)
    events = read_events(events_path)
    snapshots = read_nodes_links(nodes_path, links_path)
    return panel, events, snapshots


@dataclass(frozen=True)
class ProbSeries:
    """A named probability series as (entity, quarter, p) cells."""

    name: str
    cells: tuple[tuple[str, int, float], ...]


def write_probabilities(path, result) -> None:
    """Backtest output; masked cells are simply absent."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROBS_HEADER)
        for ei, entity in enumerate(result.entities):
            for qi, quarter in enumerate(result.quarters):
                p = result.probabilities[ei, qi]
                if np.isnan(p):
                    continue
                writer.writerow([entity, quarter_label(quarter), fmt(float(p))])


def read_series(path) -> ProbSeries:
    """Read a probability series; decomposition files count with p = total."""
    path = Path(path)
    cells = []
    mode = None
    for line, row, header in _rows(path):
        if mode is None:
            if header == PROBS_HEADER:
                mode = "probs"
            elif header == DECOMP_HEADER:
                mode = "decomp"
            else:
                raise SchemaError(path, 1, f"unrecognized series header {header}")
        if mode == "probs":
            entity, date_text, p_text = row[0], row[1], row[2]
        else:
            entity, date_text, p_text = row[1], row[0], row[6]
        date = _parse_quarter(path, line, date_text)
        p = _parse_float(path, line, p_text, "probability")
        if not 0.0 <= p <= 1.0:
            raise SchemaError(path, line, f"probability {p} outside [0,1]")
        cells.append((entity.strip(), date, p))
    if not cells:
        raise SchemaError(path, 2, "no series rows")
    cells.sort(key=lambda c: (c[0], c[1]))
    return ProbSeries(path.stem, tuple(cells))


def write_decompositions(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(DECOMP_HEADER)
        for row in rows:
            d = row.decomposition
            writer.writerow([
                quarter_label(row.date), row.target, fmt(d.individual),
                fmt(d.direct), fmt(d.indirect), fmt(d.total_raw), fmt(d.total),
            ])


def write_series_long(path, rows) -> None:
    """Tidy component series for external plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "target", "component", "value"])
        for row in rows:
            d = row.decomposition
            for component, value in (
                ("individual", d.individual), ("direct", d.direct),
                ("indirect", d.indirect), ("total", d.total),
            ):
                writer.writerow([quarter_label(row.date), row.target, component, fmt(value)])


def write_eval_reports(path, reports) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVAL_HEADER)
        for report in reports:
            for row in report.rows:
                m = row.metrics
                writer.writerow([
                    report.model, fmt(row.mu_pref), fmt(row.tau),
                    row.cm.tp, row.cm.tn, row.cm.fp, row.cm.fn,
                    fmt(row.t1), fmt(row.t2), fmt(row.loss),
                    fmt(row.u_a), fmt(row.u_r), fmt(report.auc),
                    fmt(m.precision_signal), fmt(m.recall_signal),
                    fmt(m.precision_tranquil), fmt(m.recall_tranquil),
                    fmt(m.accuracy),
                ])


DEFAULT_MU_GRID = tuple(i / 10 for i in range(11))


@dataclass(frozen=True)
class RunConfig:
    """Defaults shared by the CLI; a JSON config file overrides them and
    explicit command-line flags override the file."""

    h1: int = 5
    h2: int = 12
    mu_grid: tuple[float, ...] = DEFAULT_MU_GRID
    lag: int = 1
    central_weight_mode: str = "unit"
    clamp: bool = True
    max_path_length: int = 2
    seed: int = 0
    start: str | None = None
    nodes: str | None = None
    links: str | None = None
    indicators: str | None = None
    events: str | None = None
    probabilities: str | None = None

    def __post_init__(self):
        if not 1 <= self.h1 <= self.h2:
            raise ValueError("horizon must satisfy 1 <= h1 <= h2")
        if any(not 0.0 <= mu <= 1.0 for mu in self.mu_grid):
            raise ValueError("preference grid must lie within [0,1]")


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}")
    if "mu_grid" in doc:
        doc["mu_grid"] = tuple(float(v) for v in doc["mu_grid"])
    return RunConfig(**doc)
