"""Command-line surface.

Subcommands: validate, shapley, riskrank, backtest, evaluate, synth, report.
Every failure exits nonzero after printing a single diagnostic line of the
form ``error: <kind>: <detail>`` on stderr; outputs are deterministic given
the inputs and seed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import benchmarks
from .capacity import FuzzyMeasure, interaction_index, shapley, validate_measure
from .early_warning import label_cells, recursive_backtest
from .engine import RiskRankConfig, riskrank_series
from .errors import (
    DegenerateFitError,
    NoCapacityError,
    RiskRankError,
    SchemaError,
    StructuralDriftError,
)
from .evaluation import evaluate_series
from .io import (
    RunConfig,
    load_config,
    read_events,
    read_indicators,
    read_nodes_links,
    read_series,
    write_decompositions,
    write_eval_reports,
    write_probabilities,
    write_series_long,
)
from .network import build_capacity, validate_hierarchy
from .quarters import quarter_index, quarter_label
from .synth import SynthSpec, generate_synthetic

_ERROR_KINDS = {
    SchemaError: "schema",
    NoCapacityError: "no-capacity",
    DegenerateFitError: "degenerate-fit",
    StructuralDriftError: "structural-drift",
}


def _diagnostic(exc: Exception) -> str:
    kind = "invalid"
    for cls, name in _ERROR_KINDS.items():
        if isinstance(exc, cls):
            kind = name
            break
    else:
        if isinstance(exc, OSError):
            kind = "io"
    detail = " ".join(str(exc).split())
    return f"error: {kind}: {detail}"


def _load_run_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {}
    for key in RunConfig.__dataclass_fields__:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "no_clamp", False):
        overrides["clamp"] = False
    if "mu_grid" in overrides:
        overrides["mu_grid"] = tuple(float(v) for v in overrides["mu_grid"].split(","))
    return replace(cfg, **overrides)


def _engine_config(cfg: RunConfig) -> RiskRankConfig:
    return RiskRankConfig(
        central_weight_mode=cfg.central_weight_mode,
        clamp=cfg.clamp,
        max_path_length=cfg.max_path_length,
    )


def _snapshots_with_probabilities(snapshots, prob_path):
    """Override node risk values with a probability series; dates missing a
    probability for any valued node are dropped from the series."""
    series = read_series(prob_path)
    by_date: dict[int, dict[str, float]] = {}
    for entity, quarter, p in series.cells:
        by_date.setdefault(quarter, {})[entity] = p
    out = []
    for snap in snapshots:
        probs = by_date.get(snap.date)
        if probs is None:
            continue
        needed = [
            nid for nid, node in snap.network.nodes.items() if node.level > 0
        ]
        if any(nid not in probs for nid in needed):
            continue
        out.append(
            type(snap)(snap.date, snap.network.with_risk_values(
                {nid: probs[nid] for nid in needed}
            ))
        )
    if not out:
        raise RiskRankError("no snapshot date is fully covered by the probability series")
    return out


def _resolve_targets(selector: str, snapshots) -> list[str]:
    net = snapshots[0].network
    if selector == "root":
        return [net.root().id]
    if selector == "all":
        return sorted(nid for nid, node in net.nodes.items() if node.level > 0)
    targets = [t.strip() for t in selector.split(",") if t.strip()]
    for target in targets:
        if target not in net.nodes:
            raise RiskRankError(f"unknown target node {target!r}")
    return targets


def cmd_validate(args) -> int:
    cfg = _load_run_config(args)
    snapshots = read_nodes_links(cfg.nodes, cfg.links)
    if cfg.indicators:
        read_indicators(cfg.indicators)
    if cfg.events:
        read_events(cfg.events)
    violations = []
    for snap in snapshots:
        report = validate_hierarchy(snap.network)
        violations.extend(
            f"{quarter_label(snap.date)}: {v}" for v in report.violations
        )
    for line in violations:
        print(line)
    if violations:
        raise RiskRankError(
            f"hierarchy: {len(violations)} violations (first: {violations[0]})"
        )
    for snap in snapshots:
        build = build_capacity(snap.network, snap.network.root().id, mode="root")
        if not build.capacity.is_monotone():
            raise RiskRankError(
                f"capacity at {quarter_label(snap.date)} is not monotone"
            )
    print(f"ok: {len(snapshots)} snapshots, hierarchy and capacities valid")
    return 0


def cmd_shapley(args) -> int:
    text = Path(args.measure).read_text(encoding="utf-8")
    measure = FuzzyMeasure.from_json(text)
    report = validate_measure(measure)
    if not report.ok:
        raise RiskRankError(f"measure: {report}")
    values = shapley(measure)
    inter = interaction_index(measure)
    for i, v in enumerate(values):
        print(f"shapley {i + 1} {v:.10g}")
    for i in range(measure.n):
        for j in range(i + 1, measure.n):
            print(f"interaction {i + 1},{j + 1} {inter[i, j]:.10g}")
    return 0


def cmd_riskrank(args) -> int:
    cfg = _load_run_config(args)
    snapshots = read_nodes_links(cfg.nodes, cfg.links)
    if cfg.probabilities:
        snapshots = _snapshots_with_probabilities(snapshots, cfg.probabilities)
    targets = _resolve_targets(args.targets, snapshots)
    rows = riskrank_series(snapshots, targets, _engine_config(cfg))
    write_decompositions(args.out, rows)
    print(f"wrote {len(rows)} decompositions to {args.out}")
    return 0


def cmd_backtest(args) -> int:
    cfg = _load_run_config(args)
    panel = read_indicators(cfg.indicators)
    events = read_events(cfg.events)
    start = quarter_index(cfg.start) if cfg.start else None
    result = recursive_backtest(panel, events, cfg.h1, cfg.h2, cfg.lag, start)
    write_probabilities(args.out, result)
    emitted = int(np.sum(~np.isnan(result.probabilities)))
    print(f"wrote {emitted} probabilities to {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    if args.table2_fixture:
        lines, ok = benchmarks.fixture_report()
        for line in lines:
            print(line)
        if not ok:
            raise RiskRankError("benchmark reconstruction failed")
        return 0
    if not args.series:
        raise RiskRankError("no probability series given")
    cfg = _load_run_config(args)
    if not cfg.events:
        raise RiskRankError("evaluate needs --events")
    events = read_events(cfg.events)
    reports = []
    for series_path in args.series:
        series = read_series(series_path)
        cells = [(entity, quarter) for entity, quarter, _ in series.cells]
        probs = np.array([p for _, _, p in series.cells])
        labels, excluded = label_cells(events, cells, cfg.h1, cfg.h2)
        reports.append(
            evaluate_series(probs, labels, cfg.mu_grid, series.name, mask=excluded)
        )
    write_eval_reports(args.out, reports)
    for report in reports:
        print(f"{report.model}: AUC={report.auc:.4f}")
    print(f"wrote {args.out}")
    return 0


def cmd_synth(args) -> int:
    cfg = _load_run_config(args)
    spec = SynthSpec(
        entities=args.entities,
        start=args.start_quarter,
        end=args.end_quarter,
        indicators=args.indicators_count,
        crisis_intensity=args.crisis_intensity,
        network_density=args.density,
        seed=cfg.seed,
    )
    paths = generate_synthetic(spec, args.outdir)
    for name, path in paths.items():
        print(f"wrote {name}: {path}")
    return 0


def cmd_report(args) -> int:
    cfg = _load_run_config(args)
    snapshots = read_nodes_links(cfg.nodes, cfg.links)
    if cfg.probabilities:
        snapshots = _snapshots_with_probabilities(snapshots, cfg.probabilities)
    targets = _resolve_targets(args.targets, snapshots)
    rows = riskrank_series(snapshots, targets, _engine_config(cfg))
    write_series_long(args.out, rows)
    print(f"wrote {len(rows)} decompositions (long form) to {args.out}")
    return 0


def _add_config_flag(parser):
    parser.add_argument("--config", help="JSON config file; flags override it")


def _add_network_flags(parser):
    parser.add_argument("--nodes", help="nodes.csv path")
    parser.add_argument("--links", help="links.csv path")


def _add_engine_flags(parser):
    parser.add_argument("--probabilities", help="probability series overriding node risk values")
    parser.add_argument("--targets", default="root",
                        help="'root', 'all', or comma-separated node ids")
    parser.add_argument("--mode", dest="central_weight_mode", choices=["unit", "shapley"],
                        help="self-weight mode for non-root targets")
    parser.add_argument("--no-clamp", action="store_true", help="do not cap totals at 1")
    parser.add_argument("--k", dest="max_path_length", type=int,
                        help="maximum influence-path length (default 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskrank",
        description="Interconnected-risk aggregation, backtesting and evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check input schemas, hierarchy and capacities")
    _add_config_flag(p)
    _add_network_flags(p)
    p.add_argument("--indicators")
    p.add_argument("--events")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("shapley", help="print importance and interactions of a measure file")
    p.add_argument("--measure", required=True, help="JSON measure file")
    p.set_defaults(func=cmd_shapley)

    p = sub.add_parser("riskrank", help="compute decompositions for targets over snapshots")
    _add_config_flag(p)
    _add_network_flags(p)
    _add_engine_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_riskrank)

    p = sub.add_parser("backtest", help="recursive out-of-sample crisis probabilities")
    _add_config_flag(p)
    p.add_argument("--indicators")
    p.add_argument("--events")
    p.add_argument("--h1", type=int)
    p.add_argument("--h2", type=int)
    p.add_argument("--lag", type=int)
    p.add_argument("--start", help="first evaluation quarter, YYYY-Qn")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("evaluate", help="usefulness and metric tables for probability series")
    _add_config_flag(p)
    p.add_argument("series", nargs="*", help="probability or decomposition CSV files")
    p.add_argument("--events")
    p.add_argument("--h1", type=int)
    p.add_argument("--h2", type=int)
    p.add_argument("--mu-grid", dest="mu_grid", help="comma-separated preference grid")
    p.add_argument("--out", default="eval_report.csv")
    p.add_argument("--table2-fixture", action="store_true", dest="table2_fixture",
                   help="run the built-in benchmark reconstruction and exit")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a deterministic synthetic input set")
    _add_config_flag(p)
    p.add_argument("--outdir", required=True)
    p.add_argument("--entities", type=int, default=8)
    p.add_argument("--start-quarter", default="2000-Q1")
    p.add_argument("--end-quarter", default="2018-Q4")
    p.add_argument("--indicators-count", type=int, default=14)
    p.add_argument("--crisis-intensity", type=float, default=1.5)
    p.add_argument("--density", type=float, default=0.6)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="emit decomposition time series for plotting")
    _add_config_flag(p)
    _add_network_flags(p)
    _add_engine_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RiskRankError, ValueError, OSError) as exc:
        print(_diagnostic(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
