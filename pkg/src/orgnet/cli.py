"""``orgnet`` command line.

Every subcommand reads an optional JSON config (``--config``; ``@demo``
selects the bundled synthetic corpus), lets flags override it, writes its
artifacts into the output directory and finishes with a run manifest that
lists each artifact with its SHA-256 digest.

Exit status: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import matplotlib
import numpy as np

from . import __version__
from .community import best_partition, girvan_newman, modularity, partition_labels, write_partition_csv
from .errors import DataError, OrgnetError
from .graph import (
    DegreeDistribution,
    EmailGraph,
    TldConfig,
    betweenness_centrality,
    build_graph,
    external_domain_tally,
    out_degree_distribution,
    read_edge_csv,
    unit_graph,
    write_edge_csv,
)
from .hiermodel import (
    DEFAULT_CUTOFF,
    FIT_METHODS,
    HierarchyParams,
    Noise,
    PowerLawFit,
    fit_power_law,
    generate_broadcast_network,
    graph_to_records,
    infer_structure,
)
from .ingest import (
    CleaningPolicy,
    EmailRecord,
    clean_records,
    parse_email_log,
    restrict_to_domain,
    write_email_log,
)
from .layout import ForceParams, circular_layout, force_layout, render, style
from .orgmap import AddressDirectory, OrgChart, load_directory, load_org_chart
from .temporal import emails_per_bin, record_window, senders_per_bin, weekday_profile

log = logging.getLogger("orgnet")

SUBCOMMANDS = (
    "ingest",
    "aggregate",
    "stats",
    "communities",
    "layout",
    "tally",
    "degree-dist",
    "fit",
    "infer",
    "simulate",
    "temporal",
    "pipeline",
)
DEFAULT_OUT = "orgnet_out"
DEFAULT_SEED = 0


class UsageError(OrgnetError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# --- config and run context ------------------------------------------------

@dataclass
class Run:
    command: str
    args: argparse.Namespace
    config: dict
    config_dir: Path
    out: Path
    seed: int
    artifacts: list[str] = field(default_factory=list)
    inputs: dict[str, str] = field(default_factory=dict)
    _records: list[EmailRecord] | None = None
    _org: tuple[OrgChart, AddressDirectory] | None = None

    def opt(self, name: str, *path: str, default: Any = None) -> Any:
        """Flag value if given, else config value at ``path``, else ``default``."""
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        if not path:
            return default
        node: Any = self.config
        for key in path:
            if not isinstance(node, dict) or key not in node:
                return default
            node = node[key]
        return default if node is None else node

    def path(self, name: str, *cfg_path: str) -> Path | None:
        flag = getattr(self.args, name, None)
        if flag is not None:
            return Path(flag)
        value = self.opt(name, *cfg_path) if cfg_path else None
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else self.config_dir / p

    def require(self, name: str, *cfg_path: str) -> Path:
        p = self.path(name, *cfg_path)
        if p is None:
            raise UsageError(f"--{name.replace('_', '-')} is required (flag or config)")
        if not p.exists():
            raise DataError(f"input not found: {p}")
        self.inputs[name] = str(p)
        return p

    def artifact(self, name: str) -> Path:
        if name not in self.artifacts:
            self.artifacts.append(name)
        return self.out / name

    def write_text(self, name: str, text: str) -> None:
        with open(self.artifact(name), "w", newline="") as fh:
            fh.write(text)

    def write_json(self, name: str, obj: Any) -> None:
        self.write_text(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def write_with(self, name: str, writer: Callable) -> None:
        with open(self.artifact(name), "w", newline="") as fh:
            writer(fh)

    # shared inputs

    def records(self) -> list[EmailRecord]:
        if self._records is None:
            log_path = self.path("log", "log")
            if log_path is None and (self.out / "records.csv").exists():
                log_path = self.out / "records.csv"
            if log_path is None:
                raise UsageError("--log is required (flag or config)")
            if not log_path.exists():
                raise DataError(f"input not found: {log_path}")
            self.inputs["log"] = str(log_path)
            fmt = self.opt("format", "log_format", default="csv")
            parsed = parse_email_log(log_path, fmt)
            self._records = clean_records(parsed.records, self.cleaning_policy())
        return self._records

    def cleaning_policy(self) -> CleaningPolicy:
        bounce = self.opt("bounce", "cleaning", "bounce_local_parts")
        return CleaningPolicy(frozenset(bounce)) if bounce is not None else CleaningPolicy()

    def internal_suffix(self) -> str:
        return self.opt("internal_suffix", "internal_suffix", default="lab.gov")

    def org(self) -> tuple[OrgChart, AddressDirectory]:
        if self._org is None:
            chart = load_org_chart(
                self.require("chart", "chart"), self.config.get("extra_categories", ())
            )
            directory = load_directory(self.require("directory", "directory"), chart, self.internal_suffix())
            self._org = (chart, directory)
        return self._org


def _load_config(spec: str | None) -> tuple[dict, Path]:
    if spec is None:
        return {}, Path.cwd()
    if spec == "@demo":
        from .synthetic import DEMO_CONFIG

        path = DEMO_CONFIG
    else:
        path = Path(spec)
    if not path.exists():
        raise DataError(f"config not found: {path}")
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise DataError(f"config {path} must hold a JSON object")
    return cfg, path.resolve().parent


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest_path(run: Run, path: str) -> str:
    # artifacts fed back in as inputs are recorded relative to the output dir
    try:
        return str(Path(path).resolve().relative_to(run.out.resolve()))
    except ValueError:
        return str(path)


def _write_manifest(run: Run) -> None:
    cfg_hash = hashlib.sha256(json.dumps(run.config, sort_keys=True).encode()).hexdigest()
    manifest = {
        "command": run.command,
        "seed": run.seed,
        "config_hash": cfg_hash,
        "inputs": {k: {"path": _manifest_path(run, v), "sha256": _sha256(Path(v))} for k, v in sorted(run.inputs.items())},
        "artifacts": {name: _sha256(run.out / name) for name in run.artifacts},
        "versions": {
            "orgnet": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "matplotlib": matplotlib.__version__,
        },
        # the only field allowed to differ between identical runs
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(run.out / f"manifest_{run.command}.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- subcommands -----------------------------------------------------------

def cmd_ingest(run: Run) -> None:
    log_path = run.require("log", "log")
    fmt = run.opt("format", "log_format", default="csv")
    parsed = parse_email_log(log_path, fmt)
    cleaned = clean_records(parsed.records, run.cleaning_policy())
    suffix = run.opt("restrict_domain")
    kept = restrict_to_domain(cleaned, suffix) if suffix else cleaned
    run._records = kept
    run.write_with("records.csv", lambda fh: write_email_log(kept, fh))
    run.write_json(
        "ingest_report.json",
        {
            "data_lines": parsed.data_lines,
            "records": len(parsed.records),
            "malformed": parsed.malformed,
            "after_cleaning": len(cleaned),
            "after_restriction": len(kept),
            "restricted_to": suffix,
        },
    )


def _aggregated(run: Run) -> EmailGraph:
    chart, directory = run.org()
    by = run.opt("by", "aggregation", "by", default="unit")
    level = run.opt("level", "aggregation", "level")
    return unit_graph(build_graph(run.records()), directory, chart, level=level, by=by)


def _prefix(run: Run) -> str:
    return "category" if run.opt("by", "aggregation", "by", default="unit") == "category" else "unit"


def _betweenness(run: Run, graph: EmailGraph) -> dict[str, float]:
    return betweenness_centrality(
        graph,
        direction=run.opt("direction", "betweenness", "direction", default="undirected"),
        weighting=run.opt("weighting", "betweenness", "weighting", default="unweighted"),
    )


def _export_graph(run: Run, graph: EmailGraph, prefix: str, bc: dict[str, float] | None = None) -> None:
    from .export import to_dot, to_graphml

    total = graph.total_degree()
    attrs = {
        v: {"category": graph.categories[i] or "", "degree": int(total[i]),
            **({"betweenness": bc[v]} if bc else {})}
        for i, v in enumerate(graph.nodes)
    }
    run.write_with(f"{prefix}_edges.csv", lambda fh: write_edge_csv(graph, fh))
    run.write_text(f"{prefix}_graph.graphml", to_graphml(graph, attrs))
    run.write_text(f"{prefix}_graph.dot", to_dot(graph, attrs))


def cmd_aggregate(run: Run) -> None:
    graph = _aggregated(run)
    prefix = _prefix(run)
    _export_graph(run, graph, prefix)
    run.write_json(
        f"{prefix}_intra_group_weight.json",
        {"intra_group_weight": dict(graph.intra_group_weight), "inter_group_weight": graph.total_weight},
    )


def cmd_stats(run: Run) -> None:
    graph = _aggregated(run)
    prefix = _prefix(run)
    bc = _betweenness(run, graph)
    total = graph.total_degree()
    rows = sorted(
        ((v, graph.categories[i] or "", bc[v], int(total[i])) for i, v in enumerate(graph.nodes)),
        key=lambda r: (-r[2], r[0]),
    )

    def write(fh):
        fh.write("node,category,betweenness,total_degree\n")
        for v, c, b, d in rows:
            fh.write(f"{v},{c},{b!r},{d}\n")

    run.write_with(f"{prefix}_betweenness.csv", write)
    top = rows[:20]
    by_cat: dict[str, int] = {}
    for _, c, _, _ in top:
        by_cat[c] = by_cat.get(c, 0) + 1
    run.write_json(
        f"{prefix}_stats.json",
        {
            "nodes": graph.n_nodes,
            "edges": graph.n_edges,
            "total_weight": graph.total_weight,
            "top20": [{"node": v, "category": c, "betweenness": b} for v, c, b, _ in top],
            "top20_categories": by_cat,
        },
    )
    _export_graph(run, graph, prefix, bc)


def _force_params(run: Run) -> ForceParams:
    cfg = run.config.get("layout", {}) or {}
    keys = ("k_r", "k_s", "rest_length", "step", "tol", "max_iter")
    kw = {k: cfg[k] for k in keys if cfg.get(k) is not None}
    if run.opt("max_iter") is not None:
        kw["max_iter"] = run.opt("max_iter")
    return ForceParams(**kw)


def _draw(run: Run, graph: EmailGraph, name: str, kind: str, scheme: str, values, palette=None) -> None:
    if kind == "circular":
        result = circular_layout(graph)
    else:
        result = force_layout(graph, _force_params(run), seed=run.seed)
    attrs = style(graph, scheme, values, palette)
    for fmt in ("svg", "dot", "graphml"):
        with open(run.artifact(f"{name}.{fmt}"), "wb") as fh:
            fh.write(render(graph, result, attrs, fmt))
    run.write_json(
        f"{name}_report.json",
        {
            "layout": kind,
            "scheme": scheme,
            "iterations": result.iterations,
            "converged": result.converged,
            "max_displacement": result.max_displacement,
            "max_residual_force": result.max_residual_force,
        },
    )


def cmd_layout(run: Run) -> None:
    graph = _aggregated(run)
    prefix = _prefix(run)
    default_kind = "circular" if prefix == "category" else "force"
    kind = run.opt("layout", "layout", "kind", default=default_kind)
    if prefix == "category":
        total = graph.total_degree()
        values = {v: float(total[i]) for i, v in enumerate(graph.nodes)}
        _draw(run, graph, f"{prefix}_layout", kind, "total-degree", values)
    else:
        _draw(run, graph, f"{prefix}_layout", kind, "betweenness-log", _betweenness(run, graph))


def cmd_communities(run: Run) -> None:
    chart, directory = run.org()
    unit = run.opt("unit")
    members_by_unit: dict[str, set[str]] = {}
    for addr, uid in directory.mapping.items():
        members_by_unit.setdefault(uid, set()).add(str(addr))
    if unit is None:
        unit = max(sorted(members_by_unit), key=lambda u: len(members_by_unit[u]))
    if unit not in members_by_unit:
        raise DataError(f"unit {unit!r} has no directory members")
    graph = build_graph(run.records())
    graph = graph.subgraph(v for v in graph.nodes if v in members_by_unit[unit])
    if graph.n_edges == 0:
        raise DataError(f"no internal email among members of {unit!r}")
    dendro = girvan_newman(graph)
    best = best_partition(dendro)
    run.write_with("partition.csv", lambda fh: write_partition_csv(best, fh))
    run.write_text("dendrogram.json", dendro.to_json() + "\n")
    labels = partition_labels(best)
    tagged = EmailGraph(
        graph.nodes, graph.src, graph.dst, graph.weight,
        categories=[f"c{labels[v]}" for v in graph.nodes],
    )
    palette = {f"c{i}": rgb for i, rgb in enumerate(_community_colors(len(best)))}
    _draw(run, tagged, "communities", "force", "betweenness-log", _betweenness(run, graph), palette)
    run.write_json(
        "communities.json",
        {"unit": unit, "nodes": graph.n_nodes, "communities": len(best), "modularity": modularity(graph, best)},
    )


def _community_colors(n: int) -> list[tuple[int, int, int]]:
    cmap = matplotlib.colormaps["tab10" if n <= 10 else "tab20"]
    return [tuple(int(255 * c) for c in cmap(i % cmap.N)[:3]) for i in range(n)]


def cmd_tally(run: Run) -> None:
    from .plotting import plot_tally

    chart, directory = run.org()
    tld = run.config.get("tld", {}) or {}
    cfg = TldConfig(**{k: frozenset(v) for k, v in tld.items() if k in ("commercial", "noncommercial")})
    tally = external_domain_tally(run.records(), directory, chart, cfg)
    run.write_with("tally.csv", tally.to_csv)
    plot_tally(tally, run.artifact("tally.png"))


def _degree_graph(run: Run) -> tuple[EmailGraph, str]:
    edges = run.path("edges")
    if edges is None and run.path("log", "log") is None and (run.out / "edges.csv").exists():
        edges = run.out / "edges.csv"
    if edges is not None:
        if not edges.exists():
            raise DataError(f"input not found: {edges}")
        run.inputs["edges"] = str(edges)
        return read_edge_csv(edges), str(edges)
    records = restrict_to_domain(run.records(), run.internal_suffix())
    return build_graph(records), run.inputs["log"]


def cmd_degree_dist(run: Run) -> None:
    from .plotting import plot_degree_distribution

    graph, source = _degree_graph(run)
    mode = run.opt("mode", "model", "mode", default="distinct-recipients")
    dist = out_degree_distribution(graph, mode)
    run.write_with("degree_distribution.csv", dist.to_csv)
    run.write_json(
        "degree_summary.json",
        {"total_nodes": dist.total_nodes, "nodes_with_out_degree": sum(dist.counts.values()),
         "max_w": max(dist.counts, default=0), "mode": mode},
    )
    plot_degree_distribution(dist, run.artifact("degree_distribution.png"))


def _read_dist(run: Run) -> DegreeDistribution:
    path = run.path("dist") or run.out / "degree_distribution.csv"
    if not path.exists():
        raise DataError(f"degree distribution not found: {path} (run degree-dist first)")
    run.inputs["dist"] = str(path)
    summary = path.with_name("degree_summary.json")
    total = json.loads(summary.read_text())["total_nodes"] if summary.exists() else None
    return DegreeDistribution.from_csv(path, total)


def cmd_fit(run: Run) -> None:
    from .plotting import plot_degree_distribution

    dist = _read_dist(run)
    cutoff = run.opt("cutoff", "model", "cutoff", default=DEFAULT_CUTOFF)
    method = run.opt("method", "model", "method", default="points")
    fit = fit_power_law(dist, cutoff, method=method)
    run.write_text("fit.json", fit.to_json() + "\n")
    plot_degree_distribution(dist, run.artifact("fit.png"), fit)


def cmd_infer(run: Run) -> None:
    path = run.path("fit") or run.out / "fit.json"
    if not path.exists():
        raise DataError(f"fit report not found: {path} (run fit first)")
    run.inputs["fit"] = str(path)
    fit = PowerLawFit.from_dict(json.loads(path.read_text()))
    N = run.opt("N", "model", "N")
    if N is None:
        summary = path.with_name("degree_summary.json")
        if not summary.exists():
            raise UsageError("--N is required when no degree_summary.json sits next to the fit")
        N = json.loads(summary.read_text())["total_nodes"]
    report = infer_structure(fit, run.opt("l", "model", "l", default=4), N)
    run.write_text("inference.json", report.to_json() + "\n")


def cmd_simulate(run: Run) -> None:
    sim = run.config.get("simulate", {}) or {}

    def pick(flag, key, default=None):
        v = getattr(run.args, flag, None)
        return v if v is not None else sim.get(key, default)

    missing = [k for k in ("N", "l", "a", "x") if pick(k, k) is None]
    if missing:
        raise UsageError("simulate needs " + ", ".join(f"--{k}" for k in missing))
    params = HierarchyParams(int(pick("N", "N")), int(pick("l", "l")), pick("a", "a"), int(pick("x", "x")))
    noise = Noise(float(pick("coverage_p", "coverage_p", 1.0)), float(pick("lam", "lambda", 0.0)))
    graph = generate_broadcast_network(params, noise, seed=run.seed)
    run.write_with("edges.csv", lambda fh: write_edge_csv(graph, fh))
    run.write_with("simulated_log.csv", lambda fh: write_email_log(graph_to_records(graph), fh))
    run.write_json(
        "simulate_params.json",
        {"N": params.N, "l": params.l, "a": params.a, "x": params.x, "coverage_p": noise.coverage_p,
         "lambda": noise.background_mean_degree, "seed": run.seed, "nodes": graph.n_nodes, "edges": graph.n_edges},
    )


def cmd_temporal(run: Run) -> None:
    from .plotting import plot_time_series

    records = run.records()
    width = int(run.opt("bin_width", "temporal", "bin_width", default=60))
    offset = float(run.opt("utc_offset", "temporal", "utc_offset_hours", default=0.0))
    window = record_window(records, width)
    emails = emails_per_bin(records, window, width)
    senders = senders_per_bin(records, window, width)
    run.write_with("emails_per_bin.csv", emails.to_csv)
    run.write_with("senders_per_bin.csv", senders.to_csv)
    run.write_text("weekday_profile.json", weekday_profile(records, offset).to_json() + "\n")
    plot_time_series(emails, senders, run.artifact("temporal.png"))


def cmd_pipeline(run: Run) -> None:
    for step in (cmd_ingest, cmd_aggregate, cmd_stats, cmd_layout, cmd_tally,
                 cmd_degree_dist, cmd_fit, cmd_infer, cmd_temporal):
        log.info("pipeline: %s", step.__name__[4:])
        step(run)


COMMANDS: dict[str, Callable[[Run], None]] = {
    "ingest": cmd_ingest,
    "aggregate": cmd_aggregate,
    "stats": cmd_stats,
    "communities": cmd_communities,
    "layout": cmd_layout,
    "tally": cmd_tally,
    "degree-dist": cmd_degree_dist,
    "fit": cmd_fit,
    "infer": cmd_infer,
    "simulate": cmd_simulate,
    "temporal": cmd_temporal,
    "pipeline": cmd_pipeline,
}


# --- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file, or @demo for the bundled corpus")
    common.add_argument("--out", help="output directory (default $ORGNET_OUT or ./orgnet_out)")
    common.add_argument("--seed", type=int, help="random seed (default from config, else 0)")
    common.add_argument("-v", "--verbose", action="store_true")

    inputs = _Parser(add_help=False)
    inputs.add_argument("--log", help="email log (CSV or JSON lines; .gz accepted)")
    inputs.add_argument("--format", choices=("csv", "jsonl"))
    inputs.add_argument("--chart", help="org chart CSV")
    inputs.add_argument("--directory", help="address directory CSV")
    inputs.add_argument("--internal-suffix", dest="internal_suffix")

    agg = _Parser(add_help=False)
    agg.add_argument("--level", type=int, help="lift units to this org-chart level")
    agg.add_argument("--by", choices=("unit", "category"))
    agg.add_argument("--direction", choices=("undirected", "directed"))
    agg.add_argument("--weighting", choices=("unweighted", "inverse-weight"))

    parser = _Parser(prog="orgnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"orgnet {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, *parents, help=None):
        return sub.add_parser(name, parents=[common, *parents], help=help)

    p = add("ingest", inputs, help="parse, clean and normalize an email log")
    p.add_argument("--restrict-domain", dest="restrict_domain")
    add("aggregate", inputs, agg, help="unit/category-level email graph")
    add("stats", inputs, agg, help="betweenness ranking of the aggregated graph")
    p = add("communities", inputs, agg, help="Girvan-Newman communities inside one unit")
    p.add_argument("--unit", help="unit id (default: unit with most directory members)")
    p = add("layout", inputs, agg, help="render the aggregated graph")
    p.add_argument("--layout", choices=("force", "circular"))
    p.add_argument("--max-iter", dest="max_iter", type=int)
    add("tally", inputs, help="external commercial/non-commercial traffic by category")
    p = add("degree-dist", inputs, help="out-degree histogram")
    p.add_argument("--edges", help="edge list CSV (src,dst,weight) instead of a log")
    p.add_argument("--mode", choices=("distinct-recipients", "total-messages"))
    p = add("fit", help="power-law fit of the degree tail")
    p.add_argument("--dist", help="degree distribution CSV (default OUT/degree_distribution.csv)")
    p.add_argument("--cutoff", type=float)
    p.add_argument("--method", choices=FIT_METHODS)
    p = add("infer", help="organizational parameters from a fit")
    p.add_argument("--fit", help="fit JSON (default OUT/fit.json)")
    p.add_argument("--l", type=float, help="assumed span of control")
    p.add_argument("--N", type=float, help="node count (default: total nodes of the distribution)")
    p = add("simulate", help="synthetic hierarchical broadcast network")
    p.add_argument("--N", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--x", type=int)
    p.add_argument("--coverage-p", dest="coverage_p", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p = add("temporal", inputs, help="per-minute emails/senders and weekday profile")
    p.add_argument("--bin-width", dest="bin_width", type=int)
    p.add_argument("--utc-offset", dest="utc_offset", type=float)
    p = add("pipeline", inputs, agg, help="ingest through temporal in one run")
    p.add_argument("--restrict-domain", dest="restrict_domain")
    p.add_argument("--layout", choices=("force", "circular"))
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--cutoff", type=float)
    p.add_argument("--method", choices=FIT_METHODS)
    p.add_argument("--l", type=float)
    p.add_argument("--N", type=float)
    p.add_argument("--mode", choices=("distinct-recipients", "total-messages"))
    p.add_argument("--bin-width", dest="bin_width", type=int)
    p.add_argument("--utc-offset", dest="utc_offset", type=float)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help/--version exit 0, parse errors exit 1 (see _Parser.error)
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config, config_dir = _load_config(args.config)
        out = Path(args.out or config.get("out") or os.environ.get("ORGNET_OUT") or DEFAULT_OUT)
        seed = args.seed if args.seed is not None else int(config.get("seed", DEFAULT_SEED))
        out.mkdir(parents=True, exist_ok=True)
        run = Run(args.command, args, config, config_dir, out, seed)
        COMMANDS[args.command](run)
        _write_manifest(run)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"orgnet: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"orgnet: data error: {exc}", file=sys.stderr)
        return 2
    except (OrgnetError, ValueError) as exc:
        print(f"orgnet: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
