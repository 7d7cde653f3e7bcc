"""Command-line front end producing machine-readable analysis files.

Subcommands:
    ingest     parse a DBLP XML dump, attach citation counts, write a corpus
    rank       score and rank all authors under one metric
    overlap    pairwise top-fraction ranking overlap across seven metrics
    stability  theta sweep trajectories plus a rank-stability report
    trends     per-year coauthor-count fractions
    table1     per-year median cites-per-year grouped by coauthor count

Every output file F is accompanied by F.manifest.json recording the
command, the resolved configuration, input digests, tool version, and a
timestamp. Given identical inputs and flags, the data outputs are
byte-identical across runs (manifests differ only in the timestamp).

Defaults for any flag can also come from a JSON config file named by the
SCHOLARANK_CONFIG environment variable; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import scholarank
from scholarank.corpus import (
    COAUTHOR_BUCKETS,
    CorpusError,
    coauthor_distribution,
    load_corpus,
    save_corpus,
)
from scholarank.graph import build_coauthor_graph
from scholarank.ingest import (
    CitationClient,
    DblpParseError,
    fetch_citations,
    load_citation_cache,
    merge_citations,
    parse_dblp,
)
from scholarank.metrics import (
    ALL_METRICS,
    OVERLAP_METRICS,
    PAGERANK_METRICS,
    ConvergenceError,
    MetricConfig,
    author_weights,
    compute_metric,
    rank_authors,
    write_ranking_csv,
)
from scholarank.stats import (
    StatsConfig,
    median_cites_by_coauthors,
    overlap_matrix,
    rank_stability,
    theta_sweep,
    write_overlap_csv,
    write_stability_csv,
    write_sweep_csv,
)

CONFIG_ENV_VAR = "SCHOLARANK_CONFIG"

_DEFAULTS = {
    "theta": 0.5,
    "tolerance": 1e-10,
    "max_iterations": 200,
    "fraction": 0.01,
    "grid": "0:1:0.05",
    "top": 20,
    "a12_threshold": 0.56,
    "api_base": "https://api.crossref.org",
    "rate": 2.0,
    "retries": 3,
    "workers": 1,
    "metric": "pr",
}


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict[str, str]  # path -> sha256
    tool_version: str
    timestamp: str


def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifests(command, config, input_paths, outputs) -> None:
    manifest = RunManifest(
        command=command,
        config=config,
        inputs={str(p): _sha256(p) for p in input_paths},
        tool_version=scholarank.__version__,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    payload = json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n"
    for output in outputs:
        Path(str(output) + ".manifest.json").write_text(payload, encoding="utf-8")


def _env_config() -> dict:
    path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError(f"{path}: config file must hold a JSON object")
    return config


class _Options:
    """Flag values resolved against the env config file and built-in defaults."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._file = _env_config()

    def get(self, key: str):
        value = self._args.get(key)
        if value is not None:
            return value
        if key in self._file:
            return self._file[key]
        return _DEFAULTS.get(key)

    def get_or(self, key: str, fallback):
        """Like get(), but with a caller-supplied last-resort default."""
        value = self._args.get(key)
        if value is not None:
            return value
        return self._file.get(key, fallback)


def _parse_grid(spec: str) -> tuple[float, ...]:
    try:
        start_text, stop_text, step_text = spec.split(":")
        start, stop, step = float(start_text), float(stop_text), float(step_text)
    except ValueError:
        raise ValueError(f"grid must look like start:stop:step, got {spec!r}") from None
    if step <= 0 or stop < start:
        raise ValueError(f"grid must ascend with a positive step, got {spec!r}")
    count = int(round((stop - start) / step))
    grid = [round(start + i * step, 12) for i in range(count + 1)]
    return tuple(v for v in grid if v <= stop + 1e-12)


def _metric_config(options: _Options) -> MetricConfig:
    return MetricConfig(
        theta=options.get("theta"),
        tolerance=options.get("tolerance"),
        max_iterations=int(options.get("max_iterations")),
    )


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# ----------------------------------------------------------------------
# subcommand handlers
# ----------------------------------------------------------------------


def _cmd_ingest(args: argparse.Namespace) -> int:
    options = _Options(args)
    records, diagnostics = parse_dblp(args.dblp)
    for diagnostic in diagnostics:
        print(f"skipped {diagnostic.element_key}: {diagnostic.reason}", file=sys.stderr)

    inputs = [args.dblp]
    if args.citations == "api":
        client = CitationClient(
            api_base=options.get("api_base"),
            rate_limit=float(options.get("rate")),
            retries=int(options.get("retries")),
        )
        dois = [r.doi for r in records if r.doi]
        fetch_report = fetch_citations(dois, client, workers=int(options.get("workers")))
        for doi, message in sorted(fetch_report.failed.items()):
            print(f"fetch failed for {doi}: {message}", file=sys.stderr)
        citations = fetch_report.entries
    else:
        citations = load_citation_cache(args.citations)
        inputs.append(args.citations)

    corpus, report = merge_citations(records, citations)
    save_corpus(corpus, args.out)
    report_path = Path(str(args.out) + ".merge.json")
    report_path.write_text(
        json.dumps(asdict(report), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(
        f"parsed {len(records)} records ({len(diagnostics)} skipped), "
        f"matched {report.matched}, unmatched {report.unmatched}"
    )

    config = {
        "citations": str(args.citations),
        "api_base": options.get("api_base"),
        "rate": float(options.get("rate")),
        "retries": int(options.get("retries")),
        "workers": int(options.get("workers")),
    }
    _write_manifests("ingest", config, inputs, [args.out, report_path])
    return 0


def _cmd_rank(args: argparse.Namespace) -> int:
    options = _Options(args)
    metric = options.get("metric")
    if metric not in ALL_METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {ALL_METRICS}")
    corpus = load_corpus(args.corpus)
    graph = build_coauthor_graph(corpus)
    config = _metric_config(options)
    ranking = rank_authors(compute_metric(corpus, graph, metric, config))
    write_ranking_csv(ranking, args.out)
    _write_manifests("rank", {"metric": metric, **asdict(config)}, [args.corpus], [args.out])
    return 0


def _cmd_overlap(args: argparse.Namespace) -> int:
    options = _Options(args)
    fraction = float(options.get("fraction"))
    corpus = load_corpus(args.corpus)
    graph = build_coauthor_graph(corpus)
    config = _metric_config(options)
    rankings = [
        (metric, rank_authors(compute_metric(corpus, graph, metric, config)))
        for metric in OVERLAP_METRICS
    ]
    write_overlap_csv(overlap_matrix(rankings, fraction), args.out)
    _write_manifests(
        "overlap", {"fraction": fraction, **asdict(config)}, [args.corpus], [args.out]
    )
    return 0


def _cmd_stability(args: argparse.Namespace) -> int:
    options = _Options(args)
    metric = options.get("metric")
    if metric not in PAGERANK_METRICS:
        raise ValueError(f"stability metric must be one of {PAGERANK_METRICS}, got {metric!r}")
    grid = _parse_grid(options.get("grid"))
    top_k = int(options.get("top"))

    corpus = load_corpus(args.corpus)
    graph = build_coauthor_graph(corpus)
    # per-point theta comes from the grid; sweeps reach theta=1 where
    # convergence is slowest, so the iteration cap defaults higher here
    metric_config = MetricConfig(
        theta=0.0,
        tolerance=options.get("tolerance"),
        max_iterations=int(options.get_or("max_iterations", 5000)),
    )
    stats_config = StatsConfig(theta_grid=grid)
    if metric == "pr":
        weights = None
    else:
        scheme = "publications" if metric == "pr-publ" else "citations"
        weights = author_weights(corpus, scheme)

    sweep = theta_sweep(graph, weights, stats_config, metric_config)
    report = rank_stability(sweep, top_k=top_k)

    trajectories_path = Path(str(args.out) + "_trajectories.csv")
    stability_path = Path(str(args.out) + "_stability.csv")
    write_sweep_csv(sweep, trajectories_path)
    write_stability_csv(report, stability_path)
    config = {
        "metric": metric,
        "grid": list(grid),
        "top": top_k,
        "tolerance": metric_config.tolerance,
        "max_iterations": metric_config.max_iterations,
    }
    _write_manifests("stability", config, [args.corpus], [trajectories_path, stability_path])
    return 0


def _cmd_trends(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    distribution = coauthor_distribution(corpus)
    rows = [
        [year, *(format(fractions[bucket], ".10g") for bucket in COAUTHOR_BUCKETS)]
        for year, fractions in sorted(distribution.items())
    ]
    _write_csv(args.out, ["year", *COAUTHOR_BUCKETS], rows)
    _write_manifests("trends", {}, [args.corpus], [args.out])
    return 0


def _cmd_table1(args: argparse.Namespace) -> int:
    options = _Options(args)
    threshold = float(options.get("a12_threshold"))
    corpus = load_corpus(args.corpus)
    groups = median_cites_by_coauthors(corpus, StatsConfig(a12_threshold=threshold))
    rows = []
    for year, group in sorted(groups.items()):
        for cell in sorted(group.cells, key=lambda c: COAUTHOR_BUCKETS.index(c.label)):
            rows.append(
                [year, cell.label, len(cell.samples), format(cell.median, ".10g"), cell.group]
            )
    _write_csv(args.out, ["year", "coauthors", "n", "median", "group"], rows)
    _write_manifests("table1", {"a12_threshold": threshold}, [args.corpus], [args.out])
    return 0


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scholarank",
        description="Rank authors of a publication corpus and compare ranking metrics.",
    )
    parser.add_argument("--version", action="version", version=scholarank.__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    ingest = subparsers.add_parser("ingest", help="build a corpus from a DBLP dump")
    ingest.add_argument("--dblp", required=True, help="DBLP-style XML dump")
    ingest.add_argument(
        "--citations",
        required=True,
        help="citation cache file (JSON lines), or 'api' to fetch counts",
    )
    ingest.add_argument("--out", required=True, help="corpus file to write")
    ingest.add_argument("--api-base", dest="api_base", help="citation API base URL")
    ingest.add_argument("--rate", type=float, help="API requests per second")
    ingest.add_argument("--retries", type=int, help="retry budget for transient failures")
    ingest.add_argument("--workers", type=int, help="parallel fetch workers")
    ingest.set_defaults(func=_cmd_ingest)

    rank = subparsers.add_parser("rank", help="rank all authors under one metric")
    rank.add_argument("--corpus", required=True)
    rank.add_argument("--metric", choices=ALL_METRICS)
    rank.add_argument("--theta", type=float)
    rank.add_argument("--tolerance", type=float)
    rank.add_argument("--max-iterations", dest="max_iterations", type=int)
    rank.add_argument("--out", required=True)
    rank.set_defaults(func=_cmd_rank)

    overlap = subparsers.add_parser("overlap", help="top-fraction overlap matrix")
    overlap.add_argument("--corpus", required=True)
    overlap.add_argument("--fraction", type=float)
    overlap.add_argument("--theta", type=float)
    overlap.add_argument("--tolerance", type=float)
    overlap.add_argument("--max-iterations", dest="max_iterations", type=int)
    overlap.add_argument("--out", required=True)
    overlap.set_defaults(func=_cmd_overlap)

    stability = subparsers.add_parser("stability", help="theta sweep and stability report")
    stability.add_argument("--corpus", required=True)
    stability.add_argument("--grid", help="theta grid as start:stop:step")
    stability.add_argument("--top", type=int, help="authors tracked for displacement")
    stability.add_argument("--metric", choices=PAGERANK_METRICS)
    stability.add_argument("--tolerance", type=float)
    stability.add_argument("--max-iterations", dest="max_iterations", type=int)
    stability.add_argument("--out", required=True, help="output prefix")
    stability.set_defaults(func=_cmd_stability)

    trends = subparsers.add_parser("trends", help="per-year coauthor-count fractions")
    trends.add_argument("--corpus", required=True)
    trends.add_argument("--out", required=True)
    trends.set_defaults(func=_cmd_trends)

    table1 = subparsers.add_parser(
        "table1", help="per-year median cites-per-year grouped by coauthor count"
    )
    table1.add_argument("--corpus", required=True)
    table1.add_argument("--a12-threshold", dest="a12_threshold", type=float)
    table1.add_argument("--out", required=True)
    table1.set_defaults(func=_cmd_table1)

    return parser


def run_cli(argv=None) -> int:
    """Run one subcommand; returns the process exit status.

    Exit 2 for usage errors (argparse), 1 for module failures, 0 on success.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (
        CorpusError,
        DblpParseError,
        ConvergenceError,
        ValueError,
        KeyError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
