"""Command-line entry point: delineate | evaluate | synth | sweep | bench."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import evaluation as ev
from .delineate import Region, delineate, export_region, region_geojson, trace_jsonl
from .ingest import ParseError, QuerySpec, filter_records, parse_records, write_records
from .model import DegenerateDataset, RegionError
from .spatial import Metric

log = logging.getLogger("vagueregion")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEGENERATE = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which here means degenerate data
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    command: str
    args: argparse.Namespace

    @property
    def threads(self) -> int:
        return max(1, self.args.threads)


def _csv_list(value: str, cast=str) -> list:
    items = [v.strip() for v in value.split(",")]
    return [cast(v) for v in items if v]


def _query(args) -> QuerySpec:
    try:
        return QuerySpec(tuple(_csv_list(args.keywords)), args.case_sensitive,
                         args.day_start, args.day_end, args.utc_offset_min)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _load(args):
    if not os.path.isfile(args.input):
        raise UsageError(f"input file not found: {args.input}")
    records = parse_records(args.input, args.format)
    data = filter_records(records, _query(args))
    log.info("%d of %d records kept by the query", data.n, len(records))
    return data


def _check_distinct(*paths):
    real = [os.path.abspath(p) for p in paths if p]
    if len(set(real)) != len(real):
        raise UsageError("input and output paths must all be distinct")


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _spec_from(args) -> ev.SyntheticSpec:
    try:
        planted = ev.disk_polygon(args.center_lat, args.center_lon, args.radius, label=args.keyword)
        return ev.SyntheticSpec(planted, in_region_count=args.in_region, decoy_cluster_count=args.decoys,
                                decoy_points_per_cluster=args.decoy_points, scatter_noise_count=args.scatter,
                                period=args.period, jitter=args.jitter, decoy_sigma=args.decoy_sigma,
                                keyword=args.keyword, rng_seed=args.seed)
    except (ValueError, RegionError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_delineate(cfg: RunConfig) -> int:
    a = cfg.args
    _check_distinct(a.input, a.region_out, a.trace_out)
    data = _load(a)
    metric = Metric(a.metric)
    result = delineate(data, metric, bin_width=a.bin_width, fixed_delta=a.fixed_delta,
                       max_iterations=a.max_iterations)
    region = Region.from_result(data, result, metric)
    polygon = export_region(region, a.grid_resolution, label=a.keywords)
    _write(a.region_out, _dump_json(region_geojson(polygon, result)))
    _write(a.trace_out, trace_jsonl(result))
    print(f"epsilon* = {result.epsilon_star:.6g}  members = {len(result.member_indices)}  "
          f"iterations = {result.iterations}  stop = {result.stop_reason}")
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    a = cfg.args
    _check_distinct(a.region, a.truth, a.report_out)
    for p in (a.region, a.truth):
        if not os.path.isfile(p):
            raise UsageError(f"file not found: {p}")
    estimate = ev.read_polygon_geojson(a.region)
    truth = ev.read_polygon_geojson(a.truth)
    report = ev.monte_carlo_eval(truth, estimate, ev.MonteCarloConfig(a.samples, a.seed, threads=cfg.threads))
    _write(a.report_out, _dump_json(report.to_dict()))
    print(f"Prec {report.precision:.2f}  Rec {report.recall:.2f}  F1 {report.f1:.2f}")
    return EXIT_OK


def cmd_synth(cfg: RunConfig) -> int:
    a = cfg.args
    _check_distinct(a.out, a.truth_out)
    data, truth = ev.generate_synthetic(_spec_from(a))
    try:
        write_records(data.records, a.out, a.format)
    except OSError as exc:
        raise OutputError(f"cannot write {a.out}: {exc}") from exc
    _write(a.truth_out, _dump_json(ev.polygon_geojson(truth)))
    print(f"wrote {data.n} records to {a.out} and the planted region to {a.truth_out}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    a = cfg.args
    try:
        candidates = _csv_list(a.candidates, float)
    except ValueError as exc:
        raise UsageError(f"bad candidate list: {exc}") from exc
    if not candidates:
        raise UsageError("candidate list is empty")
    _check_distinct(a.input, a.truth, a.out)
    if not os.path.isfile(a.truth):
        raise UsageError(f"file not found: {a.truth}")
    data = _load(a)
    truth = ev.read_polygon_geojson(a.truth)
    result = ev.minpts_sweep(data, truth, Metric(a.metric), candidates,
                             ev.MonteCarloConfig(a.samples, a.seed, threads=cfg.threads), a.bin_width)
    _write(a.out, result.to_csv())
    print(f"adaptive F1 {result.adaptive_f1:.3f}  best fixed F1 {result.best_f1:.3f}")
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    a = cfg.args
    try:
        sizes = _csv_list(a.sizes, int)
    except ValueError as exc:
        raise UsageError(f"bad size list: {exc}") from exc
    try:
        rows = ev.scaling_benchmark(_spec_from(a), sizes, a.repeats, Metric(a.metric))
    except ev.InvalidSpec as exc:
        raise UsageError(str(exc)) from exc
    text = "n,seconds\n" + "".join(f"{n},{t:.6f}\n" for n, t in rows)
    _write(a.out, text)
    if len(rows) >= 2:
        print(f"log-log slope {ev.loglog_slope(rows):.2f}")
    return EXIT_OK


COMMANDS = {
    "delineate": cmd_delineate,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for parallel stages (outputs do not depend on it)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging")

    query = argparse.ArgumentParser(add_help=False)
    query.add_argument("--input", required=True, help="record file")
    query.add_argument("--format", choices=("jsonl", "csv"), default="jsonl", help="record file format")
    query.add_argument("--keywords", required=True, help="comma-separated region name variants")
    query.add_argument("--case-sensitive", action="store_true", help="match keywords case-sensitively")
    query.add_argument("--day-start", type=float, default=8, help="first local hour kept")
    query.add_argument("--day-end", type=float, default=20, help="local hour where the window ends (exclusive)")
    query.add_argument("--utc-offset-min", type=int, default=60, help="local time offset from UTC in minutes")
    query.add_argument("--metric", choices=[m.value for m in Metric], default=Metric.EUCLIDEAN_DEGREES.value,
                       help="distance metric")
    query.add_argument("--bin-width", type=int, default=1, help="interval bin width in seconds for the entropy")

    synth = argparse.ArgumentParser(add_help=False)
    synth.add_argument("--seed", type=int, default=0, help="random seed")
    synth.add_argument("--center-lat", type=float, default=52.5, help="planted disk center latitude")
    synth.add_argument("--center-lon", type=float, default=-1.5, help="planted disk center longitude")
    synth.add_argument("--radius", type=float, default=1.0, help="planted disk radius in degrees")
    synth.add_argument("--in-region", type=int, default=1000, help="points inside the planted region")
    synth.add_argument("--decoys", type=int, default=3, help="number of decoy blobs")
    synth.add_argument("--decoy-points", type=int, default=200, help="points per decoy blob")
    synth.add_argument("--scatter", type=int, default=200, help="uniform scatter noise points")
    synth.add_argument("--period", type=int, default=20, help="posting period inside the region, seconds")
    synth.add_argument("--jitter", type=int, default=1, help="max timing jitter inside the region, seconds")
    synth.add_argument("--decoy-sigma", type=float, default=0.7, help="decoy blob spread in degrees")
    synth.add_argument("--keyword", default="planted", help="keyword placed in every record's text")

    parser = _Parser(prog="vagueregion", description=__doc__, formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("delineate", parents=[common, query], formatter_class=fmt,
                       help="delineate a region from a record file")
    p.add_argument("--region-out", default="region.geojson", help="GeoJSON output for the region")
    p.add_argument("--trace-out", default="trace.jsonl", help="JSONL output, one line per iteration")
    p.add_argument("--grid-resolution", type=int, default=256, help="raster cells per axis for the boundary")
    p.add_argument("--max-iterations", type=int, default=None, help="stop after this many radii")
    p.add_argument("--fixed-delta", type=float, default=None, help="use this threshold instead of (Hmax-Hmin)/2")

    p = sub.add_parser("evaluate", parents=[common], formatter_class=fmt,
                       help="Monte-Carlo precision/recall/F1 of a region against ground truth")
    p.add_argument("--region", required=True, help="estimated region GeoJSON")
    p.add_argument("--truth", required=True, help="ground-truth GeoJSON polygon")
    p.add_argument("--samples", type=int, default=100_000, help="Monte-Carlo sample count")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--report-out", default="report.json", help="JSON report output")

    p = sub.add_parser("synth", parents=[common, synth], formatter_class=fmt,
                       help="write a synthetic record file with a planted region")
    p.add_argument("--out", default="synthetic.jsonl", help="record output")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl", help="record output format")
    p.add_argument("--truth-out", default="planted.geojson", help="planted region GeoJSON output")

    p = sub.add_parser("sweep", parents=[common, query], formatter_class=fmt,
                       help="F1 for fixed MinPts values versus the adaptive rule")
    p.add_argument("--truth", required=True, help="ground-truth GeoJSON polygon")
    p.add_argument("--candidates", default=",".join(str(k) for k in range(1, 21)),
                   help="comma-separated fixed MinPts values")
    p.add_argument("--samples", type=int, default=100_000, help="Monte-Carlo sample count")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--out", default="sweep.csv", help="CSV output")

    p = sub.add_parser("bench", parents=[common, synth], formatter_class=fmt,
                       help="wall time of a full delineation versus n")
    p.add_argument("--sizes", default="500,1000,2000,3000,4500", help="comma-separated dataset sizes")
    p.add_argument("--repeats", type=int, default=3, help="runs per size (median reported)")
    p.add_argument("--metric", choices=[m.value for m in Metric], default=Metric.EUCLIDEAN_DEGREES.value,
                   help="distance metric")
    p.add_argument("--out", default="bench.csv", help="CSV output")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig(args.command, args)
    try:
        return COMMANDS[args.command](cfg)
    except DegenerateDataset as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ParseError, ev.GeoJSONError, ev.DegenerateRegion, ev.InvalidSpec, RegionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
