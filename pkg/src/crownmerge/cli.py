"""Pipeline orchestration and the command line interface.

``run_pipeline`` wires the stages together: load a labeled raster, cast
rays, agglomerate, derive per-merge parameters, locate break points,
trim, and rank the surviving candidate groups.  Everything it writes is
deterministic: JSON keys are sorted, rows follow node-id order, and no
timestamps or absolute paths appear in any artifact.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import hac, links, params, ranking, raster_io, synth, termination

REPORT_SCHEMA = 1


@dataclass
class PipelineConfig:
    input_path: Path
    out_dir: Path
    fmt: str = "auto"
    parameter: str = "a_merge"
    significance_p: float = 0.25
    min_group_size: int = 7
    max_ray: int | None = None
    score_key: str = "mean"
    dump_links: bool = False
    # Accepted for forward compatibility; only the defaults are implemented.
    difference_order: int = 1
    rate_basis: str = "path-index"

    def validate(self) -> None:
        if self.fmt != "auto" and self.fmt not in raster_io.FORMATS:
            raise ValueError(f"unknown format {self.fmt!r}")
        if not 0.0 <= self.significance_p <= 1.0:
            raise ValueError(f"significance_p must be in [0, 1], got {self.significance_p}")
        if self.min_group_size < 1:
            raise ValueError(f"min_group_size must be >= 1, got {self.min_group_size}")
        if self.max_ray is not None and self.max_ray < 1:
            raise ValueError(f"max_ray must be >= 1, got {self.max_ray}")
        if self.score_key not in ranking.SCORE_KEYS:
            raise ValueError(f"score_key must be one of {ranking.SCORE_KEYS}")
        if self.difference_order != 1:
            raise ValueError("only first differences are implemented")
        if self.rate_basis != "path-index":
            raise ValueError("only path-index rates are implemented")
        params.validate_stream(self.parameter)


@dataclass
class PipelineResult:
    hierarchy: hac.Hierarchy | None
    candidates: list[ranking.RankedCandidate] = field(default_factory=list)
    f_significance: int = 0
    isol_count: int = 0


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    config.validate()
    fmt = config.fmt
    if fmt == "auto":
        with open(config.input_path, "rb") as fh:
            fmt = raster_io.sniff_format(fh.read(64))
    with open(config.input_path, "rb") as fh:
        raster = raster_io.load_raster(fh, fmt)

    isols = raster_io.extract_isols(raster)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    if not isols:
        _write_empty_outputs(config, raster)
        return PipelineResult(hierarchy=None)

    store = links.cast_rays(raster, isols, max_ray=config.max_ray)
    hierarchy = hac.agglomerate(isols, store)
    by_id = raster_io.by_id(isols)
    node_params = params.compute_params(hierarchy, store, by_id)
    stream = params.parameter_stream(hierarchy, node_params, config.parameter)
    traces = termination.trace_all(hierarchy, stream)
    breaks = termination.count_breaks(hierarchy, traces, p=config.significance_p)
    trimmed = termination.trim(hierarchy, breaks)
    terminals = termination.filter_terminals(trimmed, hierarchy, config.min_group_size)
    candidates = ranking.rank_candidates(hierarchy, by_id, terminals, key=config.score_key)

    _write_report(config, hierarchy, node_params, breaks, candidates)
    _write_hierarchy(config, hierarchy)
    with open(config.out_dir / "params.csv", "w", newline="") as fh:
        params.dump_params_csv(hierarchy, node_params, fh)
    trace_dir = config.out_dir / "traces"
    trace_dir.mkdir(exist_ok=True)
    for trace in traces:
        isol_id = _isol_of_singleton(isols, trace.start)
        with open(trace_dir / f"{isol_id}.csv", "w", newline="") as fh:
            termination.dump_trace_csv(trace, fh)
    with open(config.out_dir / "histogram.csv", "w", newline="") as fh:
        termination.dump_histogram_csv(hierarchy, breaks, fh)
    _write_clusters(config, raster, hierarchy, by_id, candidates)
    if config.dump_links:
        with open(config.out_dir / "links.csv", "w", newline="") as fh:
            links.dump_links_csv(store, fh)

    return PipelineResult(
        hierarchy=hierarchy,
        candidates=candidates,
        f_significance=breaks.significance,
        isol_count=len(isols),
    )


def _isol_of_singleton(isols: list[raster_io.Isol], node_id: int) -> int:
    return sorted(isol.id for isol in isols)[node_id]


def _candidate_row(hierarchy: hac.Hierarchy, c: ranking.RankedCandidate, rank: int) -> dict:
    node = hierarchy.node(c.node_id)
    return {
        "rank": rank,
        "node_id": node.id,
        "merge_iteration": node.merge_iteration,
        "member_count": len(node.members),
        "pixel_count": c.stats.pixel_count,
        "members": sorted(node.members),
        "centroid": list(c.stats.centroid),
        "mad": c.stats.mean_abs_dev,
        "max_ad": c.stats.max_abs_dev,
        "score": c.stats.score,
        "sum_over_max": c.stats.sum_over_max,
    }


def _write_report(config, hierarchy, node_params, breaks, candidates) -> None:
    report = {
        "schema": REPORT_SCHEMA,
        "parameter": config.parameter,
        "significance_p": config.significance_p,
        "f_significance": breaks.significance,
        "min_group_size": config.min_group_size,
        "score_key": config.score_key,
        "isol_count": hierarchy.singleton_count(),
        "candidates": [
            _candidate_row(hierarchy, c, rank)
            for rank, c in enumerate(candidates, start=1)
        ],
    }
    _dump_json(config.out_dir / "report.json", report)


def _write_hierarchy(config, hierarchy) -> None:
    _dump_json(
        config.out_dir / "hierarchy.json",
        {"schema": REPORT_SCHEMA, "nodes": hac.hierarchy_records(hierarchy)},
    )


def _write_clusters(config, raster, hierarchy, by_id, candidates) -> None:
    groups = [
        (rank, sorted(hierarchy.node(c.node_id).members))
        for rank, c in enumerate(candidates, start=1)
    ]
    painted = raster_io.write_cluster_raster(raster, groups, by_id)
    with open(config.out_dir / "clusters.pgm", "wb") as fh:
        fh.write(raster_io.dump_pgm(painted))


def _write_empty_outputs(config: PipelineConfig, raster: raster_io.LabeledRaster) -> None:
    report = {
        "schema": REPORT_SCHEMA,
        "parameter": config.parameter,
        "significance_p": config.significance_p,
        "f_significance": 0,
        "min_group_size": config.min_group_size,
        "score_key": config.score_key,
        "isol_count": 0,
        "candidates": [],
    }
    _dump_json(config.out_dir / "report.json", report)
    _dump_json(config.out_dir / "hierarchy.json", {"schema": REPORT_SCHEMA, "nodes": []})
    (config.out_dir / "params.csv").write_text(
        "node_id,merge_iteration,a_merge,l_hat,lw_ratio,n_pix,n_edge,a_cumulative\n"
    )
    (config.out_dir / "traces").mkdir(exist_ok=True)
    (config.out_dir / "histogram.csv").write_text("count_value,num_nodes\n")
    with open(config.out_dir / "clusters.pgm", "wb") as fh:
        fh.write(raster_io.dump_pgm(raster_io.write_cluster_raster(raster, [], {})))


def _dump_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# click commands
# ---------------------------------------------------------------------------


@click.group()
def main() -> None:
    """Group oversegmented labeled regions by connective-link clustering."""


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--format", "fmt", default="auto", show_default=True,
              type=click.Choice(["auto", *raster_io.FORMATS]))
@click.option("--param", default="a_merge", show_default=True,
              help="Merge-parameter stream; a named stream or ratio:<numer>/<denom>.")
@click.option("--significance-p", default=0.25, show_default=True, type=float)
@click.option("--min-size", default=7, show_default=True, type=int)
@click.option("--max-ray", default=None, type=int)
@click.option("--score", "score_key", default="mean", show_default=True,
              type=click.Choice(list(ranking.SCORE_KEYS)))
@click.option("--dump-links", is_flag=True, default=False)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def run(input_path, fmt, param, significance_p, min_size, max_ray, score_key,
        dump_links, out_dir) -> None:
    """Run the full pipeline and write artifacts to --out."""
    config = PipelineConfig(
        input_path=input_path,
        out_dir=out_dir,
        fmt=fmt,
        parameter=param,
        significance_p=significance_p,
        min_group_size=min_size,
        max_ray=max_ray,
        score_key=score_key,
        dump_links=dump_links,
    )
    try:
        result = run_pipeline(config)
    except (FileNotFoundError, raster_io.RasterFormatError, ValueError) as exc:
        _fail(str(exc))
    click.echo(
        f"{result.isol_count} regions, {len(result.candidates)} candidates, "
        f"f_significance={result.f_significance}"
    )


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--format", "fmt", default="auto", show_default=True,
              type=click.Choice(["auto", *raster_io.FORMATS]))
@click.option("--param", default="a_merge", show_default=True)
@click.option("--max-ray", default=None, type=int)
@click.option("--isol", "isol_id", required=True, type=int,
              help="Id of the region whose merge path to trace.")
def trace(input_path, fmt, param, max_ray, isol_id) -> None:
    """Print one region's merge-path trace as CSV on stdout."""
    try:
        if fmt == "auto":
            with open(input_path, "rb") as fh:
                fmt = raster_io.sniff_format(fh.read(64))
        with open(input_path, "rb") as fh:
            raster = raster_io.load_raster(fh, fmt)
        isols = raster_io.extract_isols(raster)
        ids = sorted(isol.id for isol in isols)
        if isol_id not in ids:
            raise ValueError(f"no region with id {isol_id}")
        store = links.cast_rays(raster, isols, max_ray=max_ray)
        hierarchy = hac.agglomerate(isols, store)
        node_params = params.compute_params(hierarchy, store, raster_io.by_id(isols))
        stream = params.parameter_stream(hierarchy, node_params, param)
        path_trace = termination.trace_path(hierarchy, stream, ids.index(isol_id))
        termination.dump_trace_csv(path_trace, sys.stdout)
    except (FileNotFoundError, raster_io.RasterFormatError, ValueError) as exc:
        _fail(str(exc))


@main.command("synth")
@click.option("--kind", type=click.Choice(["ring", "random"]), default="ring",
              show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--k", default=8, show_default=True, type=int)
@click.option("--gap", default=2, show_default=True, type=int)
@click.option("--outliers", default=3, show_default=True, type=int)
@click.option("--n", "n_isols", default=12, show_default=True, type=int,
              help="Blob count for --kind random.")
@click.option("--size", default=128, show_default=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def synth_cmd(kind, seed, k, gap, outliers, n_isols, size, out_dir) -> None:
    """Write a synthetic scene (scene.txt and truth.json) to --out."""
    try:
        if kind == "ring":
            scene = synth.generate_ring(seed, k=k, gap=gap, outliers=outliers, size=size)
        else:
            scene = synth.generate_random(seed, n_isols, size=size)
    except ValueError as exc:
        _fail(str(exc))
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "scene.txt").write_text(raster_io.dump_text_grid(scene.raster))
    _dump_json(
        out_dir / "truth.json",
        {
            "seed": scene.seed,
            "truth_groups": [sorted(group) for group in scene.truth_groups],
        },
    )
    click.echo(f"wrote {kind} scene with {len(scene.truth_groups)} truth groups")


if __name__ == "__main__":
    main()
