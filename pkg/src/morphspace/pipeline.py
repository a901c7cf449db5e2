"""File-based pipeline stages and the reproducible run manifest.

Every stage reads its inputs from the configured sources or from files a
previous stage left in the output directory, and writes its own artifacts
there.  A full run is literally the stages invoked in sequence, so the
bundle produced by ``run_pipeline`` is byte-identical to running the
stages one at a time with the same configuration.  Nothing here writes a
timestamp; the manifest carries every parameter (explicit or default),
plus SHA-256 digests of all inputs and outputs, so two runs of the same
configuration can be diffed file by file.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__, dataset
from .clustering import (
    ClusterModel,
    cluster_pairs,
    model_from_dict,
    read_clusters_csv,
    write_clusters_csv,
    write_model_json,
)
from .errors import IngestError, MorphspaceError, ParamError, StageError
from .field import (
    MorphologicalField,
    count_configurations,
    count_cross_dimension_pairs,
    dump_field,
    load_field,
)
from .graphs import (
    PROFILE_AXES,
    GRAPH_MODES,
    ThresholdGraph,
    betweenness_centrality,
    build_graph,
    condition_profiles,
    connected_components,
    correlation_matrix,
    dimension_profiles,
    greedy_modularity_communities,
    maximal_cliques,
    write_graph_csv,
    write_graph_json,
    write_matrix_csv,
)
from .pairs import (
    apply_judgments,
    consistent_pairs,
    generate_pairs,
    read_judgments_csv,
    read_pairs_csv,
    unscored_conditions,
    write_pairs_csv,
)
from .report import (
    check_published_averages,
    condition_affinities,
    assemble_scenarios,
    scorecard_concordance,
    write_report_bundle,
)
from .survey import (
    ConditionScore,
    LikertScale,
    aggregate,
    read_responses_csv,
    read_scores_csv,
    scale_from_dict,
    write_scores_csv,
)

BUNDLED_FIELDS = ("bundled", "bundled-extended")

# Published census for the extended bundled field; the structural count
# disagrees with it by one and the report says so rather than hiding it.
PUBLISHED_EXTENDED_CENSUS = 1120

FIELD_FILE = "field.json"
SCORES_FILE = "scores.csv"
PAIRS_FILE = "pairs.csv"
CLUSTERS_FILE = "clusters.csv"
MODEL_FILE = "cluster_model.json"
NETWORK_FILE = "network.json"
MANIFEST_FILE = "manifest.json"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a run depends on; defaults give the bundled analysis."""

    field: str = "bundled"
    scores: str = "bundled"
    responses: str | None = None
    scales: str | None = None
    judgments: str | None = None
    axis: str = "combined"
    mode: str = "signed-abs"
    dimension_threshold: float = 0.6
    condition_threshold: float = 0.7
    k: int = 4
    seed: int = 42
    max_iter: int = 300
    tol: float = 1e-6
    bins: int = 5
    outdir: str = "out"


def validate_config(cfg: PipelineConfig) -> None:
    if cfg.axis not in PROFILE_AXES:
        raise ParamError(f"axis {cfg.axis!r} not one of {PROFILE_AXES}")
    if cfg.mode not in GRAPH_MODES:
        raise ParamError(f"mode {cfg.mode!r} not one of {GRAPH_MODES}")
    for name, t in (
        ("dimension-threshold", cfg.dimension_threshold),
        ("condition-threshold", cfg.condition_threshold),
    ):
        if not 0.0 <= t <= 1.0:
            raise ParamError(f"{name} {t} outside [0, 1]")
    if not 2 <= cfg.k <= 10:
        raise ParamError(f"k={cfg.k} outside [2, 10]")
    if cfg.bins < 1:
        raise ParamError("bins must be at least 1")
    for label, path in (
        ("field", None if cfg.field in BUNDLED_FIELDS else cfg.field),
        ("scores", None if cfg.scores == "bundled" else cfg.scores),
        ("responses", cfg.responses),
        ("scales", cfg.scales),
        ("judgments", cfg.judgments),
    ):
        if path is not None and not Path(path).is_file():
            raise ParamError(f"{label} file not found: {path}")


def resolve_field(cfg: PipelineConfig) -> MorphologicalField:
    if cfg.field == "bundled":
        return dataset.bundled_field()
    if cfg.field == "bundled-extended":
        return dataset.bundled_field(extended=True)
    if not Path(cfg.field).is_file():
        raise ParamError(f"field file not found: {cfg.field}")
    return load_field(cfg.field)


def _load_scales(cfg: PipelineConfig) -> dict[str, LikertScale]:
    if cfg.scales is None:
        return dataset.bundled_scales()
    with open(cfg.scales, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    docs = doc if isinstance(doc, list) else [doc]
    scales = {}
    for d in docs:
        scale = scale_from_dict(d)
        scales[scale.axis] = scale
    return scales


def resolve_scores(
    cfg: PipelineConfig, field: MorphologicalField
) -> tuple[ConditionScore, ...]:
    """Aggregate raw responses if given, else load an aggregate table."""
    if cfg.responses is not None:
        responses = read_responses_csv(cfg.responses, _load_scales(cfg))
        return aggregate(field, responses)
    if cfg.scores == "bundled":
        scores = dataset.bundled_scores()
    else:
        scores = read_scores_csv(cfg.scores)
    known = set(field.condition_ids())
    unknown = sorted(s.condition for s in scores if s.condition not in known)
    if unknown:
        raise IngestError(f"score table references unknown conditions: {unknown}")
    return tuple(scores)


def _is_bundled_run(cfg: PipelineConfig) -> bool:
    return cfg.field in BUNDLED_FIELDS and cfg.scores == "bundled" and cfg.responses is None


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def _outdir(cfg: PipelineConfig) -> Path:
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(out: Path, name: str, producer: str) -> Path:
    path = out / name
    if not path.is_file():
        raise ParamError(f"{name} not found in {out}; run the {producer} stage first")
    return path


def stage_pairs(cfg: PipelineConfig) -> dict:
    """Ingest scores, generate pairs, apply judgments; write the tables."""
    out = _outdir(cfg)
    field = resolve_field(cfg)
    dump_field(field, out / FIELD_FILE)
    scores = resolve_scores(cfg, field)
    write_scores_csv(out / SCORES_FILE, scores)
    pairs = generate_pairs(field, scores)
    judgments = read_judgments_csv(cfg.judgments) if cfg.judgments else []
    if judgments:
        pairs = apply_judgments(field, pairs, judgments)
    write_pairs_csv(out / PAIRS_FILE, pairs)
    census = count_cross_dimension_pairs(field)
    summary = {
        "census": census,
        "generated": len(pairs),
        "survivors": len(consistent_pairs(pairs)),
        "skipped_conditions": list(unscored_conditions(field, scores)),
        "judgments": len(judgments),
    }
    if cfg.field == "bundled-extended":
        summary["published_census"] = PUBLISHED_EXTENDED_CENSUS
        summary["census_note"] = (
            f"computed census {census} differs from previously published"
            f" census {PUBLISHED_EXTENDED_CENSUS}"
        )
    return summary


def _graph_stats(graph: ThresholdGraph) -> dict:
    communities = greedy_modularity_communities(graph)
    cliques = maximal_cliques(graph)
    centrality = betweenness_centrality(graph, normalized=True)
    components = connected_components(graph)
    return {
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
        "threshold": graph.threshold,
        "mode": graph.mode,
        "modularity": round(communities.modularity, 9),
        "communities": [list(c) for c in communities.communities],
        "cliques": [list(c) for c in cliques.cliques],
        "clique_membership": {v: cliques.membership[v] for v in sorted(cliques.membership)},
        "betweenness": {v: round(centrality[v], 9) for v in sorted(centrality)},
        "components": [list(c) for c in components],
    }


def stage_network(cfg: PipelineConfig) -> dict:
    """Correlate at dimension and condition level; analyse both graphs."""
    out = _outdir(cfg)
    field = resolve_field(cfg)
    scores = resolve_scores(cfg, field)
    write_scores_csv(out / SCORES_FILE, scores)
    stats: dict = {"axis": cfg.axis}
    network: dict = {"axis": cfg.axis, "levels": {}}
    for level, threshold, profiles in (
        ("dimensions", cfg.dimension_threshold, dimension_profiles(field, scores, cfg.axis)),
        ("conditions", cfg.condition_threshold, condition_profiles(field, scores, cfg.axis)),
    ):
        matrix = correlation_matrix(profiles, axis=cfg.axis)
        graph = build_graph(matrix, threshold=threshold, mode=cfg.mode)
        write_matrix_csv(out / f"matrix_{level}.csv", matrix)
        write_graph_csv(out / f"graph_{level}.csv", graph)
        write_graph_json(out / f"graph_{level}.json", graph)
        level_stats = _graph_stats(graph)
        level_stats["zero_variance"] = list(matrix.zero_variance)
        network["levels"][level] = level_stats
        stats[level] = {
            "entities": len(matrix.entities),
            "edges": len(graph.edges),
            "threshold": threshold,
            "modularity": level_stats["modularity"],
            "communities": len(level_stats["communities"]),
        }
    with open(out / NETWORK_FILE, "w", encoding="utf-8") as fh:
        json.dump(network, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return stats


def stage_cluster(cfg: PipelineConfig) -> dict:
    """Cluster the pair table left by the pairs stage."""
    out = _outdir(cfg)
    pairs = read_pairs_csv(_require(out, PAIRS_FILE, "pairs"))
    model = cluster_pairs(
        pairs, k=cfg.k, seed=cfg.seed, max_iter=cfg.max_iter, tol=cfg.tol
    )
    write_clusters_csv(out / CLUSTERS_FILE, pairs, model)
    write_model_json(out / MODEL_FILE, model)
    return {
        "k": model.k,
        "seed": model.seed,
        "iterations": model.iterations,
        "inertia": round(model.inertia, 9),
        "sizes": [s.size for s in model.summaries],
    }


def _reload_model(out: Path) -> tuple[ClusterModel, list]:
    """Rebuild the cluster model from its two files for the report stage."""
    rows = read_clusters_csv(_require(out, CLUSTERS_FILE, "cluster"))
    with open(_require(out, MODEL_FILE, "cluster"), "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    assignments = {pair.key(): label for pair, label in rows}
    return model_from_dict(doc, assignments), rows


def stage_scenarios(cfg: PipelineConfig) -> dict:
    """Assemble scenarios from the clustered pairs and write the bundle."""
    out = _outdir(cfg)
    field = resolve_field(cfg)
    scores = read_scores_csv(_require(out, SCORES_FILE, "pairs"))
    pairs = read_pairs_csv(_require(out, PAIRS_FILE, "pairs"))
    model, _rows = _reload_model(out)
    affinities = condition_affinities(field, pairs, model)
    scenarios = assemble_scenarios(field, scores, affinities)

    average_checks = ()
    concordance = None
    extra_lines: list[str] = []
    if _is_bundled_run(cfg):
        average_checks = check_published_averages(dataset.published_scenarios())
        concordance = scorecard_concordance(
            field, scenarios, dataset.published_scorecard()
        )
        if cfg.field == "bundled-extended":
            census = count_cross_dimension_pairs(field)
            extra_lines.append(
                f"census note: computed {census} cross-dimension pairs;"
                f" previously published census was {PUBLISHED_EXTENDED_CENSUS}"
            )
    write_report_bundle(
        out,
        field,
        scenarios,
        affinities,
        model,
        pairs,
        configuration_count=count_configurations(field),
        average_checks=average_checks,
        concordance=concordance,
        extra_summary_lines=extra_lines,
    )
    summary: dict = {
        "scenarios": [
            {
                "name": s.name,
                "cluster": s.cluster,
                "impact": round(s.impact, 9),
                "likelihood": round(s.likelihood, 9),
            }
            for s in scenarios
        ],
    }
    if average_checks:
        summary["published_average_checks"] = [
            {
                "scenario": c.scenario,
                "recomputed_impact": round(c.recomputed_impact, 9),
                "printed_impact": c.printed_impact,
                "recomputed_likelihood": round(c.recomputed_likelihood, 9),
                "printed_likelihood": c.printed_likelihood,
                "flagged": c.flagged(),
            }
            for c in average_checks
        ]
    if concordance is not None and concordance.cells:
        summary["scorecard_concordance"] = {
            "cells": len(concordance.cells),
            "matched": concordance.matched(),
            "fraction": round(concordance.fraction(), 9),
        }
    return summary


# ---------------------------------------------------------------------------
# Full run and manifest
# ---------------------------------------------------------------------------


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _input_digests(cfg: PipelineConfig) -> dict[str, str]:
    out: dict[str, str] = {}
    data = resources.files("morphspace.data")
    if cfg.field in BUNDLED_FIELDS:
        out["field:ai_risk_field.json"] = _sha256_text(
            data.joinpath("ai_risk_field.json").read_text("utf-8")
        )
        if cfg.field == "bundled-extended":
            out["field:superintelligence_dimension.json"] = _sha256_text(
                data.joinpath("superintelligence_dimension.json").read_text("utf-8")
            )
    else:
        out[f"field:{cfg.field}"] = _sha256_file(Path(cfg.field))
    if cfg.responses is not None:
        out[f"responses:{cfg.responses}"] = _sha256_file(Path(cfg.responses))
    elif cfg.scores == "bundled":
        out["scores:condition_scores.csv"] = _sha256_text(
            data.joinpath("condition_scores.csv").read_text("utf-8")
        )
    else:
        out[f"scores:{cfg.scores}"] = _sha256_file(Path(cfg.scores))
    if cfg.scales is not None:
        out[f"scales:{cfg.scales}"] = _sha256_file(Path(cfg.scales))
    if cfg.judgments is not None:
        out[f"judgments:{cfg.judgments}"] = _sha256_file(Path(cfg.judgments))
    return out


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run every stage and write a manifest capturing the whole run."""
    validate_config(cfg)
    out = _outdir(cfg)
    field = resolve_field(cfg)
    stages: dict[str, dict] = {}
    for name, fn in (
        ("pairs", stage_pairs),
        ("network", stage_network),
        ("cluster", stage_cluster),
        ("scenarios", stage_scenarios),
    ):
        try:
            stages[name] = fn(cfg)
        except StageError:
            raise
        except MorphspaceError as exc:
            raise StageError(name, exc) from exc
    outputs = {
        p.name: _sha256_file(p)
        for p in sorted(out.iterdir())
        if p.is_file() and p.name != MANIFEST_FILE
    }
    manifest = {
        "manifest_version": 1,
        "tool_version": __version__,
        "config": asdict(cfg),
        "field": {
            "id": field.id,
            "title": field.title,
            "dimensions": len(field.dimensions),
            "conditions": len(field.condition_ids()),
            "configurations": count_configurations(field),
        },
        "stages": stages,
        "inputs": _input_digests(cfg),
        "outputs": outputs,
    }
    with open(out / MANIFEST_FILE, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
