"""HTTP workbench API over the analysis engine.

A small JSON API for interactive exploration: field documents with
optimistic-concurrency revisions, survey response uploads, a replaceable
cross-consistency judgment log, a pin explorer with exact counts, and
per-stage analysis runs persisted as reproducible artifacts.

Counts of configurations are serialized as strings because they routinely
exceed what JSON consumers can hold in a double.  Every error body has the
same shape: ``{"code", "message", "path"}``.

Configuration comes from ``create_app`` arguments or, failing that, the
environment: ``MORPHSPACE_DATA_DIR`` (document root), ``MORPHSPACE_BUDGET``
(largest configuration space the explorer will count), and
``MORPHSPACE_PRELOAD`` (``bundled`` or ``bundled-extended`` to seed the
packaged dataset on startup).
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Mapping

from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import dataset
from .clustering import (
    MAX_K,
    MIN_K,
    cluster_pairs,
    model_from_dict,
    read_clusters_csv,
    write_clusters_csv,
    write_model_json,
)
from .errors import (
    BudgetExceededError,
    IngestError,
    MorphspaceError,
    NotFoundError,
    ParamError,
)
from .field import (
    MorphologicalField,
    count_configurations,
    count_consistent_configurations,
    count_cross_dimension_pairs,
    exclusions_for_pins,
    field_from_dict,
    field_to_dict,
    merge_exclusions,
)
from .graphs import (
    GRAPH_MODES,
    PROFILE_AXES,
    betweenness_centrality,
    build_graph,
    condition_profiles,
    connected_components,
    correlation_matrix,
    dimension_profiles,
    graph_from_dict,
    greedy_modularity_communities,
    maximal_cliques,
    write_graph_csv,
    write_graph_json,
    write_matrix_csv,
)
from .pairs import (
    ConsistencyJudgment,
    VERDICTS,
    apply_judgments,
    canonical_pair,
    consistent_pairs,
    generate_pairs,
    judgments_to_exclusions,
    read_pairs_csv,
    unscored_conditions,
    write_pairs_csv,
)
from .report import (
    assemble_scenarios,
    check_published_averages,
    condition_affinities,
    scorecard_concordance,
    write_report_bundle,
)
from .store import ConflictError, FieldStore, StalePrerequisiteError
from .survey import (
    AXES,
    SurveyResponse,
    aggregate,
    score_map,
    write_scores_csv,
)

DEFAULT_BUDGET = 10**9

_STATUS_BY_CODE = {
    "not-found": 404,
    "conflict": 409,
    "revision-conflict": 409,
    "stale-prerequisite": 409,
    "too-large": 413,
}

ANALYSIS_STAGES = (
    "pairs",
    "correlation",
    "communities",
    "cliques",
    "centrality",
    "clusters",
    "scenarios",
)


# ---------------------------------------------------------------------------
# Document helpers
# ---------------------------------------------------------------------------


def _field_of(doc: Mapping) -> MorphologicalField:
    return field_from_dict(doc["field"])


def _responses_of(doc: Mapping) -> list[SurveyResponse]:
    return [
        SurveyResponse(
            respondent=r["respondent"],
            condition=r["condition"],
            axis=r["axis"],
            value=float(r["value"]),
            expertise=r.get("expertise", ""),
            track=r.get("track", ""),
        )
        for r in doc["responses"]
    ]


def _judgments_of(doc: Mapping) -> list[ConsistencyJudgment]:
    return [
        ConsistencyJudgment(
            a=j["condition_a"],
            b=j["condition_b"],
            verdict=j["verdict"],
            note=j.get("note", ""),
            author=j.get("author", ""),
            timestamp=j.get("timestamp", ""),
        )
        for j in doc["judgments"]
    ]


def _scores_of(field: MorphologicalField, doc: Mapping):
    if not doc["responses"]:
        raise IngestError(
            "no responses recorded for this field; upload responses first"
        )
    return aggregate(field, _responses_of(doc))


def _judgment_counts(field: MorphologicalField, doc: Mapping) -> tuple[int, int]:
    """Cross-dimension pair census and the count surviving the verdict log."""
    census = count_cross_dimension_pairs(field)
    final: dict[tuple[str, str], str] = {}
    for j in _judgments_of(doc):
        final[canonical_pair(field, j.a, j.b)] = j.verdict.strip().casefold()
    pruned = sum(1 for v in final.values() if v == "inconsistent")
    return census, census - pruned


def _validate_response_rows(field: MorphologicalField, rows: object) -> list[dict]:
    if not isinstance(rows, list) or not rows:
        raise IngestError("responses must be a non-empty array of objects")
    index = field.condition_index()
    problems: list[str] = []
    clean: list[dict] = []
    for i, row in enumerate(rows):
        if not isinstance(row, Mapping):
            problems.append(f"row {i}: not an object")
            continue
        respondent = row.get("respondent")
        condition = row.get("condition")
        axis = row.get("axis")
        value = row.get("value")
        if not isinstance(respondent, str) or not respondent.strip():
            problems.append(f"row {i}: missing respondent")
            continue
        if condition not in index:
            problems.append(f"row {i}: unknown condition id {condition!r}")
            continue
        if axis not in AXES:
            problems.append(f"row {i}: axis must be one of {AXES}")
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            problems.append(f"row {i}: value must be a number in [0, 1]")
            continue
        v = float(value)
        if not 0.0 <= v <= 1.0:
            problems.append(f"row {i}: value {v} outside [0, 1]")
            continue
        clean.append(
            {
                "respondent": respondent.strip(),
                "condition": condition,
                "axis": axis,
                "value": v,
                "expertise": str(row.get("expertise", "") or ""),
                "track": str(row.get("track", "") or ""),
            }
        )
    if problems:
        shown = problems[:5]
        more = len(problems) - len(shown)
        if more > 0:
            shown.append(f"(+{more} more)")
        raise IngestError("; ".join(shown))
    return clean


def _validate_judgment_rows(field: MorphologicalField, rows: object) -> list[dict]:
    if not isinstance(rows, list):
        raise ParamError("judgments must be an array of objects")
    clean: list[dict] = []
    for i, row in enumerate(rows):
        if not isinstance(row, Mapping):
            raise ParamError(f"judgment row {i} is not an object")
        a = row.get("condition_a")
        b = row.get("condition_b")
        verdict = str(row.get("verdict", "")).strip().casefold()
        if not isinstance(a, str) or not isinstance(b, str):
            raise ParamError(f"judgment row {i}: condition_a and condition_b required")
        canonical_pair(field, a, b)  # id and dimension checks
        if verdict not in VERDICTS:
            raise ParamError(
                f"judgment row {i}: verdict must be one of {VERDICTS}"
            )
        clean.append(
            {
                "condition_a": a,
                "condition_b": b,
                "verdict": verdict,
                "note": str(row.get("note", "") or ""),
                "author": str(row.get("author", "") or ""),
                "timestamp": str(row.get("timestamp", "") or ""),
            }
        )
    return clean


# ---------------------------------------------------------------------------
# Analysis stages
# ---------------------------------------------------------------------------


def _artifact_id(stage: str, revision: int, params: Mapping) -> str:
    canon = json.dumps(params, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canon.encode("utf-8")).hexdigest()[:8]
    return f"{stage}-r{revision}-{digest}"


def _require_artifact(
    store: FieldStore, fid: str, doc: Mapping, stage: str, explicit: object
) -> dict:
    """Resolve a prerequisite artifact that matches the current revision."""
    if explicit is not None:
        if not isinstance(explicit, str):
            raise ParamError(f"{stage} artifact reference must be a string id")
        meta, _files = store.get_artifact(fid, explicit)
        if meta["stage"] != stage:
            raise ParamError(
                f"artifact {explicit!r} is a {meta['stage']!r} artifact,"
                f" not {stage!r}"
            )
        if meta["revision"] != doc["revision"]:
            raise StalePrerequisiteError(
                f"artifact {explicit!r} was computed at revision"
                f" {meta['revision']} but the field is at revision"
                f" {doc['revision']}; re-run {stage} first"
            )
        return meta
    meta = store.latest_artifact(fid, stage, doc["revision"])
    if meta is None:
        raise StalePrerequisiteError(
            f"no {stage!r} artifact at the current revision"
            f" {doc['revision']}; run {stage} first"
        )
    return meta


def _float_param(params: Mapping, key: str, default: float) -> float:
    v = params.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParamError(f"parameter {key!r} must be a number")
    return float(v)


def _int_param(params: Mapping, key: str, default: int) -> int:
    v = params.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParamError(f"parameter {key!r} must be an integer")
    return v


def _round(v: float) -> float:
    return round(float(v), 9)


def _stage_pairs(store, fid, doc, field, params):
    resolved = {}
    scores = _scores_of(field, doc)
    judgments = _judgments_of(doc)
    skipped = unscored_conditions(field, scores)
    generated = generate_pairs(field, scores)
    flagged = apply_judgments(field, generated, judgments)
    kept = consistent_pairs(flagged)
    with tempfile.TemporaryDirectory() as tmp:
        write_scores_csv(Path(tmp) / "scores.csv", scores)
        write_pairs_csv(Path(tmp) / "pairs.csv", flagged)
        files = _collect_files(tmp)
    summary = {
        "census": count_cross_dimension_pairs(field),
        "generated": len(flagged),
        "survivors": len(kept),
        "skipped_conditions": list(skipped),
        "judgments": len(judgments),
    }
    return resolved, files, summary


def _stage_correlation(store, fid, doc, field, params):
    level = params.get("level", "conditions")
    if level not in ("conditions", "dimensions"):
        raise ParamError("level must be 'conditions' or 'dimensions'")
    axis = params.get("axis", "combined")
    if axis not in PROFILE_AXES:
        raise ParamError(f"axis must be one of {PROFILE_AXES}")
    mode = params.get("mode", "signed-abs")
    if mode not in GRAPH_MODES:
        raise ParamError(f"mode must be one of {GRAPH_MODES}")
    threshold = _float_param(
        params, "threshold", 0.6 if level == "dimensions" else 0.7
    )
    resolved = {"level": level, "axis": axis, "mode": mode, "threshold": threshold}
    scores = _scores_of(field, doc)
    if level == "dimensions":
        profiles = dimension_profiles(field, scores, axis)
    else:
        profiles = condition_profiles(field, scores, axis)
    matrix = correlation_matrix(profiles, axis=axis)
    graph = build_graph(matrix, threshold, mode)
    with tempfile.TemporaryDirectory() as tmp:
        write_matrix_csv(Path(tmp) / "matrix.csv", matrix)
        write_graph_csv(Path(tmp) / "graph.csv", graph)
        write_graph_json(Path(tmp) / "graph.json", graph)
        files = _collect_files(tmp)
    summary = {
        "entities": len(matrix.entities),
        "edges": len(graph.edges),
        "level": level,
    }
    return resolved, files, summary


def _load_graph(store, fid, meta):
    _meta, files = store.get_artifact(fid, meta["id"])
    return graph_from_dict(json.loads(files["graph.json"]))


def _stage_communities(store, fid, doc, field, params):
    upstream = _require_artifact(store, fid, doc, "correlation", params.get("graph"))
    resolved = {"graph": upstream["id"]}
    graph = _load_graph(store, fid, upstream)
    partition = greedy_modularity_communities(graph)
    payload = {
        "graph": upstream["id"],
        "modularity": _round(partition.modularity),
        "communities": [list(c) for c in partition.communities],
    }
    files = {"communities.json": _json_text(payload)}
    summary = {
        "communities": len(partition.communities),
        "modularity": _round(partition.modularity),
        "sizes": [len(c) for c in partition.communities],
    }
    return resolved, files, summary


def _stage_cliques(store, fid, doc, field, params):
    upstream = _require_artifact(store, fid, doc, "correlation", params.get("graph"))
    resolved = {"graph": upstream["id"]}
    graph = _load_graph(store, fid, upstream)
    cliques = maximal_cliques(graph)
    payload = {
        "graph": upstream["id"],
        "cliques": [list(c) for c in cliques.cliques],
        "membership": dict(sorted(cliques.membership.items())),
    }
    files = {"cliques.json": _json_text(payload)}
    summary = {
        "cliques": len(cliques.cliques),
        "largest": max((len(c) for c in cliques.cliques), default=0),
    }
    return resolved, files, summary


def _stage_centrality(store, fid, doc, field, params):
    upstream = _require_artifact(store, fid, doc, "correlation", params.get("graph"))
    resolved = {"graph": upstream["id"]}
    graph = _load_graph(store, fid, upstream)
    scores = betweenness_centrality(graph, normalized=True)
    payload = {
        "graph": upstream["id"],
        "betweenness": {v: _round(s) for v, s in sorted(scores.items())},
        "components": [list(c) for c in connected_components(graph)],
    }
    files = {"centrality.json": _json_text(payload)}
    top = max(scores.items(), key=lambda kv: (kv[1], kv[0]))[0] if scores else None
    summary = {"entities": len(graph.nodes), "top": top}
    return resolved, files, summary


def _stage_clusters(store, fid, doc, field, params):
    k = _int_param(params, "k", 4)
    seed = _int_param(params, "seed", 42)
    max_iter = _int_param(params, "max_iter", 300)
    tol = _float_param(params, "tol", 1e-6)
    if not MIN_K <= k <= MAX_K:
        raise ParamError(f"k={k} outside [{MIN_K}, {MAX_K}]")
    upstream = _require_artifact(store, fid, doc, "pairs", params.get("pairs"))
    resolved = {
        "k": k,
        "seed": seed,
        "max_iter": max_iter,
        "tol": tol,
        "pairs": upstream["id"],
    }
    pairs = _read_artifact_pairs(store, fid, upstream)
    model = cluster_pairs(pairs, k=k, seed=seed, max_iter=max_iter, tol=tol)
    with tempfile.TemporaryDirectory() as tmp:
        write_clusters_csv(Path(tmp) / "clusters.csv", pairs, model)
        write_model_json(Path(tmp) / "cluster_model.json", model)
        files = _collect_files(tmp)
    summary = {
        "k": model.k,
        "seed": model.seed,
        "iterations": model.iterations,
        "inertia": _round(model.inertia),
        "sizes": [s.size for s in model.summaries],
    }
    return resolved, files, summary


def _read_artifact_pairs(store, fid, meta):
    _meta, files = store.get_artifact(fid, meta["id"])
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "pairs.csv"
        path.write_text(files["pairs.csv"], encoding="utf-8")
        return read_pairs_csv(path)


def _stage_scenarios(store, fid, doc, field, params):
    names = params.get("names")
    if names is not None and (
        not isinstance(names, list) or not all(isinstance(n, str) for n in names)
    ):
        raise ParamError("names must be an array of strings")
    upstream = _require_artifact(store, fid, doc, "clusters", params.get("clusters"))
    resolved = {"clusters": upstream["id"]}
    if names is not None:
        resolved["names"] = list(names)

    _meta, cluster_files = store.get_artifact(fid, upstream["id"])
    pairs_meta = _require_artifact(
        store, fid, doc, "pairs", upstream["params"]["pairs"]
    )
    pairs = _read_artifact_pairs(store, fid, pairs_meta)
    scores = _scores_of(field, doc)
    model = _reload_model(cluster_files)
    affinities = condition_affinities(field, pairs, model)
    scenarios = assemble_scenarios(field, scores, affinities, names=names)

    checks = ()
    concordance = None
    if field.id in (dataset.FIELD_ID, dataset.EXTENDED_FIELD_ID):
        checks = check_published_averages(dataset.published_scenarios())
        concordance = scorecard_concordance(
            field, scenarios, dataset.published_scorecard()
        )
    with tempfile.TemporaryDirectory() as tmp:
        write_report_bundle(
            tmp,
            field,
            scenarios,
            affinities,
            model,
            pairs,
            configuration_count=count_configurations(field),
            average_checks=checks,
            concordance=concordance,
        )
        files = _collect_files(tmp)
    summary = {
        "scenarios": [
            {
                "name": s.name,
                "impact": _round(s.impact),
                "likelihood": _round(s.likelihood),
            }
            for s in scenarios
        ],
    }
    if concordance is not None:
        summary["scorecard_concordance"] = {
            "matched": concordance.matched(),
            "total": len(concordance.cells),
        }
    return resolved, files, summary


def _reload_model(files: Mapping[str, str]):
    data = json.loads(files["cluster_model.json"])
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "clusters.csv"
        path.write_text(files["clusters.csv"], encoding="utf-8")
        assigned = read_clusters_csv(path)
    return model_from_dict(data, {p.key(): label for p, label in assigned})


_STAGE_FUNCS = {
    "pairs": _stage_pairs,
    "correlation": _stage_correlation,
    "communities": _stage_communities,
    "cliques": _stage_cliques,
    "centrality": _stage_centrality,
    "clusters": _stage_clusters,
    "scenarios": _stage_scenarios,
}


def _collect_files(tmp) -> dict[str, str]:
    files = {}
    for path in sorted(Path(tmp).iterdir()):
        if path.is_file():
            files[path.name] = path.read_text(encoding="utf-8")
    return files


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def run_analysis_stage(
    store: FieldStore, fid: str, stage: str, params: Mapping
) -> dict:
    """Run one analysis stage against the current document revision.

    The artifact id folds in the stage, the revision, and a digest of the
    resolved parameters, so re-running with the same inputs lands on the
    same id with byte-identical files.
    """
    if stage not in _STAGE_FUNCS:
        raise ParamError(
            f"unknown analysis stage {stage!r}; expected one of {ANALYSIS_STAGES}"
        )
    doc = store.get_field(fid)
    field = _field_of(doc)
    resolved, files, summary = _STAGE_FUNCS[stage](store, fid, doc, field, params)
    aid = _artifact_id(stage, doc["revision"], resolved)
    meta = {
        "id": aid,
        "stage": stage,
        "revision": doc["revision"],
        "params": resolved,
        "seq": store.next_sequence(fid),
        "summary": summary,
    }
    recorded = store.record_artifact(fid, meta, files)
    recorded["stale"] = False
    return recorded


# ---------------------------------------------------------------------------
# Exploration
# ---------------------------------------------------------------------------


def explore_counts(
    field: MorphologicalField,
    judgments: list[ConsistencyJudgment],
    pins: list[str],
    cca: bool,
    budget: int,
) -> dict:
    """Exact consistent-configuration counts under pins and pruning.

    ``remaining`` maps every condition id to the count of consistent
    configurations that additionally select it, which is what a pin
    explorer needs to grey out dead options.  Counts are strings so JSON
    consumers never round them.
    """
    total = count_configurations(field)
    if total > budget:
        raise BudgetExceededError(
            f"configuration space holds {total} configurations, above the"
            f" service budget of {budget}; use the command line enumeration"
            " instead"
        )
    pruned = judgments_to_exclusions(field, judgments) if cca else None
    base_sets = [exclusions_for_pins(field, pins)]
    if pruned is not None:
        base_sets.append(pruned)
    consistent = count_consistent_configurations(field, merge_exclusions(*base_sets))

    pinned_dim = {}
    index = field.condition_index()
    for cid in pins:
        pinned_dim[index[cid][0]] = cid
    remaining: dict[str, str] = {}
    for cid in field.condition_ids():
        di = index[cid][0]
        if di in pinned_dim and pinned_dim[di] != cid:
            remaining[cid] = "0"
            continue
        sets = [exclusions_for_pins(field, [*pins, cid])]
        if pruned is not None:
            sets.append(pruned)
        remaining[cid] = str(
            count_consistent_configurations(field, merge_exclusions(*sets))
        )
    return {
        "configurations": str(total),
        "consistent": str(consistent),
        "remaining": remaining,
    }


# ---------------------------------------------------------------------------
# Application factory
# ---------------------------------------------------------------------------


def _preload_bundled(store: FieldStore, extended: bool) -> None:
    field = dataset.bundled_field(extended=extended)
    try:
        store.get_field(field.id)
        return
    except NotFoundError:
        pass
    store.create_field(field_to_dict(field))
    rows = []
    for score in dataset.bundled_scores():
        for axis in AXES:
            value = score.value(axis)
            if value is None:
                continue
            rows.append(
                {
                    "respondent": "panel",
                    "condition": score.condition,
                    "axis": axis,
                    "value": value,
                    "expertise": "aggregate",
                    "track": "",
                }
            )
    store.add_responses(field.id, rows)


def create_app(
    data_dir: str | os.PathLike | None = None,
    budget: int | None = None,
    preload: str | None = None,
) -> FastAPI:
    data_dir = data_dir or os.environ.get("MORPHSPACE_DATA_DIR") or "morphspace-data"
    if budget is None:
        budget = int(os.environ.get("MORPHSPACE_BUDGET", str(DEFAULT_BUDGET)))
    if preload is None:
        preload = os.environ.get("MORPHSPACE_PRELOAD", "")
    store = FieldStore(data_dir)
    if preload:
        if preload not in ("bundled", "bundled-extended"):
            raise ParamError(
                "preload must be 'bundled' or 'bundled-extended'"
            )
        _preload_bundled(store, extended=preload == "bundled-extended")

    app = FastAPI(title="morphspace", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.budget = budget

    @app.exception_handler(MorphspaceError)
    async def _domain_error(request: Request, exc: MorphspaceError):
        status = _STATUS_BY_CODE.get(exc.code, 422)
        return JSONResponse(
            status_code=status,
            content={
                "code": exc.code,
                "message": str(exc),
                "path": request.url.path,
            },
        )

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "invalid-parameter",
                "message": str(exc.errors()[:3]),
                "path": request.url.path,
            },
        )

    prefix = "/api/v1"

    @app.get(prefix + "/fields")
    def list_fields():
        return {"fields": store.list_fields()}

    @app.post(prefix + "/fields", status_code=201)
    def create_field(payload: dict = Body(...)):
        field = field_from_dict(payload)  # full structural validation
        doc = store.create_field(field_to_dict(field))
        return {"id": field.id, "revision": doc["revision"], "field": doc["field"]}

    @app.get(prefix + "/fields/{fid}")
    def get_field(fid: str):
        doc = store.get_field(fid)
        return {
            "id": fid,
            "revision": doc["revision"],
            "field": doc["field"],
            "responses": len(doc["responses"]),
            "judgments": len(doc["judgments"]),
            "artifacts": store.artifact_metas(fid),
        }

    @app.put(prefix + "/fields/{fid}")
    def update_field(fid: str, payload: dict = Body(...)):
        base = payload.get("revision")
        if base is not None and (isinstance(base, bool) or not isinstance(base, int)):
            raise ParamError("revision must be an integer when given")
        body = payload.get("field", payload)
        field = field_from_dict(body)
        doc = store.update_field(fid, field_to_dict(field), base)
        return {"id": fid, "revision": doc["revision"], "field": doc["field"]}

    @app.delete(prefix + "/fields/{fid}")
    def delete_field(fid: str):
        doc = store.delete_field(fid)
        return {"id": fid, "revision": doc["revision"], "deleted": True}

    @app.post(prefix + "/fields/{fid}/responses", status_code=201)
    def add_responses(fid: str, payload: dict = Body(...)):
        doc = store.get_field(fid)
        field = _field_of(doc)
        rows = _validate_response_rows(field, payload.get("responses"))
        doc = store.add_responses(fid, rows)
        return {
            "id": fid,
            "revision": doc["revision"],
            "added": len(rows),
            "responses": len(doc["responses"]),
        }

    @app.get(prefix + "/fields/{fid}/judgments")
    def get_judgments(fid: str):
        doc = store.get_field(fid)
        field = _field_of(doc)
        census, surviving = _judgment_counts(field, doc)
        return {
            "id": fid,
            "revision": doc["revision"],
            "judgments": doc["judgments"],
            "pairs": census,
            "surviving_pairs": surviving,
        }

    @app.put(prefix + "/fields/{fid}/judgments")
    def put_judgments(fid: str, payload: dict = Body(...)):
        doc = store.get_field(fid)
        field = _field_of(doc)
        base = payload.get("revision")
        if base is not None and (isinstance(base, bool) or not isinstance(base, int)):
            raise ParamError("revision must be an integer when given")
        rows = _validate_judgment_rows(field, payload.get("judgments"))
        doc = store.put_judgments(fid, rows, base)
        census, surviving = _judgment_counts(field, doc)
        return {
            "id": fid,
            "revision": doc["revision"],
            "judgments": len(rows),
            "pairs": census,
            "surviving_pairs": surviving,
        }

    @app.get(prefix + "/fields/{fid}/explore")
    def explore(
        fid: str,
        pin: list[str] = Query(default=()),
        cca: bool = Query(default=True),
    ):
        doc = store.get_field(fid)
        field = _field_of(doc)
        judgments = _judgments_of(doc)
        counts = explore_counts(field, judgments, list(pin), cca, app.state.budget)
        census, surviving = _judgment_counts(field, doc)
        return {
            "id": fid,
            "revision": doc["revision"],
            "pins": list(pin),
            "cca": cca,
            "pairs": census,
            "surviving_pairs": surviving,
            **counts,
        }

    @app.post(prefix + "/fields/{fid}/analysis/{stage}", status_code=201)
    def run_stage(fid: str, stage: str, payload: dict | None = Body(default=None)):
        params = payload or {}
        meta = run_analysis_stage(store, fid, stage, params)
        return {"id": fid, "artifact": meta}

    @app.get(prefix + "/fields/{fid}/artifacts/{aid}")
    def get_artifact(fid: str, aid: str):
        meta, files = store.get_artifact(fid, aid)
        return {"id": fid, "artifact": meta, "files": files}

    return app
