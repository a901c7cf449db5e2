"""Command line front end for counting, analysis stages and the server.

Exit codes: 0 on success, 2 for invalid arguments or inputs, 3 when a
stage fails after its configuration validated.  Stage diagnostics go to
stderr prefixed with the stage name so scripts can tell the two apart.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .errors import MorphspaceError, StageError
from .field import (
    count_configurations,
    count_consistent_configurations,
    count_cross_dimension_pairs,
    exclusions_for_pins,
    merge_exclusions,
)
from .graphs import GRAPH_MODES, PROFILE_AXES, build_graph, read_matrix_csv
from .pairs import canonical_pair, judgments_to_exclusions, read_judgments_csv
from .pipeline import (
    PUBLISHED_EXTENDED_CENSUS,
    PipelineConfig,
    resolve_field,
    run_pipeline,
    stage_cluster,
    stage_network,
    stage_pairs,
    stage_scenarios,
    validate_config,
)

_DEFAULTS = PipelineConfig()


def _add_input_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--field",
        default=_DEFAULTS.field,
        help="'bundled', 'bundled-extended', or a field JSON path",
    )
    p.add_argument(
        "--scores",
        default=_DEFAULTS.scores,
        help="'bundled' or an aggregated scores CSV path",
    )
    p.add_argument("--responses", default=None, help="raw survey responses CSV")
    p.add_argument(
        "--scales", default=None, help="rating scale JSON used with --responses"
    )
    p.add_argument("--judgments", default=None, help="pair judgment log CSV")


def _add_analysis_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--axis", default=_DEFAULTS.axis, choices=PROFILE_AXES)
    p.add_argument("--mode", default=_DEFAULTS.mode, choices=GRAPH_MODES)
    p.add_argument(
        "--dimension-threshold", type=float, default=_DEFAULTS.dimension_threshold
    )
    p.add_argument(
        "--condition-threshold", type=float, default=_DEFAULTS.condition_threshold
    )
    p.add_argument("-k", dest="k", type=int, default=_DEFAULTS.k)
    p.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    p.add_argument("--max-iter", type=int, default=_DEFAULTS.max_iter)
    p.add_argument("--tol", type=float, default=_DEFAULTS.tol)
    p.add_argument("--bins", type=int, default=_DEFAULTS.bins)


def _config(args: argparse.Namespace, outdir: str | None = None) -> PipelineConfig:
    return PipelineConfig(
        field=getattr(args, "field", _DEFAULTS.field),
        scores=getattr(args, "scores", _DEFAULTS.scores),
        responses=getattr(args, "responses", None),
        scales=getattr(args, "scales", None),
        judgments=getattr(args, "judgments", None),
        axis=getattr(args, "axis", _DEFAULTS.axis),
        mode=getattr(args, "mode", _DEFAULTS.mode),
        dimension_threshold=getattr(
            args, "dimension_threshold", _DEFAULTS.dimension_threshold
        ),
        condition_threshold=getattr(
            args, "condition_threshold", _DEFAULTS.condition_threshold
        ),
        k=getattr(args, "k", _DEFAULTS.k),
        seed=getattr(args, "seed", _DEFAULTS.seed),
        max_iter=getattr(args, "max_iter", _DEFAULTS.max_iter),
        tol=getattr(args, "tol", _DEFAULTS.tol),
        bins=getattr(args, "bins", _DEFAULTS.bins),
        outdir=outdir if outdir is not None else getattr(args, "out", _DEFAULTS.outdir),
    )


def _invalid(exc: Exception) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return 2


def _run_stage(name: str, fn):
    try:
        return fn()
    except (MorphspaceError, OSError) as exc:
        print(f"stage {name}: {exc}", file=sys.stderr)
        raise SystemExit(3)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_count(args: argparse.Namespace) -> int:
    cfg = _config(args)
    try:
        field = resolve_field(cfg)
        sets = []
        if args.judgments:
            judgments = read_judgments_csv(args.judgments)
            sets.append(judgments_to_exclusions(field, judgments))
        if args.pin:
            sets.append(exclusions_for_pins(field, args.pin))
        if sets:
            n = count_consistent_configurations(field, merge_exclusions(*sets))
        else:
            n = count_configurations(field)
    except (MorphspaceError, OSError) as exc:
        return _invalid(exc)
    print(n)
    return 0


def cmd_pairs(args: argparse.Namespace) -> int:
    cfg = _config(args, outdir=args.out or _DEFAULTS.outdir)
    try:
        validate_config(cfg)
        field = resolve_field(cfg)
    except (MorphspaceError, OSError) as exc:
        return _invalid(exc)
    census = count_cross_dimension_pairs(field)
    print(f"pairs: {census}")
    if cfg.field == "bundled-extended":
        print(
            f"note: computed census {census} differs from previously"
            f" published census {PUBLISHED_EXTENDED_CENSUS}"
        )
    if args.judgments:
        try:
            judgments = read_judgments_csv(args.judgments)
            final: dict[tuple[str, str], str] = {}
            for j in judgments:
                final[canonical_pair(field, j.a, j.b)] = j.verdict.strip().casefold()
            pruned = sum(1 for v in final.values() if v == "inconsistent")
        except (MorphspaceError, OSError) as exc:
            return _invalid(exc)
        print(f"surviving: {census - pruned}")
    if args.out:
        summary = _run_stage("pairs", lambda: stage_pairs(cfg))
        print(f"generated: {summary['generated']}")
        print(f"survivors: {summary['survivors']}")
        if summary["skipped_conditions"]:
            print(f"skipped: {', '.join(summary['skipped_conditions'])}")
        print(f"wrote {args.out}/pairs.csv")
    return 0


def cmd_network(args: argparse.Namespace) -> int:
    if args.matrix:
        try:
            matrix = read_matrix_csv(args.matrix)
            graph = build_graph(matrix, args.threshold, args.mode)
        except (MorphspaceError, OSError) as exc:
            return _invalid(exc)
        print(f"edges: {len(graph.edges)}")
        return 0
    cfg = _config(args)
    try:
        validate_config(cfg)
    except (MorphspaceError, OSError) as exc:
        return _invalid(exc)
    stats = _run_stage("network", lambda: stage_network(cfg))
    for level in ("dimensions", "conditions"):
        s = stats[level]
        print(
            f"{level}: {s['entities']} entities, {s['edges']} edges"
            f" at threshold {s['threshold']},"
            f" {s['communities']} communities (Q={s['modularity']})"
        )
    print(f"wrote {cfg.outdir}/network.json")
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    cfg = _config(args)
    try:
        validate_config(cfg)
    except (MorphspaceError, OSError) as exc:
        return _invalid(exc)
    summary = _run_stage("cluster", lambda: stage_cluster(cfg))
    print(f"k: {summary['k']} seed: {summary['seed']}")
    print(f"sizes: {' '.join(str(s) for s in summary['sizes'])}")
    print(f"inertia: {summary['inertia']} after {summary['iterations']} iterations")
    print(f"wrote {cfg.outdir}/clusters.csv")
    return 0


def cmd_scenarios(args: argparse.Namespace) -> int:
    cfg = _config(args)
    try:
        validate_config(cfg)
    except (MorphspaceError, OSError) as exc:
        return _invalid(exc)
    summary = _run_stage("scenarios", lambda: stage_scenarios(cfg))
    for s in summary["scenarios"]:
        print(
            f"{s['name']}: impact {s['impact']:.4f}"
            f" likelihood {s['likelihood']:.4f}"
        )
    concordance = summary.get("scorecard_concordance")
    if concordance:
        print(
            f"scorecard concordance: {concordance['matched']}/{concordance['cells']}"
            " cells agree"
        )
    print(f"wrote {cfg.outdir}/summary.txt")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _config(args)
    try:
        manifest = run_pipeline(cfg)
    except StageError as exc:
        print(str(exc), file=sys.stderr)
        return 3
    except (MorphspaceError, OSError) as exc:
        return _invalid(exc)
    field = manifest["field"]
    print(f"field: {field['id']} ({field['dimensions']} dimensions)")
    print(f"configurations: {field['configurations']}")
    print(f"pairs: {manifest['stages']['pairs']['census']}")
    sizes = manifest["stages"]["cluster"]["sizes"]
    print(f"cluster sizes: {' '.join(str(s) for s in sizes)}")
    for s in manifest["stages"]["scenarios"]["scenarios"]:
        print(
            f"{s['name']}: impact {s['impact']:.4f}"
            f" likelihood {s['likelihood']:.4f}"
        )
    print(f"wrote {cfg.outdir}/manifest.json")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        import uvicorn

        from .service import create_app

        app = create_app(
            data_dir=args.data_dir, budget=args.budget, preload=args.preload
        )
    except (MorphspaceError, OSError) as exc:
        return _invalid(exc)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphspace",
        description="Morphological field analysis: counting, pair pruning,"
        " correlation networks, clustering and scenario reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count configurations (optionally pinned)")
    p.add_argument(
        "--field",
        default=_DEFAULTS.field,
        help="'bundled', 'bundled-extended', or a field JSON path",
    )
    p.add_argument(
        "--pin",
        action="append",
        default=[],
        metavar="CONDITION",
        help="keep only configurations selecting this condition (repeatable)",
    )
    p.add_argument("--judgments", default=None, help="pair judgment log CSV")
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser("pairs", help="pair census; write tables with --out")
    _add_input_options(p)
    p.add_argument("--out", default=None, help="write field/scores/pairs files here")
    p.set_defaults(handler=cmd_pairs)

    p = sub.add_parser("network", help="correlation graphs at both levels")
    _add_input_options(p)
    _add_analysis_options(p)
    p.add_argument("--out", default=_DEFAULTS.outdir)
    p.add_argument(
        "--matrix",
        default=None,
        help="threshold a stored correlation matrix CSV instead of running"
        " the full stage",
    )
    p.add_argument(
        "--threshold",
        type=float,
        default=0.6,
        help="edge threshold used with --matrix",
    )
    p.set_defaults(handler=cmd_network)

    p = sub.add_parser("cluster", help="cluster the pair table in --out")
    _add_input_options(p)
    _add_analysis_options(p)
    p.add_argument("--out", default=_DEFAULTS.outdir)
    p.set_defaults(handler=cmd_cluster)

    p = sub.add_parser("scenarios", help="assemble scenario reports in --out")
    _add_input_options(p)
    _add_analysis_options(p)
    p.add_argument("--out", default=_DEFAULTS.outdir)
    p.set_defaults(handler=cmd_scenarios)

    p = sub.add_parser("run", help="run every stage and write a manifest")
    _add_input_options(p)
    _add_analysis_options(p)
    p.add_argument("--out", default=_DEFAULTS.outdir)
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("serve", help="start the HTTP workbench API")
    p.add_argument("--host", default=os.environ.get("MORPHSPACE_HOST", "127.0.0.1"))
    p.add_argument(
        "--port", type=int, default=int(os.environ.get("MORPHSPACE_PORT", "8000"))
    )
    p.add_argument("--data-dir", default=None, help="document store directory")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument(
        "--preload",
        default=None,
        choices=("bundled", "bundled-extended"),
        help="seed the store with the packaged dataset",
    )
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
