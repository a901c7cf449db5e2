"""File pipeline: staged runs, manifests, determinism, failure modes."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from morphspace.errors import ParamError, StageError
from morphspace.field import dump_field
from morphspace.pipeline import (
    PipelineConfig,
    run_pipeline,
    stage_cluster,
    stage_pairs,
    stage_network,
    stage_scenarios,
    validate_config,
)
from morphspace.survey import ConditionScore, write_scores_csv

from conftest import make_field


def tiny_inputs(tmp_path):
    field = make_field(
        {"alpha": ["a1", "a2", "a3"], "beta": ["b1", "b2"], "gamma": ["g1", "g2", "g3", "g4"]},
        fid="tiny",
    )
    field_path = tmp_path / "field.json"
    dump_field(field, field_path)
    values = {
        "a1": (0.9, 0.2), "a2": (0.5, 0.5), "a3": (0.1, 0.8),
        "b1": (0.8, 0.4), "b2": (0.3, 0.6),
        "g1": (0.7, 0.7), "g2": (0.6, 0.1), "g3": (0.2, 0.9), "g4": (0.4, 0.3),
    }
    scores = [
        ConditionScore(cid, impact=v[0], likelihood=v[1], n_impact=3, n_likelihood=3)
        for cid, v in values.items()
    ]
    scores_path = tmp_path / "scores.csv"
    write_scores_csv(scores_path, scores)
    return str(field_path), str(scores_path)


def tiny_config(tmp_path, **overrides):
    field, scores = tiny_inputs(tmp_path)
    defaults = dict(
        field=field,
        scores=scores,
        k=2,
        outdir=str(tmp_path / "out"),
    )
    defaults.update(overrides)
    return PipelineConfig(**defaults)


# -- validation ------------------------------------------------------------------


def test_validate_config_rejects_bad_values(tmp_path):
    good = tiny_config(tmp_path)
    validate_config(good)
    import dataclasses

    for bad in (
        {"axis": "sideways"},
        {"mode": "upside-down"},
        {"dimension_threshold": 1.5},
        {"condition_threshold": -0.1},
        {"k": 1},
        {"k": 11},
        {"bins": 0},
        {"field": str(tmp_path / "missing.json")},
        {"scores": str(tmp_path / "missing.csv")},
        {"judgments": str(tmp_path / "missing.csv")},
    ):
        cfg = dataclasses.replace(good, **bad)
        with pytest.raises(ParamError):
            validate_config(cfg)


def test_stage_order_enforced(tmp_path):
    cfg = tiny_config(tmp_path)
    with pytest.raises(ParamError) as err:
        stage_cluster(cfg)
    assert "run the pairs stage first" in str(err.value)


# -- staged runs -------------------------------------------------------------------


def test_stages_compose_to_full_run(tmp_path):
    staged = tiny_config(tmp_path, outdir=str(tmp_path / "staged"))
    stage_pairs(staged)
    stage_network(staged)
    stage_cluster(staged)
    stage_scenarios(staged)

    full = tiny_config(tmp_path, outdir=str(tmp_path / "full"))
    run_pipeline(full)

    staged_dir = Path(staged.outdir)
    full_dir = Path(full.outdir)
    staged_files = sorted(p.name for p in staged_dir.iterdir())
    full_files = sorted(p.name for p in full_dir.iterdir())
    assert set(full_files) - set(staged_files) == {"manifest.json"}
    for name in staged_files:
        assert (staged_dir / name).read_bytes() == (full_dir / name).read_bytes(), name


def test_pairs_stage_summary(tmp_path):
    cfg = tiny_config(tmp_path)
    summary = stage_pairs(cfg)
    assert summary == {
        "census": 26,
        "generated": 26,
        "survivors": 26,
        "skipped_conditions": [],
        "judgments": 0,
    }
    out = Path(cfg.outdir)
    assert (out / "pairs.csv").is_file()
    assert (out / "scores.csv").is_file()
    assert (out / "field.json").is_file()


def test_network_stage_reports_both_levels(tmp_path):
    cfg = tiny_config(tmp_path)
    stats = stage_network(cfg)
    assert set(stats) == {"axis", "dimensions", "conditions"}
    assert stats["dimensions"]["entities"] == 3
    assert stats["conditions"]["entities"] == 9
    assert stats["dimensions"]["threshold"] == 0.6
    assert stats["conditions"]["threshold"] == 0.7
    out = Path(cfg.outdir)
    for level in ("dimensions", "conditions"):
        for suffix in ("csv", "json"):
            assert (out / f"graph_{level}.{suffix}").is_file()
        assert (out / f"matrix_{level}.csv").is_file()
    network = json.loads((out / "network.json").read_text())
    assert set(network["levels"]) == {"dimensions", "conditions"}


def test_manifest_records_inputs_and_outputs(tmp_path):
    cfg = tiny_config(tmp_path)
    manifest = run_pipeline(cfg)
    out = Path(cfg.outdir)

    on_disk = json.loads((out / "manifest.json").read_text())
    assert on_disk == manifest
    assert manifest["config"]["k"] == 2
    assert manifest["field"] == {
        "id": "tiny",
        "title": "tiny",
        "dimensions": 3,
        "conditions": 9,
        "configurations": 24,
    }
    assert set(manifest["stages"]) == {"pairs", "network", "cluster", "scenarios"}

    # inputs are digests of the actual files fed in
    keys = sorted(manifest["inputs"])
    assert keys == [f"field:{cfg.field}", f"scores:{cfg.scores}"]
    import hashlib

    for key in keys:
        path = key.split(":", 1)[1]
        assert manifest["inputs"][key] == hashlib.sha256(Path(path).read_bytes()).hexdigest()

    # outputs cover every file except the manifest itself
    files = {p.name for p in out.iterdir() if p.is_file()}
    assert set(manifest["outputs"]) == files - {"manifest.json"}
    for name, digest in manifest["outputs"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest


def test_judgments_feed_the_whole_run(tmp_path):
    judgments = tmp_path / "judgments.csv"
    judgments.write_text(
        "condition_a,condition_b,verdict,note,author,timestamp\n"
        "a1,b1,inconsistent,,,\n"
    )
    cfg = tiny_config(tmp_path, judgments=str(judgments))
    manifest = run_pipeline(cfg)
    pairs = manifest["stages"]["pairs"]
    assert pairs["generated"] == 26
    assert pairs["survivors"] == 25
    assert pairs["judgments"] == 1
    assert f"judgments:{judgments}" in manifest["inputs"]


def test_run_is_deterministic_across_working_directories(tmp_path):
    field, scores = tiny_inputs(tmp_path)
    cfg_a = PipelineConfig(field=field, scores=scores, k=2, outdir=str(tmp_path / "a"))
    cfg_b = PipelineConfig(field=field, scores=scores, k=2, outdir=str(tmp_path / "b"))
    run_pipeline(cfg_a)
    run_pipeline(cfg_b)
    a_dir, b_dir = Path(cfg_a.outdir), Path(cfg_b.outdir)
    names_a = sorted(p.name for p in a_dir.iterdir())
    assert names_a == sorted(p.name for p in b_dir.iterdir())
    for name in names_a:
        if name == "manifest.json":
            # config records the outdir, which legitimately differs
            doc_a = json.loads((a_dir / name).read_text())
            doc_b = json.loads((b_dir / name).read_text())
            doc_a["config"]["outdir"] = doc_b["config"]["outdir"] = ""
            assert doc_a == doc_b
        else:
            assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes(), name


def test_stage_failures_name_the_stage(tmp_path):
    field, _ = tiny_inputs(tmp_path)
    empty_scores = tmp_path / "empty_scores.csv"
    empty_scores.write_text("condition,impact,likelihood,n_impact,n_likelihood\n")
    cfg = PipelineConfig(
        field=field, scores=str(empty_scores), k=2, outdir=str(tmp_path / "out")
    )
    with pytest.raises(StageError) as err:
        run_pipeline(cfg)
    assert err.value.stage == "network"  # nothing assessed, no profiles to correlate
    assert str(err.value).startswith("stage network:")


def test_extended_census_note_in_manifest(tmp_path):
    cfg = PipelineConfig(field="bundled-extended", outdir=str(tmp_path / "out"))
    summary = stage_pairs(cfg)
    assert summary["census"] == 1119
    assert summary["published_census"] == 1120
    assert "1119" in summary["census_note"]
    assert "1120" in summary["census_note"]
