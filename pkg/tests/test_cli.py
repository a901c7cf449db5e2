"""Command line interface: outputs, exit codes, staged workflows."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from morphspace.cli import main
from morphspace.field import dump_field
from morphspace.survey import ConditionScore, write_scores_csv

from conftest import make_field


def run_cli(capsys, *argv):
    """Invoke main() in-process; normalize SystemExit into a return code."""
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def tiny(tmp_path):
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
    scores_path = tmp_path / "scores.csv"
    write_scores_csv(
        scores_path,
        [
            ConditionScore(cid, impact=v[0], likelihood=v[1], n_impact=3, n_likelihood=3)
            for cid, v in values.items()
        ],
    )
    return str(field_path), str(scores_path)


# -- count ----------------------------------------------------------------------


def test_count_bundled(capsys):
    code, out, err = run_cli(capsys, "count")
    assert (code, err) == (0, "")
    assert out == "15116544\n"


def test_count_extended(capsys):
    code, out, _ = run_cli(capsys, "count", "--field", "bundled-extended")
    assert code == 0
    assert out == "45349632\n"


def test_count_with_pins(capsys):
    code, out, _ = run_cli(capsys, "count", "--pin", "agi", "--pin", "misuse")
    assert code == 0
    assert out == "1259712\n"


def test_count_with_judgments(capsys, tmp_path):
    judgments = tmp_path / "j.csv"
    judgments.write_text(
        "condition_a,condition_b,verdict,note,author,timestamp\n"
        "agi,misuse,inconsistent,,,\n"
    )
    code, out, _ = run_cli(capsys, "count", "--judgments", str(judgments))
    assert code == 0
    assert out == f"{15116544 - 1259712}\n"


def test_count_tiny_field(capsys, tiny):
    field, _ = tiny
    code, out, _ = run_cli(capsys, "count", "--field", field)
    assert code == 0
    assert out == "24\n"


def test_count_unknown_pin_fails(capsys):
    code, out, err = run_cli(capsys, "count", "--pin", "not-a-condition")
    assert code == 2
    assert err.startswith("error:")
    assert out == ""


def test_count_missing_field_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "count", "--field", str(tmp_path / "nope.json"))
    assert code == 2
    assert "field file not found" in err


# -- pairs ----------------------------------------------------------------------


def test_pairs_census(capsys):
    code, out, _ = run_cli(capsys, "pairs")
    assert code == 0
    assert out == "pairs: 981\n"


def test_pairs_extended_census_note(capsys):
    code, out, _ = run_cli(capsys, "pairs", "--field", "bundled-extended")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "pairs: 1119"
    assert "1119" in lines[1] and "1120" in lines[1]


def test_pairs_surviving(capsys, tmp_path):
    judgments = tmp_path / "j.csv"
    judgments.write_text(
        "condition_a,condition_b,verdict,note,author,timestamp\n"
        "agi,misuse,inconsistent,,,\n"
        "misuse,agi,consistent,,,\n"
        "fast-takeoff,misuse,inconsistent,,,\n"
    )
    code, out, _ = run_cli(capsys, "pairs", "--judgments", str(judgments))
    assert code == 0
    # the re-judged (agi, misuse) pair ends consistent; one pair stays pruned
    assert "surviving: 980" in out


def test_pairs_with_out_writes_tables(capsys, tiny, tmp_path):
    field, scores = tiny
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(
        capsys, "pairs", "--field", field, "--scores", scores, "--out", str(out_dir)
    )
    assert code == 0
    assert "pairs: 26" in out
    assert "generated: 26" in out
    assert "survivors: 26" in out
    assert f"wrote {out_dir}/pairs.csv" in out
    assert (out_dir / "pairs.csv").is_file()


# -- network ---------------------------------------------------------------------


def test_network_matrix_mode(capsys, tmp_path):
    matrix = tmp_path / "matrix.csv"
    matrix.write_text(
        "entity,x,y,z\n"
        "x,1.0,0.8,0.1\n"
        "y,0.8,1.0,-0.7\n"
        "z,0.1,-0.7,1.0\n"
    )
    code, out, _ = run_cli(capsys, "network", "--matrix", str(matrix))
    assert code == 0
    assert out == "edges: 2\n"

    code, out, _ = run_cli(
        capsys, "network", "--matrix", str(matrix), "--threshold", "0.75"
    )
    assert out == "edges: 1\n"

    code, out, _ = run_cli(
        capsys, "network", "--matrix", str(matrix), "--mode", "positive"
    )
    assert out == "edges: 1\n"


def test_network_full_stage(capsys, tiny, tmp_path):
    field, scores = tiny
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(
        capsys, "network", "--field", field, "--scores", scores, "--out", str(out_dir)
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("dimensions: 3 entities,")
    assert lines[1].startswith("conditions: 9 entities,")
    assert "threshold 0.6" in lines[0]
    assert "threshold 0.7" in lines[1]
    assert lines[2] == f"wrote {out_dir}/network.json"


def test_network_missing_matrix_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "network", "--matrix", str(tmp_path / "nope.csv"))
    assert code == 2
    assert err.startswith("error:")


def test_bad_axis_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "network", "--axis", "sideways")
    assert code == 2
    assert "invalid choice" in err


# -- staged flow -------------------------------------------------------------------


def test_staged_flow_and_failure_codes(capsys, tiny, tmp_path):
    field, scores = tiny
    out_dir = str(tmp_path / "out")

    # cluster before pairs: a stage failure, not a usage error
    code, _, err = run_cli(
        capsys, "cluster", "--field", field, "--scores", scores,
        "-k", "2", "--out", out_dir,
    )
    assert code == 3
    assert err.startswith("stage cluster:")

    code, *_ = run_cli(
        capsys, "pairs", "--field", field, "--scores", scores, "--out", out_dir
    )
    assert code == 0

    code, out, _ = run_cli(
        capsys, "cluster", "--field", field, "--scores", scores,
        "-k", "2", "--seed", "7", "--out", out_dir,
    )
    assert code == 0
    assert "k: 2 seed: 7" in out
    assert "inertia:" in out

    code, out, _ = run_cli(
        capsys, "scenarios", "--field", field, "--scores", scores,
        "-k", "2", "--out", out_dir,
    )
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith("scenario-")]
    assert len(lines) == 2
    assert all("impact 0." in l and "likelihood 0." in l for l in lines)


# -- run ---------------------------------------------------------------------------


def test_run_bundled_summary(capsys, tmp_path):
    out_dir = str(tmp_path / "out")
    code, out, err = run_cli(capsys, "run", "--out", out_dir)
    assert (code, err) == (0, "")
    lines = out.splitlines()
    assert lines[0] == "field: ai-risk (14 dimensions)"
    assert lines[1] == "configurations: 15116544"
    assert lines[2] == "pairs: 981"
    assert lines[3] == "cluster sizes: 197 269 222 293"
    assert lines[4] == "scenario-1: impact 0.3014 likelihood 0.4914"
    assert lines[5] == "scenario-2: impact 0.4679 likelihood 0.6550"
    assert lines[6] == "scenario-3: impact 0.5707 likelihood 0.4271"
    assert lines[7] == "scenario-4: impact 0.7671 likelihood 0.5257"
    assert lines[8] == f"wrote {out_dir}/manifest.json"
    manifest = json.loads((Path(out_dir) / "manifest.json").read_text())
    assert manifest["stages"]["cluster"]["inertia"] == pytest.approx(8.522173642)


def test_run_invalid_k(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", "-k", "1", "--out", str(tmp_path / "o"))
    assert code == 2
    assert "k=1" in err


def test_unknown_subcommand(capsys):
    code, _, err = run_cli(capsys, "frobnicate")
    assert code == 2
    assert "invalid choice" in err


def test_no_subcommand(capsys):
    code, _, err = run_cli(capsys)
    assert code == 2
