"""Command-line surface: formats, exit codes, determinism, config errors."""

from __future__ import annotations

import csv
import io
import json

from boundforge import selector
from boundforge.cli import main


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_single_bound_json(capsys):
    code, out, _ = run(capsys, ["verify", "--bound", "P-S-UB", "--n", "8", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["violations_total"] == 0
    (report,) = payload["reports"]
    assert report["bound"] == "P-S-UB"
    assert report["instances"] == 22
    assert report["violations"] == 0


def test_verify_range_and_csv(capsys):
    code, out, _ = run(capsys, ["verify", "--object", "partition", "--n", "1..5", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3 * 5
    assert set(rows[0]) == {"bound", "n", "instances", "violations", "witnesses", "min_slack"}
    assert all(r["violations"] == "0" for r in rows)


def test_verify_binseq_full_catalog_range(capsys):
    code, out, _ = run(capsys, ["verify", "--object", "binseq", "--n", "1..12", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 17 * 12
    assert all(r["violations"] == "0" for r in rows)


def test_verify_unknown_bound_is_usage_error(capsys):
    code, _, err = run(capsys, ["verify", "--bound", "NOPE"])
    assert code == 2
    assert "unknown bound" in err


def test_bad_n_specification_is_usage_error(capsys):
    code, _, err = run(capsys, ["verify", "--object", "partition", "--n", "five"])
    assert code == 2


def test_select_default_catalog_json(capsys):
    code, out, _ = run(capsys, ["select", "--object", "partition", "--n", "5"])
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"selected", "posts", "labelings", "wall_ms"}
    assert payload["selected"]
    assert payload["wall_ms"] == 0  # deterministic output unless --timing


def test_select_shuffle_seed_is_byte_deterministic(capsys):
    argv = ["select", "--object", "binseq", "--n", "6", "--shuffle-seed", "7"]
    code1, out1, _ = run(capsys, argv)
    code2, out2, _ = run(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_select_candidate_file_with_comments_duplicates_decoys(tmp_path, capsys):
    listing = tmp_path / "cands.txt"
    listing.write_text(
        "# comment line\n"
        "P-S-UB\n"
        "P-S-UB  # duplicate is fine\n"
        "decoy:S\n"
        "P-RANGE-UB1\n"
    )
    code, out, _ = run(
        capsys,
        ["select", "--object", "partition", "--n", "4", "--candidates", str(listing)],
    )
    assert code == 0
    payload = json.loads(out)
    assert "decoy:S" not in payload["selected"]


def test_select_empty_candidate_file(tmp_path, capsys):
    listing = tmp_path / "empty.txt"
    listing.write_text("# nothing here\n")
    code, out, _ = run(
        capsys,
        ["select", "--object", "partition", "--n", "4", "--candidates", str(listing)],
    )
    assert code == 0
    assert json.loads(out)["selected"] == []


def test_select_wrong_object_in_candidate_file(tmp_path, capsys):
    listing = tmp_path / "cands.txt"
    listing.write_text("B-GS-LB1\n")
    code, _, err = run(
        capsys,
        ["select", "--object", "partition", "--n", "4", "--candidates", str(listing)],
    )
    assert code == 2


def test_compare_identical_exit_zero(capsys):
    code, out, _ = run(capsys, ["compare", "--object", "partition", "--n", "4"])
    assert code == 0
    payload = json.loads(out)
    assert payload["identical"] is True
    assert payload["incremental"]["selected"] == payload["baseline"]["selected"]
    assert payload["baseline"]["posts"] >= payload["incremental"]["posts"]


def test_compare_mutant_selector_exit_one(monkeypatch, capsys):
    real = selector.selection

    def mutant(scenario, cands):
        report = real(scenario, cands)
        return selector.SelectionReport(
            report.selected[:-1], report.posts, report.labelings, report.wall_ms
        )

    monkeypatch.setattr(selector, "selection", mutant)
    code, out, _ = run(capsys, ["compare", "--object", "partition", "--n", "4"])
    assert code == 1
    assert json.loads(out)["identical"] is False


def test_solutions_table_binseq_n3(capsys):
    code, out, _ = run(capsys, ["solutions", "--object", "binseq", "--n", "3"])
    assert code == 0
    payload = json.loads(out)
    rows = payload["lex_order"]
    assert len(rows) == 6  # 5 feature tuples plus the sentinel row
    assert rows[-1]["sol"] == ""
    assert payload["nback_dominated_with_bounds"] in (True, False)
    assert sorted(payload["sorted_by_nback_with_bounds"]) == [r["isol"] for r in rows]


def test_solutions_text_format(capsys):
    code, out, _ = run(capsys, ["solutions", "--object", "binseq", "--n", "3", "--format", "text"])
    assert code == 0
    assert "dominated with bounds:" in out


def test_explain_text_and_json(capsys):
    code, out, _ = run(capsys, ["explain", "B-DS-LB3"])
    assert code == 0
    assert "DS >= rhs(Dmax)" in out
    code, out, _ = run(capsys, ["explain", "P-S-UB", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    assert payload["target"] == "S"
    assert payload["inputs"] == ["P", "Mmin", "Mmax", "rangeM"]


def test_explain_unknown_bound(capsys):
    code, _, err = run(capsys, ["explain", "B-NOPE"])
    assert code == 2


def test_max_n_cap_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("BOUNDFORGE_MAX_N", "3")
    code, _, err = run(capsys, ["select", "--object", "binseq", "--n", "5"])
    assert code == 2
    assert "exceeds the cap" in err
    monkeypatch.setenv("BOUNDFORGE_MAX_N", "5")
    code, out, _ = run(capsys, ["select", "--object", "binseq", "--n", "5"])
    assert code == 0


def test_out_writes_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(
        capsys, ["select", "--object", "partition", "--n", "4", "--out", str(target)]
    )
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["selected"]
