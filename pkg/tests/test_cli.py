import csv
import json

import pytest

from reciprec import bundled
from reciprec.cli import main

PROFILES = str(bundled.path("sample_profiles.csv"))
PREFS = str(bundled.path("sample_preferences.csv"))
SIX = str(bundled.path("six_learner_recs.csv"))


def rows(text):
    return list(csv.reader(text.splitlines()))


def test_matrix(capsys):
    assert main(["matrix", "--profiles", PROFILES, "--prefs", PREFS]) == 0
    out = rows(capsys.readouterr().out)
    assert out[0] == ["user_id", "1", "2", "3", "4"]
    assert out[1] == ["1", "x", "0.300000", "0.500000", "0.600000"]
    assert out[3] == ["3", "0.250000", "0.200000", "x", "0.050000"]


def test_matrix_missing_taxonomy(capsys):
    assert main(["matrix", "--profiles", PROFILES, "--prefs", PREFS, "--taxonomy", "no/such.csv"]) == 2
    assert "no/such.csv" in capsys.readouterr().err


def test_matrix_single_learner(tmp_path, capsys, caplog):
    (tmp_path / "p.csv").write_text("id,age,gen,loc,qua,int\n1,30,M,Paris,Masters,ML\n")
    (tmp_path / "q.csv").write_text("id,age,gen,loc,qua,int,priority\n1,x,F,x,x,x,x\n")
    assert main(["matrix", "--profiles", str(tmp_path / "p.csv"), "--prefs", str(tmp_path / "q.csv")]) == 0
    captured = capsys.readouterr()
    assert rows(captured.out) == [["user_id", "1"], ["1", "x"]]
    assert "fewer than two" in caplog.text


def test_bad_profile_file_is_input_error(tmp_path, capsys):
    (tmp_path / "p.csv").write_text("id,age,gen,loc,qua,int\n1,30,M,Paris,PhD,ML\n")
    assert main(["matrix", "--profiles", str(tmp_path / "p.csv"), "--prefs", PREFS]) == 2
    assert "PhD" in capsys.readouterr().err


def test_unknown_interest_is_runtime_error(tmp_path, capsys):
    (tmp_path / "p.csv").write_text("id,age,gen,loc,qua,int\n1,30,M,Paris,Masters,Chess\n2,30,M,Paris,Masters,ML\n")
    (tmp_path / "q.csv").write_text("id,age,gen,loc,qua,int,priority\n1,x,F,x,x,x,x\n2,x,F,x,x,x,x\n")
    assert main(["matrix", "--profiles", str(tmp_path / "p.csv"), "--prefs", str(tmp_path / "q.csv")]) == 1
    assert "Chess" in capsys.readouterr().err


def _lists(text):
    out = {}
    for owner, _, cand, _ in rows(text)[1:]:
        out.setdefault(int(owner), []).append(int(cand))
    return out


def test_recommend(tmp_path, capsys):
    assert main(["recommend", "--profiles", PROFILES, "--prefs", PREFS, "--k", "3"]) == 0
    assert _lists(capsys.readouterr().out)[3] == [2, 4, 1]
    assert main(["recommend", "--profiles", PROFILES, "--prefs", PREFS, "--k", "3", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "recommendations.json").read_text())
    assert [e["candidate_id"] for e in data["3"]] == [2, 4, 1]


def test_recommend_baseline(capsys):
    assert main(["recommend", "--profiles", PROFILES, "--prefs", PREFS, "--k", "3", "--no-reciprocal"]) == 0
    # One-directional order is [4, 2, 1]; learner 3's age priority then lifts learner 2.
    assert _lists(capsys.readouterr().out)[3] == [2, 4, 1]


def test_recommend_k_zero(capsys):
    assert main(["recommend", "--profiles", PROFILES, "--prefs", PREFS, "--k", "0"]) == 2
    assert "--k" in capsys.readouterr().err


def test_evaluate_supplied_lists(tmp_path):
    assert main(["evaluate", "--recs", SIX, "--k", "3", "--out", str(tmp_path)]) == 0
    (row,) = list(csv.DictReader((tmp_path / "summary.csv").open()))
    assert round(float(row["precision"]), 2) == 0.44
    assert round(float(row["recall"]), 2) == 0.40
    assert round(float(row["ndcg"]), 2) == 0.73
    report = json.loads((tmp_path / "report.json").read_text())
    assert report[0]["per_learner"]["3"]["recall"] == 0.75


def test_evaluate_no_successes(tmp_path, capsys):
    (tmp_path / "r.csv").write_text("owner_id,rank,candidate_id\n1,1,2\n2,1,3\n3,1,1\n")
    assert main(["evaluate", "--recs", str(tmp_path / "r.csv")]) == 0
    (row,) = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert all(float(row[c]) == 0 for c in ("precision", "recall", "dcg", "dcg_star", "ndcg"))


def test_generate_then_evaluate_both_models(tmp_path):
    assert main(["generate", "--size", "60", "--seed", "4", "--out", str(tmp_path)]) == 0
    out = tmp_path / "eval"
    args = ["evaluate", "--profiles", str(tmp_path / "profiles.csv"), "--prefs", str(tmp_path / "preferences.csv")]
    assert main(args + ["--k", "5", "10", "--out", str(out)]) == 0
    summary = list(csv.DictReader((out / "summary.csv").open()))
    assert [(r["model"], r["K"]) for r in summary] == [
        ("reciprocal", "5"), ("reciprocal", "10"), ("baseline", "5"), ("baseline", "10"),
    ]


def test_generate_is_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["generate", "--size", "30", "--seed", "9", "--out", str(tmp_path / d)]) == 0
    for name in ("profiles.csv", "preferences.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_generate_config_file(tmp_path):
    (tmp_path / "gen.cfg").write_text("size = 15\nseed = 2\n")
    assert main(["generate", "--config", str(tmp_path / "gen.cfg"), "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "profiles.csv").read_text().splitlines()) == 16
    (tmp_path / "bad.cfg").write_text("size = 1\n")
    assert main(["generate", "--config", str(tmp_path / "bad.cfg"), "--out", str(tmp_path)]) == 2


def test_bench_single_seed_matches_evaluate(tmp_path):
    assert main(["bench", "--size", "80", "--seed", "3", "--k", "5", "10", "--out", str(tmp_path / "b")]) == 0
    bench = list(csv.DictReader((tmp_path / "b" / "bench.csv").open()))
    assert len(bench) == 4
    runs = list(csv.DictReader((tmp_path / "b" / "runs.csv").open()))
    for row, run in zip(bench, runs):
        assert [row[c] for c in row] == [run[c] for c in row]

    assert main(["generate", "--size", "80", "--seed", "3", "--out", str(tmp_path / "g")]) == 0
    args = ["evaluate", "--profiles", str(tmp_path / "g" / "profiles.csv"),
            "--prefs", str(tmp_path / "g" / "preferences.csv"), "--k", "5", "10", "--out", str(tmp_path / "e")]
    assert main(args) == 0
    assert (tmp_path / "e" / "summary.csv").read_text() == (tmp_path / "b" / "bench.csv").read_text()


def test_bench_shape_and_rerun(tmp_path):
    args = ["bench", "--size", "40", "--seed", "1", "2", "--k", "2", "4", "6"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    a = (tmp_path / "a" / "bench.csv").read_text()
    assert a == (tmp_path / "b" / "bench.csv").read_text()
    assert len(a.splitlines()) == 1 + 2 * 3


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
