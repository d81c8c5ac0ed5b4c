import csv
import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import random_video, static_video, write_frames, write_jsonl
from scmine.cli import run_cli


@pytest.fixture
def video_set(tmp_path):
    rng = np.random.default_rng(3)
    rows = []
    for n in range(3):
        write_frames(tmp_path / f"dev{n}", static_video(rng, 5, 12))
        rows.append({"id": f"dev{n}", "kind": "dev-screencast", "frame_dir": f"dev{n}",
                     "title": f"Tutorial {n}", "transcript_path": None})
    for n in range(4):
        write_frames(tmp_path / f"oth{n}", random_video(rng, 5, 12))
        rows.append({"id": f"oth{n}", "kind": "other", "frame_dir": f"oth{n}", "title": "", "transcript_path": None})
    return write_jsonl(tmp_path / "m.jsonl", rows)


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_detect_csv(tmp_path, video_set, capsys):
    out = tmp_path / "ranks.csv"
    code = run_cli(["detect", "--manifest", str(video_set), "--algorithm", "cosine",
                    "--interval", "10", "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 7
    assert [r["rank"] for r in rows] == [str(n) for n in range(1, 8)]
    assert {r["video_id"] for r in rows[:3]} == {"dev0", "dev1", "dev2"}
    header = out.read_text().splitlines()[0]
    assert header.startswith("# config: ")
    cfg = json.loads(header[len("# config: "):])
    assert cfg["interval"] == 10.0 and cfg["algorithm"] == "cosine" and cfg["seed"] == 0
    assert "detect" in capsys.readouterr().out


@pytest.mark.parametrize("algorithm", ["jaccard", "lsi"])
def test_detect_json(tmp_path, video_set, algorithm):
    out = tmp_path / "ranks.json"
    assert run_cli(["detect", "--manifest", str(video_set), "--algorithm", algorithm,
                    "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["ranking"]) == 7 and data["config"]["algorithm"] == algorithm
    assert all(r["pair_count"] == 4 for r in data["ranking"])


def test_detect_workers_same_output(tmp_path, video_set, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(["detect", "--manifest", str(video_set), "--out", str(a)]) == 0
    monkeypatch.setenv("SCMINE_WORKERS", "3")
    assert run_cli(["detect", "--manifest", str(video_set), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.filterwarnings("ignore:k=20 exceeds")
def test_eval_detect(tmp_path, video_set):
    ranks = tmp_path / "ranks.csv"
    run_cli(["detect", "--manifest", str(video_set), "--out", str(ranks)])
    out = tmp_path / "eval.json"
    assert run_cli(["eval-detect", "--ranking", str(ranks), "--manifest", str(video_set),
                    "--ks", "3,20", "--out", str(out)]) == 0
    ev = {row["requested_k"]: row for row in json.loads(out.read_text())["evaluation"]}
    assert ev[3]["recall"] == 1.0 and ev[3]["precision"] == 1.0
    assert ev[20]["k_clamped"] and ev[20]["k"] == 7


@pytest.fixture
def topic_corpus(tmp_path):
    rng = np.random.default_rng(0)
    db = ["mysql", "database", "table", "query", "sql", "row", "column"]
    ui = ["dialog", "button", "window", "swing", "frame", "panel", "label"]
    rows = []
    for n in range(30):
        words = rng.choice(db if n % 2 else ui, size=12)
        rows.append({"id": f"t{n:02d}", "text": "Java how to " + " ".join(words) + " 2017"})
    return write_jsonl(tmp_path / "c.jsonl", rows)


def test_topics_deterministic(tmp_path, topic_corpus):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["topics", "--corpus", str(topic_corpus), "--kmax", "4", "--seed", "7", "--iterations", "100",
            "--beta", "1.0"]
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["config"]["seed"] == 7
    assert data["model"]["K"] >= 2
    terms = {t["term"] for topic in data["model"]["topics"] for t in topic["terms"]}
    assert "java" not in terms and "how" not in terms
    assert {"x", "y", "radius"} <= set(data["model"]["topics"][0])


def test_topics_fixed_k(tmp_path, topic_corpus):
    out = tmp_path / "t.json"
    assert run_cli(["topics", "--corpus", str(topic_corpus), "--k", "1", "--iterations", "5",
                    "--nouns-only", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["model"]["K"] == 1 and data["tuning"]["mode"] == "fixed"


@pytest.fixture
def link_inputs(tmp_path, api_docs_dir):
    tdir = tmp_path / "transcripts"
    tdir.mkdir()
    (tdir / "s1.vtt").write_text("WEBVTT\n\n1\n00:00:00.000 --> 00:00:03.000\n"
                                 "we create an ArrayList and check contains on the ArrayList\n")
    (tdir / "s2.txt").write_text("open a database connection and run sql statements, then show a dialog box")
    judg = write_jsonl(tmp_path / "j.jsonl", [
        {"screencast_id": "s1", "relevant_doc_ids": ["java/util/ArrayList"]},
        {"screencast_id": "s2", "relevant_doc_ids": ["java/sql/Connection", "javax/swing/JOptionPane"]},
    ])
    return api_docs_dir, tdir, judg


def test_link(tmp_path, link_inputs):
    docs, tdir, _ = link_inputs
    out = tmp_path / "link.json"
    assert run_cli(["link", "--docs", str(docs), "--transcript", str(tdir / "s1.vtt"), "--top", "3",
                    "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["ranking"]) == 3
    assert data["ranking"][0]["doc_id"] == "java/util/ArrayList"
    assert data["tau"] == 0.12 and data["config"]["tau"] == 0.12


def test_link_stdout(link_inputs, capsys):
    docs, tdir, _ = link_inputs
    assert run_cli(["link", "--docs", str(docs), "--transcript", str(tdir / "s2.txt")]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["ranking"]) == 5


def test_eval_link(tmp_path, link_inputs):
    docs, tdir, judg = link_inputs
    out, ranks = tmp_path / "e.json", tmp_path / "r.csv"
    args = ["eval-link", "--docs", str(docs), "--transcripts", str(tdir), "--judgments", str(judg),
            "--out", str(out), "--rankings-csv", str(ranks)]
    assert run_cli(args) == 0
    data = json.loads(out.read_text())
    assert [r["k"] for r in data["table"]] == [3, 5, 10, 20]
    assert data["table"][0]["retrieved"].endswith("/3")
    thr = data["threshold"]
    assert thr["tau"] == 0.12
    assert thr["fraction_all_below_exact"].count("/") == 1
    assert len(read_csv(ranks)) == 10

    out2, ranks2 = tmp_path / "e2.json", tmp_path / "r2.csv"
    assert run_cli(args[:-4] + ["--out", str(out2), "--rankings-csv", str(ranks2)]) == 0
    assert out.read_bytes() == out2.read_bytes() and ranks.read_bytes() == ranks2.read_bytes()


def test_unknown_command(capsys):
    assert run_cli(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_no_command():
    assert run_cli([]) == 2


@pytest.mark.parametrize("argv", [
    ["detect", "--manifest", "m.jsonl", "--interval", "0"],
    ["detect", "--manifest", "m.jsonl", "--bits", "9"],
    ["detect", "--manifest", "m.jsonl", "--algorithm", "euclid"],
    ["topics", "--corpus", "c.jsonl", "--lambda", "2"],
    ["eval-link", "--docs", "d", "--transcripts", "t", "--judgments", "j", "--ks", "0,3"],
])
def test_bad_arguments_exit_2(argv):
    assert run_cli(argv) == 2


def test_missing_files_exit_1(tmp_path):
    assert run_cli(["detect", "--manifest", str(tmp_path / "nope.jsonl")]) == 1
    assert run_cli(["link", "--docs", str(tmp_path / "nodocs"), "--transcript", str(tmp_path / "t.txt")]) == 1


def test_unreadable_frame_exit_1(tmp_path, video_set):
    (tmp_path / "dev0" / "10.ppm").write_bytes(b"junk")
    assert run_cli(["detect", "--manifest", str(video_set), "--out", str(tmp_path / "o.csv")]) == 1


def test_insufficient_frames_exit_2(tmp_path):
    write_frames(tmp_path / "v", [np.zeros((2, 2, 3), dtype=np.uint8)])
    m = write_jsonl(tmp_path / "m.jsonl", [{"id": "v", "kind": "other", "frame_dir": "v"}])
    assert run_cli(["detect", "--manifest", str(m)]) == 2


@settings(max_examples=60, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(garbage=st.one_of(
    st.text(max_size=60),
    st.builds(json.dumps, st.dictionaries(st.sampled_from(["id", "kind", "frame_dir", "x"]),
                                          st.one_of(st.integers(), st.text(max_size=5), st.none()))),
))
def test_malformed_manifest_exit_codes(tmp_path, garbage):
    m = tmp_path / "m.jsonl"
    m.write_text(garbage + "\n", encoding="utf-8")
    code = run_cli(["detect", "--manifest", str(m), "--out", str(tmp_path / "o.csv")])
    if garbage.strip():
        assert code == 2
    else:
        assert code in (0, 2)


@settings(max_examples=40, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(garbage=st.text(max_size=60))
def test_malformed_judgments_exit_codes(tmp_path, garbage, link_inputs):
    docs, tdir, _ = link_inputs
    j = tmp_path / "bad.jsonl"
    j.write_text(garbage + "\n", encoding="utf-8")
    code = run_cli(["eval-link", "--docs", str(docs), "--transcripts", str(tdir), "--judgments", str(j),
                    "--out", str(tmp_path / "e.json")])
    assert code in (1, 2)


def test_non_utf8_input_exit_1(tmp_path):
    m = tmp_path / "m.jsonl"
    m.write_bytes(b"\xff\xfe\x00garbage")
    assert run_cli(["detect", "--manifest", str(m)]) == 1
