from __future__ import annotations

import csv
import hashlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

from helpers import FIXTURES
from slidesynth.cli import demo_concepts_path, main
from slidesynth.concepts import load_concepts
from slidesynth.ldl import parse_text
from slidesynth.sir import from_json


def tree_hash(root: Path) -> str:
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(p.relative_to(root).as_posix().encode() + b"\0" + p.read_bytes() + b"\0")
    return h.hexdigest()


@pytest.fixture(scope="module")
def pipeline_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("pipe")
    assert main(["pipeline", "--out", str(out), "--seed", "7"]) == 0
    return out


class TestLdl:
    def test_validate_good(self, capsys):
        assert main(["ldl", "validate", str(FIXTURES / "two_column.ldl")]) == 0
        assert json.loads(capsys.readouterr().out)["violations"] == []

    def test_validate_bad(self, tmp_path, capsys):
        bad = tmp_path / "bad.ldl"
        bad.write_text("<SOS> ELEM_TITLE <EOS>\n")
        assert main(["ldl", "validate", str(bad)]) == 2
        assert json.loads(capsys.readouterr().out)["violations"]

    def test_format_roundtrip(self, tmp_path):
        out = tmp_path / "f.ldl"
        assert main(["ldl", "format", str(FIXTURES / "infographic.ldl"), "--out", str(out)]) == 0
        assert parse_text(out.read_text()) == parse_text((FIXTURES / "infographic.ldl").read_text())


class TestErrors:
    def test_json_report(self, tmp_path, capsys):
        bad = tmp_path / "bad.sir.json"
        bad.write_text('{"slide_type": "SLIDE_BLANK", "elements": [{"id": "a"}]}')
        assert main(["--json", "render", str(bad), "--out", str(tmp_path)]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["exit_code"] == 2 and err["error"] and err["message"]

    def test_runtime_error(self, tmp_path, capsys):
        assert main(["--json", "render", str(tmp_path / "missing.sir.json"), "--out", str(tmp_path)]) == 3
        assert json.loads(capsys.readouterr().err)["error"] == "FileNotFoundError"

    def test_plain_report(self, tmp_path, capsys):
        bad = tmp_path / "c.json"
        bad.write_text("[{")
        assert main(["generate", "--concepts", str(bad), "--out", str(tmp_path)]) == 2
        assert capsys.readouterr().err.startswith("slidesynth: ")

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == 2


class TestStages:
    def test_parse_and_cluster(self, tmp_path):
        doc = tmp_path / "d.md"
        doc.write_text("# Title\n\nBody one.\n\n![chart](c.png)\n")
        assert main(["parse", str(doc), "--out", str(tmp_path)]) == 0
        units = (tmp_path / "units.jsonl").read_text().splitlines()
        assert len(units) == 3
        assert "doc_img_001" in json.loads((tmp_path / "visual_map.json").read_text())
        emb = tmp_path / "e.json"
        emb.write_text(json.dumps([[1, 0], [1, 0.01], [0, 1]]))
        assert main(["cluster", str(tmp_path / "units.jsonl"), "--embeddings", str(emb), "--out", str(tmp_path / "c.json")]) == 0
        labels = json.loads((tmp_path / "c.json").read_text())
        assert list(labels.values()) == [0, 0, -1]

    def test_cluster_count_mismatch(self, tmp_path):
        (tmp_path / "u.jsonl").write_text(json.dumps({"unit_id": "doc_unit_001", "text_content": "x", "unit_type": "paragraph"}) + "\n")
        (tmp_path / "e.json").write_text("[[1, 0], [0, 1]]")
        assert main(["cluster", str(tmp_path / "u.jsonl"), "--embeddings", str(tmp_path / "e.json"), "--out", str(tmp_path / "c.json")]) == 2

    def test_generate_instantiate_refine_render(self, tmp_path):
        assert main(["generate", "--out", str(tmp_path)]) == 0
        ldl = tmp_path / "slide_002.ldl"
        assert ldl.exists()
        sir = tmp_path / "slide_002.sir.json"
        assert main(["instantiate", str(ldl), "--concepts", str(demo_concepts_path()), "--index", "2", "--out", str(sir)]) == 0
        refined = tmp_path / "refined"
        assert main(["refine", str(sir), "--slide", "2", "--k", "3", "--out", str(refined)]) == 0
        assert (refined / "trace.csv").exists() and (refined / "critique_002_t0.json").exists()
        assert main(["render", str(refined / "slide_002.sir.json"), "--out", str(refined)]) == 0
        assert (refined / "slide_002.svg").read_text().startswith("<svg")

    def test_score_columns(self, pipeline_out, tmp_path):
        out = tmp_path / "p.csv"
        assert main(["score", "--deck", str(pipeline_out), "--out", str(out)]) == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["deck", "content", "coherence", "design", "aggregate"]
        assert all(0 < float(v) < 1 for v in rows[1][1:])

    def test_train_commands(self, tmp_path):
        assert main(["train-preval", "--synthetic", "40", "--steps", "20", "--out", str(tmp_path / "pv.json")]) == 0
        model = json.loads((tmp_path / "pv.json").read_text())
        assert set(model["dimensions"]) == {"content", "coherence", "design"}
        assert main(["score", "--deck", str(tmp_path), "--model", str(tmp_path / "pv.json")]) == 2  # no slides
        assert main(["train-lpg", "--corpus", str(FIXTURES / "toy_lpg.jsonl"), "--steps", "2", "--out", str(tmp_path / "lpg.json")]) == 0
        assert (tmp_path / "lpg.json").stat().st_size > 0

    def test_trace(self, tmp_path):
        out = tmp_path / "qc.csv"
        assert main(["trace", "--n", "4", "--max-k", "2", "--seed", "1", "--out", str(out)]) == 0
        rows = list(csv.reader(out.open()))
        assert len(rows) == 4 and rows[0][0] == "K"


class TestPipeline:
    def test_outputs(self, pipeline_out):
        names = {p.name for p in pipeline_out.iterdir()}
        n = len(load_concepts(demo_concepts_path()))
        assert n == 5
        for i in range(1, n + 1):
            assert {f"slide_{i:03d}.ldl", f"slide_{i:03d}.sir.json", f"slide_{i:03d}.svg", f"critique_{i:03d}_t0.json"} <= names
        assert {"trace.csv", "profile.csv", "deck.html"} <= names
        from_json((pipeline_out / "slide_001.sir.json").read_bytes())

    def test_byte_identical_reruns(self, pipeline_out, tmp_path):
        again = tmp_path / "again"
        assert main(["pipeline", "--out", str(again), "--seed", "7"]) == 0
        assert tree_hash(again) == tree_hash(pipeline_out)

    def test_workers_do_not_change_output(self, pipeline_out, tmp_path):
        par = tmp_path / "par"
        assert main(["pipeline", "--out", str(par), "--seed", "7", "--workers", "4"]) == 0
        assert tree_hash(par) == tree_hash(pipeline_out)

    def test_with_document(self, tmp_path):
        doc = tmp_path / "d.md"
        doc.write_text("# Deck\n\n![x](x.png)\n")
        assert main(["pipeline", "--doc", str(doc), "--out", str(tmp_path / "o")]) == 0
        assert (tmp_path / "o" / "units.jsonl").exists()

    def test_console_entry(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "slidesynth.cli", "ldl", "validate", str(FIXTURES / "two_column.ldl")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
