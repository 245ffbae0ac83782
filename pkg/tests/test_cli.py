import hashlib
import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

jsonschema = pytest.importorskip("jsonschema")

from aquasift.cli import main
from conftest import FIXTURES


def digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def schema(name):
    text = resources.files("aquasift.data").joinpath(f"schemas/{name}").read_text("utf-8")
    return json.loads(text)


def write_mini_corpus(path, n_per_theme=30):
    """Three seeded themes, labeled, with enough per-country volume.  The
    theme head word appears twice per tweet so it tops the term ranking."""
    themes = {
        "drought": ["drought", "farmers", "crops", "irrigation", "rainfall"],
        "plastic": ["plastic", "bottles", "ocean", "trash", "beach"],
        "chlorine": ["chlorine", "tap", "smell", "pipes", "filter"],
    }
    rows = []
    for name, words in themes.items():
        head = words[0]
        for k in range(n_per_theme):
            text = (
                f"{head} alert: {words[k % 5]} and {words[(k + 1) % 5]} mean more "
                f"{head} worries variant{k}"
            )
            rows.append({"id": f"{name}{k}", "text": text, "label": "relevant",
                         "location": "Florida, FL"})
    for k in range(45):
        rows.append({"id": f"junk{k}", "text": f"guitar recipe laptop evening variant{k}",
                     "label": "irrelevant"})
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return len(rows)


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """prepare + train two baselines + score both splits, shared by tests."""
    base = tmp_path_factory.mktemp("pipeline")
    corpus = f"{FIXTURES}/corpus_500.jsonl"
    assert main(["prepare", "--corpus", corpus, "--out", f"{base}/prepared.jsonl",
                 "--seed", "7"]) == 0
    for name, seed, dim, epochs in (("m_a", 1, 4096, 60), ("m_b", 2, 512, 30)):
        assert main(["train-baseline", "--corpus", f"{base}/prepared.jsonl",
                     "--name", name, "--out", f"{base}/{name}.jsonl",
                     "--seed", str(seed), "--dim", str(dim), "--epochs", str(epochs)]) == 0
    for split in ("validation", "test"):
        assert main(["score", "--corpus", f"{base}/prepared.jsonl", "--split", split,
                     "--model", f"{base}/m_a.jsonl", "--model", f"{base}/m_b.jsonl",
                     "--out", f"{base}/scores_{split}.csv",
                     "--labels-out", f"{base}/labels_{split}.csv"]) == 0
    return base


class TestPrepare:
    def test_counts_printed_and_deterministic(self, tmp_path, capsys):
        corpus = f"{FIXTURES}/corpus_500.jsonl"
        out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert main(["prepare", "--corpus", corpus, "--out", str(out1), "--seed", "3"]) == 0
        captured = capsys.readouterr().out
        assert "train" in captured and "validation" in captured
        assert main(["prepare", "--corpus", corpus, "--out", str(out2), "--seed", "3"]) == 0
        assert digest(out1) == digest(out2)

    def test_empty_corpus_exit_code(self, tmp_path, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        rc = main(["prepare", "--corpus", str(empty), "--out", str(tmp_path / "o.jsonl")])
        assert rc == 2
        assert "aquasift: error:" in capsys.readouterr().err

    def test_keyword_filter_flag(self, tmp_path, capsys):
        src = tmp_path / "src.jsonl"
        src.write_text(
            '{"text": "the watercrisis is bad here"}\n'
            '{"text": "guitar practice all evening"}\n'
            '{"text": "drinkingwater should be safe everywhere"}\n'
            '{"text": "plasticpollution chokes the bay today"}\n'
            '{"text": "completely unrelated gardening post"}\n'
        )
        out = tmp_path / "out.jsonl"
        assert main(["prepare", "--corpus", str(src), "--out", str(out),
                     "--filter-keywords"]) == 0
        assert sum(1 for _ in open(out)) == 3


class TestConfigFile:
    def test_config_supplies_defaults_flags_override(self, tmp_path, capsys):
        src = tmp_path / "src.jsonl"
        with open(src, "w") as fh:
            for i in range(20):
                label = "relevant" if i % 2 else "irrelevant"
                fh.write(json.dumps({"text": f"some words number {i} here", "label": label}) + "\n")
        cfg = tmp_path / "cfg.ini"
        cfg.write_text("[prepare]\nmin-tokens = 99\n")
        out = tmp_path / "out.jsonl"
        rc = main(["--config", str(cfg), "prepare", "--corpus", str(src), "--out", str(out)])
        assert rc == 2  # min-tokens 99 from config wipes out every tweet
        rc = main(["--config", str(cfg), "prepare", "--corpus", str(src), "--out", str(out),
                   "--min-tokens", "2"])
        assert rc == 0  # flag overrides config

    def test_missing_config(self, tmp_path, capsys):
        rc = main(["--config", str(tmp_path / "nope.ini"), "prepare",
                   "--corpus", "x", "--out", "y"])
        assert rc == 2


class TestFuse:
    def test_structural_report(self, pipeline, tmp_path, capsys):
        out = tmp_path / "report.json"
        rc = main(["fuse",
                   "--scores-validation", f"{pipeline}/scores_validation.csv",
                   "--labels-validation", f"{pipeline}/labels_validation.csv",
                   "--scores-test", f"{pipeline}/scores_test.csv",
                   "--labels-test", f"{pipeline}/labels_test.csv",
                   "--optimizer", "nelder-mead", "--top-k", "2",
                   "--out", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        assert set(report["models"]) == {"m_a", "m_b"}
        assert "simple_averaging" in report
        assert list(report["fused"]) == ["nelder-mead"]
        jsonschema.validate(report, schema("fuse_report.schema.json"))

    def test_all_optimizers_mirror_method_list(self, pipeline, tmp_path):
        out = tmp_path / "report.json"
        weights = tmp_path / "weights.json"
        rc = main(["fuse",
                   "--scores-validation", f"{pipeline}/scores_validation.csv",
                   "--labels-validation", f"{pipeline}/labels_validation.csv",
                   "--scores-test", f"{pipeline}/scores_test.csv",
                   "--labels-test", f"{pipeline}/labels_test.csv",
                   "--optimizer", "all", "--out", str(out), "--weights-out", str(weights)])
        assert rc == 0
        report = json.loads(out.read_text())
        assert sorted(report["fused"]) == ["lbfgs", "nelder-mead", "powell", "pso"]
        jsonschema.validate(report, schema("fuse_report.schema.json"))
        payload = json.loads(weights.read_text())
        jsonschema.validate(payload, schema("weights.schema.json"))
        for method_weights in payload.values():
            assert sum(method_weights.values()) == pytest.approx(1.0, abs=1e-9)

    def test_deterministic_report(self, pipeline, tmp_path):
        outs = []
        for name in ("r1.json", "r2.json"):
            out = tmp_path / name
            assert main(["fuse",
                         "--scores-validation", f"{pipeline}/scores_validation.csv",
                         "--labels-validation", f"{pipeline}/labels_validation.csv",
                         "--scores-test", f"{pipeline}/scores_test.csv",
                         "--labels-test", f"{pipeline}/labels_test.csv",
                         "--optimizer", "pso", "--seed", "5", "--out", str(out)]) == 0
            outs.append(digest(out))
        assert outs[0] == outs[1]

    def test_misaligned_labels_rejected(self, pipeline, tmp_path, capsys):
        bad = tmp_path / "bad_labels.csv"
        bad.write_text("sample_id,label\nghost,relevant\n")
        rc = main(["fuse",
                   "--scores-validation", f"{pipeline}/scores_validation.csv",
                   "--labels-validation", str(bad),
                   "--scores-test", f"{pipeline}/scores_test.csv",
                   "--labels-test", f"{pipeline}/labels_test.csv",
                   "--out", str(tmp_path / "r.json")])
        assert rc == 2

    def test_report_command(self, pipeline, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["fuse",
                     "--scores-validation", f"{pipeline}/scores_validation.csv",
                     "--labels-validation", f"{pipeline}/labels_validation.csv",
                     "--scores-test", f"{pipeline}/scores_test.csv",
                     "--labels-test", f"{pipeline}/labels_test.csv",
                     "--optimizer", "powell", "--out", str(out)]) == 0
        capsys.readouterr()
        assert main(["report", "--input", str(out)]) == 0
        table = capsys.readouterr().out
        assert "fused:powell" in table and "simple_averaging" in table


class TestTopics:
    def test_seeded_themes_recovered(self, tmp_path):
        corpus = tmp_path / "mini.jsonl"
        write_mini_corpus(corpus)
        out = tmp_path / "topics.json"
        csv_out = tmp_path / "topics.csv"
        rc = main(["topics", "--corpus", str(corpus), "--out", str(out),
                   "--csv-out", str(csv_out), "--min-cluster-size", "8",
                   "--min-samples", "4", "--min-count", "70"])
        assert rc == 0
        payload = json.loads(out.read_text())
        jsonschema.validate(payload, schema("topics_report.schema.json"))
        top_terms = {t["terms"][0]["term"] for t in payload["global"]}
        assert top_terms == {"drought", "plastic", "chlorine"}
        # 90 relevant tweets all from one US location
        assert list(payload["by_country"]) == ["USA"]
        assert list(payload["by_region"]) == ["America"]
        header = csv_out.read_text().splitlines()[0]
        assert header == "term,weight,topic"

    def test_no_relevant_tweets(self, tmp_path, capsys):
        corpus = tmp_path / "c.jsonl"
        corpus.write_text('{"text": "guitar evening", "label": "irrelevant"}\n')
        rc = main(["topics", "--corpus", str(corpus), "--out", str(tmp_path / "t.json")])
        assert rc == 2
        assert "no relevant tweets" in capsys.readouterr().err

    def test_n_topics_cap(self, tmp_path):
        corpus = tmp_path / "mini.jsonl"
        write_mini_corpus(corpus)
        out = tmp_path / "topics.json"
        rc = main(["topics", "--corpus", str(corpus), "--out", str(out),
                   "--min-cluster-size", "8", "--min-samples", "4", "--n-topics", "2"])
        assert rc == 0
        assert len(json.loads(out.read_text())["global"]) <= 2

    def test_external_embeddings_route(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        rows = []
        for i in range(12):
            rows.append({"id": f"a{i}", "text": f"drought crops dry fields variant{i}",
                         "label": "relevant"})
        with open(corpus, "w") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
        emb = tmp_path / "emb.csv"
        with open(emb, "w") as fh:
            fh.write("sample_id,v0,v1\n")
            for i in range(12):
                fh.write(f"a{i},{0.1 * (i % 3)},{0.2 * (i % 2)}\n")
        out = tmp_path / "topics.json"
        rc = main(["topics", "--corpus", str(corpus), "--embeddings", str(emb),
                   "--out", str(out), "--min-cluster-size", "4", "--min-samples", "2",
                   "--target-dim", "2"])
        assert rc == 0


class TestRegions:
    def test_fixture_counts(self, tmp_path, capsys):
        corpus = tmp_path / "c.jsonl"
        with open(corpus, "w") as fh:
            for i in range(80):
                fh.write(json.dumps({"text": f"water worry number {i}",
                                     "location": "Florida, FL"}) + "\n")
            fh.write(json.dumps({"text": "no location here"}) + "\n")
        countries = tmp_path / "countries.csv"
        regions = tmp_path / "regions.csv"
        rc = main(["regions", "--corpus", str(corpus),
                   "--countries-out", str(countries), "--regions-out", str(regions)])
        assert rc == 0
        assert "USA,80" in countries.read_text()
        assert "America,80" in regions.read_text()
        assert "(unmapped),1" in countries.read_text()

    def test_no_locations_all_residual(self, tmp_path):
        corpus = tmp_path / "c.jsonl"
        with open(corpus, "w") as fh:
            for i in range(5):
                fh.write(json.dumps({"text": f"tweet without any location {i}"}) + "\n")
        countries = tmp_path / "countries.csv"
        assert main(["regions", "--corpus", str(corpus),
                     "--countries-out", str(countries)]) == 0
        rows = countries.read_text().splitlines()
        assert rows[1:] == ["(unmapped),5"]

    def test_region_sums_equal_country_sums(self, tmp_path):
        corpus = f"{FIXTURES}/corpus_500.jsonl"
        countries = tmp_path / "countries.csv"
        regions = tmp_path / "regions.csv"
        assert main(["regions", "--corpus", corpus, "--countries-out", str(countries),
                     "--regions-out", str(regions)]) == 0

        def mapped_total(path):
            rows = [line.split(",") for line in path.read_text().splitlines()[1:]]
            return sum(int(count) for key, count in rows if key != "(unmapped)")

        assert mapped_total(countries) == mapped_total(regions)


class TestEntryPoint:
    def test_console_script(self):
        out = subprocess.run([sys.executable, "-m", "aquasift.cli", "--help"],
                             capture_output=True, text=True)
        assert out.returncode == 0
        assert "prepare" in out.stdout and "regions" in out.stdout
