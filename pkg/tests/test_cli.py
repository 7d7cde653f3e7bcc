from __future__ import annotations

import csv
import json

import pytest

from scholarank.cli import run_cli
from scholarank.corpus import load_corpus, save_corpus
from scholarank.ingest import save_citation_cache
from util import dblp_fixture_dois, dblp_fixture_xml, make_corpus

from test_ingest import entry  # shared CitationEntry helper


@pytest.fixture
def corpus_path(tmp_path):
    # the 3-author paper keeps the coauthor graph non-bipartite, so
    # sweeps that include theta=1 still converge
    corpus = make_corpus(
        [
            ("t1", 2000, ["A One", "B Two"], 10, "10.1/a"),
            ("t2", 2001, ["B Two", "C Three"], 6),
            ("t3", 2002, ["C Three"], None),
            ("t4", 2000, ["A One", "B Two", "C Three"], 2),
        ]
    )
    path = tmp_path / "corpus.jsonl"
    save_corpus(corpus, path)
    return path


@pytest.fixture
def single_author_corpus_path(tmp_path):
    path = tmp_path / "one.jsonl"
    save_corpus(make_corpus([("t", 2000, ["Only One"], 3)]), path)
    return path


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


class TestUsageErrors:
    def test_no_arguments(self, capsys):
        assert run_cli([]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert run_cli(["frobnicate"]) == 2

    def test_unknown_flag(self, capsys):
        assert run_cli(["trends", "--corpus", "x", "--out", "y", "--bogus"]) == 2

    def test_module_error_exits_one(self, tmp_path, capsys):
        missing = tmp_path / "nope.jsonl"
        assert run_cli(["trends", "--corpus", str(missing), "--out", str(tmp_path / "o")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_metric_value(self, corpus_path, tmp_path):
        assert (
            run_cli(
                [
                    "rank",
                    "--corpus",
                    str(corpus_path),
                    "--metric",
                    "fame",
                    "--out",
                    str(tmp_path / "o.csv"),
                ]
            )
            == 2
        )


class TestRank:
    def test_rank_pr_cite(self, corpus_path, tmp_path):
        out = tmp_path / "rank.csv"
        status = run_cli(
            [
                "rank",
                "--corpus",
                str(corpus_path),
                "--metric",
                "pr-cite",
                "--theta",
                "0.5",
                "--out",
                str(out),
            ]
        )
        assert status == 0
        rows = read_csv(out)
        assert rows[0] == ["author", "score", "rank"]
        assert len(rows) == 4
        assert sorted(int(r[2]) for r in rows[1:]) == [1, 2, 3] or sorted(
            int(r[2]) for r in rows[1:]
        ) == [1, 1, 3]
        manifest = json.loads((tmp_path / "rank.csv.manifest.json").read_text())
        assert manifest["command"] == "rank"
        assert manifest["config"]["metric"] == "pr-cite"
        assert manifest["config"]["theta"] == 0.5
        assert str(corpus_path) in manifest["inputs"]

    def test_every_metric_runs(self, corpus_path, tmp_path):
        for metric in ("h", "infl", "coa", "frac", "harm", "pr", "pr-publ", "pr-cite"):
            out = tmp_path / f"{metric}.csv"
            assert (
                run_cli(
                    ["rank", "--corpus", str(corpus_path), "--metric", metric, "--out", str(out)]
                )
                == 0
            )
            assert out.exists()


class TestOverlap:
    def test_single_author_full_fraction(self, single_author_corpus_path, tmp_path):
        out = tmp_path / "overlap.csv"
        status = run_cli(
            [
                "overlap",
                "--corpus",
                str(single_author_corpus_path),
                "--fraction",
                "1.0",
                "--out",
                str(out),
            ]
        )
        assert status == 0
        rows = read_csv(out)
        assert rows[0] == ["metric", "infl", "coa", "harm", "frac", "pr", "pr-publ", "pr-cite"]
        for row in rows[1:]:
            assert all(value == "100" for value in row[1:])


class TestStability:
    def test_outputs_and_grid(self, corpus_path, tmp_path):
        prefix = tmp_path / "stab"
        status = run_cli(
            [
                "stability",
                "--corpus",
                str(corpus_path),
                "--grid",
                "0:1:0.5",
                "--top",
                "2",
                "--metric",
                "pr-cite",
                "--out",
                str(prefix),
            ]
        )
        assert status == 0
        trajectories = read_csv(tmp_path / "stab_trajectories.csv")
        thetas = sorted({row[0] for row in trajectories[1:]})
        assert thetas == ["0", "0.5", "1"]
        report = read_csv(tmp_path / "stab_stability.csv")
        assert len(report) == 3  # header + 2 steps
        assert (tmp_path / "stab_trajectories.csv.manifest.json").exists()
        assert (tmp_path / "stab_stability.csv.manifest.json").exists()

    def test_rejects_scalar_metric(self, corpus_path, tmp_path):
        assert (
            run_cli(
                [
                    "stability",
                    "--corpus",
                    str(corpus_path),
                    "--metric",
                    "infl",
                    "--out",
                    str(tmp_path / "s"),
                ]
            )
            == 2
        )

    def test_nonconvergent_point_reported(self, tmp_path, capsys):
        # a three-node path graph is bipartite: theta=1 oscillates forever
        path = tmp_path / "path.jsonl"
        save_corpus(
            make_corpus([("t", 2000, ["A", "B"], 1), ("u", 2001, ["B", "C"], 2)]), path
        )
        status = run_cli(
            [
                "stability",
                "--corpus",
                str(path),
                "--grid",
                "0:1:0.5",
                "--metric",
                "pr-cite",
                "--out",
                str(tmp_path / "s"),
            ]
        )
        assert status == 1
        assert "theta=1.0" in capsys.readouterr().err


class TestTrendsAndTable1:
    def test_trends(self, corpus_path, tmp_path):
        out = tmp_path / "trends.csv"
        assert run_cli(["trends", "--corpus", str(corpus_path), "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == ["year", "1", "2", "3", "4", "5", "6", "7+"]
        assert [row[0] for row in rows[1:]] == ["2000", "2001", "2002"]
        for row in rows[1:]:
            assert sum(float(v) for v in row[1:]) == pytest.approx(1.0, abs=1e-12)

    def test_table1(self, corpus_path, tmp_path):
        out = tmp_path / "table1.csv"
        assert run_cli(["table1", "--corpus", str(corpus_path), "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == ["year", "coauthors", "n", "median", "group"]
        # buckets: 2000 -> {2, 3}, 2001 -> {2}, 2002 -> {1}
        assert [(row[0], row[1]) for row in rows[1:]] == [
            ("2000", "2"),
            ("2000", "3"),
            ("2001", "2"),
            ("2002", "1"),
        ]
        assert (tmp_path / "table1.csv.manifest.json").exists()


class TestIngest:
    def test_ingest_with_cache(self, tmp_path):
        dblp = tmp_path / "dump.xml"
        dblp.write_text(dblp_fixture_xml(), encoding="utf-8")
        cache = tmp_path / "cache.jsonl"
        dois = dblp_fixture_dois()
        save_citation_cache({d: entry(d, i * 3) for i, d in enumerate(dois[:18])}, cache)
        out = tmp_path / "corpus.jsonl"
        status = run_cli(
            ["ingest", "--dblp", str(dblp), "--citations", str(cache), "--out", str(out)]
        )
        assert status == 0
        corpus = load_corpus(out)
        assert len(corpus.papers) == 44
        report = json.loads((tmp_path / "corpus.jsonl.merge.json").read_text())
        assert report["matched"] == 18
        assert report["unmatched"] == 26
        assert (tmp_path / "corpus.jsonl.manifest.json").exists()
        assert (tmp_path / "corpus.jsonl.merge.json.manifest.json").exists()

    def test_ingest_with_api(self, tmp_path, stub_server):
        dblp = tmp_path / "dump.xml"
        dblp.write_text(dblp_fixture_xml(), encoding="utf-8")
        dois = dblp_fixture_dois()
        for i, doi in enumerate(dois[:18]):
            stub_server.script(doi, ("count", i))
        # remaining DOIs get the default 404
        out = tmp_path / "corpus.jsonl"
        status = run_cli(
            [
                "ingest",
                "--dblp",
                str(dblp),
                "--citations",
                "api",
                "--api-base",
                stub_server.base_url,
                "--rate",
                "500",
                "--retries",
                "1",
                "--workers",
                "4",
                "--out",
                str(out),
            ]
        )
        assert status == 0
        report = json.loads((tmp_path / "corpus.jsonl.merge.json").read_text())
        assert report["matched"] == 18
        assert report["unmatched"] == 26

    def test_ingest_bad_xml(self, tmp_path, capsys):
        dblp = tmp_path / "dump.xml"
        dblp.write_text("not xml at all", encoding="utf-8")
        status = run_cli(
            [
                "ingest",
                "--dblp",
                str(dblp),
                "--citations",
                str(tmp_path / "cache.jsonl"),
                "--out",
                str(tmp_path / "c.jsonl"),
            ]
        )
        assert status == 1
        assert "error:" in capsys.readouterr().err


class TestEnvConfig:
    def test_config_file_supplies_defaults(self, corpus_path, tmp_path, monkeypatch):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({"metric": "infl", "fraction": 0.5}), encoding="utf-8")
        monkeypatch.setenv("SCHOLARANK_CONFIG", str(config_path))
        out = tmp_path / "rank.csv"
        assert run_cli(["rank", "--corpus", str(corpus_path), "--out", str(out)]) == 0
        manifest = json.loads((tmp_path / "rank.csv.manifest.json").read_text())
        assert manifest["config"]["metric"] == "infl"

    def test_explicit_flag_wins(self, corpus_path, tmp_path, monkeypatch):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({"metric": "infl"}), encoding="utf-8")
        monkeypatch.setenv("SCHOLARANK_CONFIG", str(config_path))
        out = tmp_path / "rank.csv"
        assert (
            run_cli(
                ["rank", "--corpus", str(corpus_path), "--metric", "coa", "--out", str(out)]
            )
            == 0
        )
        manifest = json.loads((tmp_path / "rank.csv.manifest.json").read_text())
        assert manifest["config"]["metric"] == "coa"


class TestDeterminism:
    def test_rank_outputs_byte_identical(self, corpus_path, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out_a, out_b):
            assert (
                run_cli(
                    [
                        "rank",
                        "--corpus",
                        str(corpus_path),
                        "--metric",
                        "pr-publ",
                        "--out",
                        str(out),
                    ]
                )
                == 0
            )
        assert out_a.read_bytes() == out_b.read_bytes()
