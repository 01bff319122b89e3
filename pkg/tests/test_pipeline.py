import os
import json
import shutil
import tempfile
import unittest
import pandas as pd
from pathlib import Path
from beliefbench._corpus import load_manifest
from beliefbench._labeler import FileCategory
from beliefbench._metrics import Belief
from beliefbench._pipeline import (cmd_extract,
                                   cmd_analyze,
                                   cmd_report,
                                   find_extracts,
                                   EXIT_OK,
                                   EXIT_INPUT,
                                   EXIT_ALL_FAILED)
from beliefbench._report import RESULTS_COLUMNS
from beliefbench._synth import SynthSpec, write_synthetic
from git_fixtures import HAS_GIT, make_repository

NETWORK_TESTS = os.environ.get("BELIEFBENCH_NETWORK_TESTS") == "1"


class TestSyntheticPipeline(unittest.TestCase):
    def setUp(self):
        self.tmp_dir = Path(tempfile.mkdtemp())
        self.cache_dir = self.tmp_dir / "cache"
        write_synthetic(SynthSpec(seed=1), self.cache_dir, slug="synth/one")
        write_synthetic(SynthSpec(seed=2, n_commits=150), self.cache_dir,
                        slug="synth/two")
        write_synthetic(SynthSpec(seed=3,
                                  n_files={FileCategory.SOURCE: 60,
                                           FileCategory.TEST: 10},
                                  target_rho={Belief.B6: 0.8}),
                        self.cache_dir, slug="synth/planted")

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def analyze(self, name, **kwargs):
        out_dir = self.tmp_dir / name
        ret = cmd_analyze(cache_dir=self.cache_dir,
                          out_dir=out_dir,
                          show_progress=False,
                          **kwargs)
        self.assertEqual(ret, EXIT_OK)
        return out_dir

    def test_end_to_end(self):
        out_dir = self.analyze("out")
        self.assertEqual(len(find_extracts(self.cache_dir)), 3)
        data = pd.read_csv(out_dir / "results.csv")
        self.assertEqual(list(data.columns), RESULTS_COLUMNS)
        self.assertEqual(len(data), 3 * 8 * 3)
        self.assertEqual(sorted(data["project"].unique()),
                         ["synth/one", "synth/planted", "synth/two"])
        self.assertTrue(data["rho"].dropna().between(-1, 1).all())
        planted = data[(data["project"] == "synth/planted") &
                       (data["belief"] == "B6") &
                       (data["category"] == "Source")].iloc[0]
        self.assertEqual(planted["n"], 60)
        self.assertGreater(planted["rho"], 0.5)
        files = sorted(p.name for p in (out_dir / "files").glob("*.csv"))
        self.assertEqual(files, ["synth__one.csv", "synth__planted.csv",
                                 "synth__two.csv"])

        with open(out_dir / "summary.json", encoding="utf-8") as fid:
            summary = json.load(fid)
        self.assertEqual(len(summary["config_hash"]), 16)
        self.assertEqual(summary["totals"]["projects"], 3)
        self.assertEqual(summary["config"]["strong_threshold"], 0.7)

        lines = []
        ret = cmd_report(out_dir / "summary.json", printer=lines.append)
        self.assertEqual(ret, EXIT_OK)
        svgs = sorted(p.name for p in out_dir.glob("belief_*.svg"))
        self.assertEqual(svgs, ["belief_B%d.svg" % i for i in range(1, 9)])
        self.assertTrue((out_dir / "figure.svg").is_file())
        table = pd.read_csv(out_dir / "discrepancy.csv")
        self.assertEqual(len(table), 8)
        self.assertEqual(len(lines), 9)
        svg = (out_dir / "belief_B6.svg").read_text(encoding="utf-8")
        self.assertIn(summary["config_hash"], svg)

    def test_deterministic(self):
        first = self.analyze("first")
        second = self.analyze("second")
        cmd_report(first, printer=lambda msg=None: None)
        cmd_report(second, printer=lambda msg=None: None)
        names = ["results.csv", "summary.json", "discrepancy.csv",
                 "figure.svg", "files/synth__two.csv"]
        names += ["belief_B%d.svg" % i for i in range(1, 9)]
        for name in names:
            with self.subTest(name=name):
                self.assertEqual((first / name).read_bytes(),
                                 (second / name).read_bytes())

    def test_parallel_matches_serial(self):
        serial = self.analyze("serial")
        parallel = self.analyze("parallel", jobs=2)
        for name in ["results.csv", "summary.json"]:
            self.assertEqual((serial / name).read_bytes(),
                             (parallel / name).read_bytes())

    def test_config(self):
        config = self.tmp_dir / "run.yaml"
        config.write_text("strong_threshold: 0.5\nquartiles: linear\n",
                          encoding="utf-8")
        default = self.analyze("default")
        custom = self.analyze("custom", config=config)
        with open(default / "summary.json", encoding="utf-8") as fid:
            hash_default = json.load(fid)["config_hash"]
        with open(custom / "summary.json", encoding="utf-8") as fid:
            hash_custom = json.load(fid)["config_hash"]
        self.assertNotEqual(hash_default, hash_custom)

    def test_bad_config(self):
        config = self.tmp_dir / "run.yaml"
        config.write_text("threshold: 0.5\n", encoding="utf-8")
        with self.assertLogs("beliefbench", level="ERROR"):
            ret = cmd_analyze(cache_dir=self.cache_dir, config=config,
                              out_dir=self.tmp_dir / "out",
                              show_progress=False)
        self.assertEqual(ret, EXIT_INPUT)

    def test_malformed_extract(self):
        path = self.cache_dir / "broken__repo.jsonl"
        path.write_text("{}\n", encoding="utf-8")
        with self.assertLogs("beliefbench", level="ERROR") as cm:
            ret = cmd_analyze(cache_dir=self.cache_dir,
                              out_dir=self.tmp_dir / "out",
                              show_progress=False)
        self.assertEqual(ret, EXIT_INPUT)
        self.assertIn("broken__repo.jsonl:1", cm.output[0])


class TestPipelineErrors(unittest.TestCase):
    def setUp(self):
        self.tmp_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_no_extracts(self):
        with self.assertLogs("beliefbench", level="ERROR"):
            ret = cmd_analyze(cache_dir=self.tmp_dir,
                              out_dir=self.tmp_dir / "out",
                              show_progress=False)
        self.assertEqual(ret, EXIT_INPUT)
        with self.assertLogs("beliefbench", level="ERROR"):
            ret = cmd_analyze(cache_dir=self.tmp_dir / "missing",
                              out_dir=self.tmp_dir / "out",
                              show_progress=False)
        self.assertEqual(ret, EXIT_INPUT)

    def test_malformed_summary(self):
        path = self.tmp_dir / "summary.json"
        path.write_text("[]", encoding="utf-8")
        with self.assertLogs("beliefbench", level="ERROR"):
            self.assertEqual(cmd_report(path), EXIT_INPUT)
        with self.assertLogs("beliefbench", level="ERROR"):
            self.assertEqual(cmd_report(self.tmp_dir / "none.json"),
                             EXIT_INPUT)

    def test_missing_manifest(self):
        with self.assertLogs("beliefbench", level="ERROR"):
            ret = cmd_extract(manifest=self.tmp_dir / "missing.csv",
                              cache_dir=self.tmp_dir / "cache",
                              show_progress=False)
        self.assertEqual(ret, EXIT_INPUT)

    def test_all_projects_failed(self):
        manifest = self.tmp_dir / "manifest.csv"
        manifest.write_text("slug,url\na/b,https://example.com/a/b.git\n"
                            "c/d,https://example.com/c/d.git\n",
                            encoding="utf-8")
        with self.assertLogs("beliefbench", level="ERROR") as cm:
            ret = cmd_extract(manifest=manifest,
                              cache_dir=self.tmp_dir / "cache",
                              offline=True,
                              show_progress=False)
        self.assertEqual(ret, EXIT_ALL_FAILED)
        self.assertTrue(any("a/b" in line for line in cm.output))

    def test_invalid_until(self):
        manifest = self.tmp_dir / "manifest.csv"
        manifest.write_text("slug,url\na/b,https://example.com/a/b.git\n",
                            encoding="utf-8")
        with self.assertLogs("beliefbench", level="ERROR") as cm:
            ret = cmd_extract(manifest=manifest,
                              cache_dir=self.tmp_dir / "cache",
                              until="not-a-date",
                              offline=True,
                              show_progress=False)
        self.assertEqual(ret, EXIT_INPUT)
        self.assertIn("not-a-date", cm.output[0])

    @unittest.skipUnless(HAS_GIT, "git executable not available")
    def test_unwritable_extract(self):
        make_repository(self.tmp_dir / "origin")
        manifest = self.tmp_dir / "manifest.csv"
        manifest.write_text("slug,url\nlocal/good,%s\nlocal/bad,%s\n"
                            % (self.tmp_dir / "origin",
                               self.tmp_dir / "origin"),
                            encoding="utf-8")
        cache_dir = self.tmp_dir / "cache"
        # A directory in place of the extract file blocks the write.
        (cache_dir / "local__bad.jsonl").mkdir(parents=True)
        lines = []
        with self.assertLogs("beliefbench", level="ERROR"):
            ret = cmd_extract(manifest=manifest,
                              cache_dir=cache_dir,
                              jobs=2,
                              show_progress=False,
                              printer=lines.append)
        self.assertEqual(ret, EXIT_OK)
        self.assertTrue((cache_dir / "local__good.jsonl").is_file())
        self.assertTrue(any(line.startswith("FAILED local/bad")
                            for line in lines))
        self.assertFalse((cache_dir / "local__bad.jsonl.tmp").exists())

    @unittest.skipUnless(HAS_GIT, "git executable not available")
    def test_extract_local_projects(self):
        make_repository(self.tmp_dir / "origin")
        manifest = self.tmp_dir / "manifest.csv"
        manifest.write_text("slug,url,pin,commits\n"
                            "local/origin,%s,,2\n"
                            "local/missing,%s,,5\n"
                            % (self.tmp_dir / "origin",
                               self.tmp_dir / "missing"),
                            encoding="utf-8")
        lines = []
        with self.assertLogs("beliefbench", level="ERROR"):
            ret = cmd_extract(manifest=manifest,
                              cache_dir=self.tmp_dir / "cache",
                              jobs=2,
                              show_progress=False,
                              printer=lines.append)
        self.assertEqual(ret, EXIT_OK)
        self.assertTrue((self.tmp_dir / "cache" /
                         "local__origin.jsonl").is_file())
        self.assertTrue(any("local/origin" in line for line in lines))
        self.assertTrue(any(line.startswith("FAILED local/missing")
                            for line in lines))

        ret = cmd_analyze(cache_dir=self.tmp_dir / "cache",
                          out_dir=self.tmp_dir / "out",
                          show_progress=False)
        self.assertEqual(ret, EXIT_OK)


@unittest.skipUnless(NETWORK_TESTS, "set BELIEFBENCH_NETWORK_TESTS=1 to run")
class TestCorpusAcceptance(unittest.TestCase):
    """Clones one project of the default manifest and checks its size."""

    def setUp(self):
        self.tmp_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_scribejava(self):
        entry = {e.slug: e for e in load_manifest()}["scribejava/scribejava"]
        manifest = self.tmp_dir / "manifest.csv"
        manifest.write_text("slug,url,pin,commits\n%s,%s,2019-06-30,%d\n"
                            % (entry.slug, entry.clone_url,
                               entry.expected_commits), encoding="utf-8")
        lines = []
        ret = cmd_extract(manifest=manifest,
                          cache_dir=self.tmp_dir / "cache",
                          show_progress=False,
                          printer=lines.append)
        self.assertEqual(ret, EXIT_OK)
        ret = cmd_analyze(cache_dir=self.tmp_dir / "cache",
                          out_dir=self.tmp_dir / "out",
                          show_progress=False)
        self.assertEqual(ret, EXIT_OK)
        data = pd.read_csv(self.tmp_dir / "out" / "results.csv")
        self.assertEqual(len(data), 24)
        with open(self.tmp_dir / "out" / "summary.json", encoding="utf-8") as fid:
            commits = json.load(fid)["totals"]["commits"]
        # Within 5% of the commit count of the original snapshot.
        self.assertLessEqual(abs(commits - 954), 0.05 * 954)


if __name__ == "__main__":
    unittest.main(verbosity=2)
