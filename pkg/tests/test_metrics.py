import unittest
import pandas as pd
from beliefbench._gitlog import CommitRecord, FileChange
from beliefbench._labeler import FileCategory
from beliefbench._metrics import (Belief,
                                  build_histories,
                                  defect_proneness,
                                  b1_developers,
                                  b2_added,
                                  b3_pair,
                                  b4_loc,
                                  b5_pair,
                                  b6_commits,
                                  b7_deleted,
                                  b8_minor_pct,
                                  belief_value,
                                  assemble_samples,
                                  little_set_size,
                                  metrics_frame)


def commit(ts, author, message, *changes):
    return CommitRecord(commit_id="c%d" % ts,
                        author_id=author,
                        timestamp=ts,
                        message=message,
                        changes=tuple(FileChange(*c) for c in changes))


RECORDS = [
    commit(100, "alice", "Add parser",
           ("src/a.py", 10, 0), ("tests/test_a.py", 5, 0),
           ("img.png", 0, 0, True)),
    commit(200, "bob", "Fix bug in parser", ("src/a.py", 2, 1)),
    commit(300, "alice", "Tweak", ("src/a.py", 0, 0), ("src/b.py", 4, 0)),
    commit(400, "carol", "Fix crash", ("src/a.py", 1, 3), ("src/b.py", 1, 1)),
    commit(500, "alice", "Fix error", ("src/a.py", 3, 0)),
]


class TestBuildHistories(unittest.TestCase):
    def setUp(self):
        self.histories = build_histories(RECORDS)

    def test_paths(self):
        # Static files are dropped, paths are ordered.
        self.assertEqual(list(self.histories),
                         ["src/a.py", "src/b.py", "tests/test_a.py"])
        self.assertIs(self.histories["src/a.py"].category, FileCategory.SOURCE)
        self.assertIs(self.histories["tests/test_a.py"].category,
                      FileCategory.TEST)

    def test_events(self):
        h = self.histories["src/a.py"]
        self.assertEqual([e.timestamp for e in h.events],
                         [100, 200, 300, 400, 500])
        self.assertEqual([e.is_bugfix for e in h.events],
                         [False, True, False, True, True])
        self.assertEqual(h.created_at, 100)
        self.assertEqual(dict(h.per_author_added),
                         {"alice": 13, "bob": 2, "carol": 1})

    def test_event_count_matches_changes(self):
        n_changes = sum(1 for r in RECORDS for c in r.changes
                        if c.path != "img.png")
        self.assertEqual(sum(len(h.events) for h in self.histories.values()),
                         n_changes)

    def test_empty(self):
        self.assertEqual(build_histories([]), {})


class TestMetrics(unittest.TestCase):
    def setUp(self):
        histories = build_histories(RECORDS)
        self.a = histories["src/a.py"]
        self.b = histories["src/b.py"]
        self.t = histories["tests/test_a.py"]

    def test_defect_proneness(self):
        self.assertEqual(defect_proneness(self.a), 3)
        self.assertEqual(defect_proneness(self.b), 1)
        self.assertEqual(defect_proneness(self.t), 0)

    def test_developers_ignore_zero_delta_touches(self):
        self.assertEqual(b1_developers(self.a), 3)
        records = RECORDS + [commit(600, "dave", "Touch", ("src/a.py", 0, 0))]
        a = build_histories(records)["src/a.py"]
        self.assertEqual(b1_developers(a), 3)
        self.assertEqual(b6_commits(a), 6)

    def test_line_metrics(self):
        self.assertEqual(b2_added(self.a), 16)
        self.assertEqual(b7_deleted(self.a), 4)
        self.assertEqual(b4_loc(self.a), 20)
        self.assertEqual(b4_loc(self.a), b2_added(self.a) + b7_deleted(self.a))
        self.assertEqual(b6_commits(self.a), 5)

    def test_b3(self):
        # Two most recent fixes at 400 and 500.
        self.assertEqual(b3_pair(self.a), (100.0, 100.0))
        # A single fix: interval from creation.
        self.assertEqual(b3_pair(self.b), (300.0, 100.0))
        self.assertIsNone(b3_pair(self.t))

    def test_b5(self):
        # Five events: the first half holds two.
        self.assertEqual(b5_pair(self.a), (1.0, 2.0))
        self.assertEqual(b5_pair(self.b), (0.0, 1.0))
        self.assertIsNone(b5_pair(self.t))
        first, second = b5_pair(self.a)
        self.assertEqual(first + second, defect_proneness(self.a))

    def test_b8(self):
        # alice 13, bob 2, carol 1 of 16 added lines
        self.assertEqual(b8_minor_pct(self.a), 0.0)
        self.assertAlmostEqual(b8_minor_pct(self.a, threshold_pct=10.0),
                               100.0 / 3)
        self.assertAlmostEqual(b8_minor_pct(self.a, threshold_pct=15.0),
                               200.0 / 3)

    def test_b8_threshold_is_strict(self):
        # carol wrote exactly 1/16 = 6.25%
        self.assertAlmostEqual(b8_minor_pct(self.a, threshold_pct=6.25),
                               0.0)

    def test_b8_without_added_lines(self):
        records = [commit(10, "a", "Add", ("src/x.c", 0, 0)),
                   commit(20, "b", "Fix", ("src/x.c", 0, 2))]
        h = build_histories(records)["src/x.c"]
        self.assertIsNone(b8_minor_pct(h))
        self.assertIsNone(belief_value(h, Belief.B8))

    def test_belief_value(self):
        self.assertEqual(belief_value(self.a, Belief.B6), (5.0, 3.0))
        self.assertEqual(belief_value(self.a, Belief.B1), (3.0, 3.0))
        self.assertEqual(belief_value(self.a, Belief.B3), (100.0, 100.0))
        self.assertEqual(belief_value(self.a, Belief.B5), (1.0, 2.0))

    def test_paired_beliefs(self):
        self.assertEqual([b for b in Belief if b.is_paired],
                         [Belief.B3, Belief.B5])


class TestAssembleSamples(unittest.TestCase):
    def setUp(self):
        self.histories = build_histories(RECORDS)

    def test_source(self):
        sample = assemble_samples(self.histories, Belief.B6,
                                  FileCategory.SOURCE)
        self.assertEqual(sample.paths, ("src/a.py", "src/b.py"))
        self.assertEqual(sample.xs, (5.0, 2.0))
        self.assertEqual(sample.ys, (3.0, 1.0))
        self.assertEqual(sample.n, 2)
        self.assertEqual(sample.little_set, 0)

    def test_little_set(self):
        sample = assemble_samples(self.histories, Belief.B6,
                                  FileCategory.TEST)
        self.assertEqual(sample.n, 0)
        self.assertEqual(sample.little_set, 1)
        self.assertEqual(little_set_size(self.histories, FileCategory.TEST), 1)
        self.assertEqual(little_set_size(self.histories, FileCategory.SOURCE), 0)

    def test_keep_little_set(self):
        sample = assemble_samples(self.histories, Belief.B6,
                                  FileCategory.TEST, exclude_little_set=False)
        self.assertEqual(sample.xs, (1.0,))
        self.assertEqual(sample.ys, (0.0,))
        # B3 needs a fix, so files without one never enter its sample.
        sample = assemble_samples(self.histories, Belief.B3,
                                  FileCategory.TEST, exclude_little_set=False)
        self.assertEqual(sample.n, 0)
        self.assertEqual(sample.little_set, 1)

    def test_not_applicable(self):
        records = [commit(10, "a", "Fix it", ("src/x.c", 5, 0)),
                   commit(20, "a", "Fix more", ("src/x.c", 1, 0),
                          ("src/y.c", 2, 0))]
        histories = build_histories(records)
        # src/y.c has a single event, B5 is undefined for it.
        sample = assemble_samples(histories, Belief.B5, FileCategory.SOURCE)
        self.assertEqual(sample.paths, ("src/x.c",))
        self.assertEqual(sample.not_applicable, 1)

    def test_empty_category(self):
        sample = assemble_samples(self.histories, Belief.B2,
                                  FileCategory.CONFIG)
        self.assertEqual(sample.n, 0)
        self.assertEqual(sample.little_set, 0)


class TestMetricsFrame(unittest.TestCase):
    def test_frame(self):
        data = metrics_frame(build_histories(RECORDS))
        self.assertEqual(list(data["path"]),
                         ["src/a.py", "src/b.py", "tests/test_a.py"])
        row = data.iloc[0]
        self.assertEqual(row["d"], 3)
        self.assertEqual(row["b4"], 20)
        self.assertEqual(row["b3_interval"], 100)
        self.assertTrue(pd.isna(data.iloc[2]["b3_created"]))
        self.assertTrue(pd.isna(data.iloc[2]["b5_first"]))
        self.assertEqual(str(data["b5_first"].dtype), "Int64")


if __name__ == "__main__":
    unittest.main(verbosity=2)
