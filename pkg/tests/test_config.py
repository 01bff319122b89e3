import shutil
import tempfile
import unittest
from pathlib import Path
from beliefbench._config import RunConfig, load_config
from beliefbench._errors import InputError
from beliefbench._labeler import DEFAULT_STEMS


class TestRunConfig(unittest.TestCase):
    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.keywords, DEFAULT_STEMS)
        self.assertEqual(config.strong_threshold, 0.7)
        self.assertEqual(config.minor_threshold_pct, 5.0)
        self.assertEqual(config.discrepancy_threshold, 4)
        self.assertEqual(config.quartiles, "tukey")
        self.assertTrue(config.exclude_little_set)
        self.assertEqual(config.pin_until, "2019-06-30")

    def test_hash(self):
        digest = RunConfig().config_hash()
        self.assertEqual(len(digest), 16)
        self.assertEqual(digest, RunConfig().config_hash())
        self.assertNotEqual(digest,
                            RunConfig(strong_threshold=0.6).config_hash())
        # Lists and tuples describe the same configuration.
        self.assertEqual(RunConfig(keywords=["fix", "bug"]).config_hash(),
                         RunConfig(keywords=("fix", "bug")).config_hash())

    def test_to_dict(self):
        data = RunConfig().to_dict()
        self.assertIsInstance(data["keywords"], list)
        self.assertEqual(RunConfig(**data), RunConfig())

    def test_derived_rules(self):
        config = RunConfig(test_marker="spec", source_extensions=["rb"])
        rules = config.category_rules()
        self.assertEqual(rules.test_marker, "spec")
        self.assertEqual(rules.source_extensions, (".rb",))
        self.assertTrue(config.keyword_set().matches("Fix it"))

    def test_invalid(self):
        invalid = [dict(quartiles="nearest"),
                   dict(strong_threshold=1.5),
                   dict(strong_threshold="high"),
                   dict(minor_threshold_pct=0),
                   dict(discrepancy_threshold=0),
                   dict(exclude_little_set="yes"),
                   dict(keywords="fix"),
                   dict(keywords=[]),
                   dict(keywords=["Fix"]),
                   dict(test_marker=""),
                   dict(pin_until="sometime")]
        for kwargs in invalid:
            with self.subTest(**kwargs):
                with self.assertRaises(InputError):
                    RunConfig(**kwargs)


class TestLoadConfig(unittest.TestCase):
    def setUp(self):
        self.tmp_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def write(self, text):
        path = self.tmp_dir / "run.yaml"
        path.write_text(text, encoding="utf-8")
        return path

    def test_defaults(self):
        self.assertEqual(load_config(None), RunConfig())
        self.assertEqual(load_config(self.write("")), RunConfig())

    def test_overrides(self):
        path = self.write("strong_threshold: 0.5\n"
                          "quartiles: linear\n"
                          "pin_until: 2018-12-31\n"
                          "keywords: [fix, bug]\n")
        with self.assertLogs("beliefbench", level="INFO"):
            config = load_config(path)
        self.assertEqual(config.strong_threshold, 0.5)
        self.assertEqual(config.quartiles, "linear")
        self.assertEqual(config.pin_until, "2018-12-31")
        self.assertEqual(config.keywords, ("fix", "bug"))

    def test_unknown_key(self):
        path = self.write("strong_treshold: 0.5\n")
        with self.assertRaises(InputError) as cm:
            load_config(path)
        self.assertIn("strong_treshold", str(cm.exception))

    def test_malformed(self):
        with self.assertRaises(InputError):
            load_config(self.write("keywords: [fix\n"))
        with self.assertRaises(InputError):
            load_config(self.write("- a list\n"))
        with self.assertRaises(InputError):
            load_config(self.write("quartiles: nearest\n"))
        with self.assertRaises(InputError):
            load_config(self.tmp_dir / "missing.yaml")


if __name__ == "__main__":
    unittest.main(verbosity=2)
