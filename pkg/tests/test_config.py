"""
Unit tests for configuration loading and validation.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from src.config import ExperimentConfig, load_config
from src.errors import ConfigurationError
from src.state import ExperimentKind


class TestLoadConfig(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.env = patch.dict(os.environ, {}, clear=False)
        self.env.start()
        os.environ.pop("THREADS", None)
        os.environ.pop("BERRYLAB_OUT", None)

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()

    def _write(self, data) -> Path:
        path = self.dir / "cfg.json"
        path.write_text(json.dumps(data))
        return path

    def test_file_layer(self):
        cfg = load_config(self._write({"kind": "cov-table", "energies": [100, 1000], "seed": 3}))
        self.assertEqual(cfg.kind, ExperimentKind.COV_TABLE)
        self.assertEqual(cfg.energies, [100.0, 1000.0])
        self.assertEqual(cfg.seed, 3)
        self.assertEqual(cfg.ppw, 10)

    def test_overrides_win(self):
        path = self._write({"kind": "cov-table", "seed": 3, "n_reps": 50})
        cfg = load_config(path, {"seed": 9, "n_reps": None})
        self.assertEqual(cfg.seed, 9)
        self.assertEqual(cfg.n_reps, 50)

    def test_environment_layer(self):
        os.environ["THREADS"] = "4"
        os.environ["BERRYLAB_OUT"] = str(self.dir / "out")
        cfg = load_config(None, {"kind": "cov-table"})
        self.assertEqual(cfg.threads, 4)
        self.assertEqual(cfg.out_dir, str(self.dir / "out"))
        self.assertEqual(load_config(None, {"kind": "cov-table", "threads": 2}).threads, 2)

    def test_bad_threads_variable(self):
        os.environ["THREADS"] = "many"
        with self.assertRaises(ConfigurationError):
            load_config(None, {"kind": "cov-table"})

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            load_config(self.dir / "missing.json")

    def test_malformed_file(self):
        path = self.dir / "bad.json"
        path.write_text("{not json")
        with self.assertRaises(ConfigurationError):
            load_config(path)
        with self.assertRaises(ConfigurationError):
            load_config(self._write([1, 2]))

    def test_validation_errors(self):
        bad = [
            {"kind": "cov-table", "energies": [5.0]},
            {"kind": "cov-table", "energies": []},
            {"kind": "nope"},
            {"kind": "cov-table", "unknown": 1},
            {"kind": "sheet-cov", "rects": [[1.5, 0.2]]},
            {"kind": "whitenoise", "bumps": [{"center": [0.9, 0.5], "radius": 0.2}]},
            {"kind": "rescaling", "radii": [0.0]},
            {"kind": "cov-table", "segments": [[1.0, 1.0, 0.0]]},
            {"kind": "chaos2-cov", "chains": [{"foo": 1}]},
            {"kind": "sup-moment", "energies": [100, 200, 400]},
            {"kind": "sup-moment", "energies": [400, 100, 200, 800]},
        ]
        for data in bad:
            with self.assertRaises(ConfigurationError, msg=str(data)):
                load_config(None, data)

    def test_typed_accessors(self):
        cfg = load_config(None, {
            "kind": "sheet-cov", "rects": [[0.5, 1.0]], "points": [[0.25, 0.75]],
            "chains": [{"rect": [0.5, 0.5]}], "bumps": [{"center": [0.5, 0.5], "radius": 0.2}],
        })
        self.assertEqual(cfg.rect_domains()[0].x1, 0.5)
        self.assertEqual(cfg.point_tuples(), [(0.25, 0.75)])
        self.assertAlmostEqual(cfg.chain_objects()[0].length, 2.0)
        self.assertEqual(cfg.test_functions()[0].radius, (0.2, 0.2))

    def test_echo_is_json_ready(self):
        cfg = ExperimentConfig(kind=ExperimentKind.COV_TABLE, energies=[100.0])
        echoed = cfg.echo()
        self.assertEqual(echoed["kind"], "cov-table")
        json.dumps(echoed)


if __name__ == "__main__":
    unittest.main()
