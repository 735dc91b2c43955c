"""
Unit tests for result files.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import json
import tempfile
import unittest
from pathlib import Path

import numpy as np

from src.persistence import SCHEMA_VERSION, read_rows_csv, write_rows_csv, write_summary
from src.state import ExperimentKind


class TestRowsCsv(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_layout(self):
        path = write_rows_csv(self.dir / "a" / "rows.csv", [{"rep": 0, "x": 0.1}, {"rep": 1, "x": 1 / 3}])
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], f"# schema_version: {SCHEMA_VERSION}")
        self.assertEqual(lines[1], "rep,x")
        self.assertEqual(lines[2], "0,0.1")
        self.assertEqual(lines[3], "1,0.3333333333333333")

    def test_numpy_and_missing_values(self):
        path = write_rows_csv(self.dir / "rows.csv", [{"a": np.float64(2.5), "b": np.int64(3), "c": np.bool_(True)},
                                                      {"a": 1.0}])
        lines = path.read_text().splitlines()
        self.assertEqual(lines[2], "2.5,3,True")
        self.assertEqual(lines[3], "1.0,,")

    def test_byte_identical_rewrites(self):
        rng = np.random.default_rng(0)
        rows = [{"rep": i, "v": float(v)} for i, v in enumerate(rng.standard_normal(50))]
        first = write_rows_csv(self.dir / "one.csv", rows).read_bytes()
        second = write_rows_csv(self.dir / "two.csv", rows).read_bytes()
        self.assertEqual(first, second)

    def test_read_back_exact(self):
        rows = [{"rep": 0, "v": 0.1 + 0.2}, {"rep": 1, "v": -1e-300}]
        back = read_rows_csv(write_rows_csv(self.dir / "rows.csv", rows))
        self.assertEqual(back[0]["v"], 0.1 + 0.2)
        self.assertEqual(back[1]["v"], -1e-300)

    def test_read_requires_schema_line(self):
        path = self.dir / "plain.csv"
        path.write_text("a,b\n1,2\n")
        with self.assertRaises(ValueError):
            read_rows_csv(path)


class TestSummary(unittest.TestCase):

    def test_json_conversion(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_summary(Path(tmp) / "summary.json", {
                "zeta": 1, "alpha": np.array([1.0, float("nan")]), "kind": ExperimentKind.COV_TABLE,
                "ok": np.bool_(False),
            })
            text = path.read_text()
            data = json.loads(text)
        self.assertEqual(list(data), ["alpha", "kind", "ok", "zeta"])
        self.assertEqual(data["alpha"], [1.0, "nan"])
        self.assertEqual(data["kind"], "cov-table")
        self.assertIs(data["ok"], False)
        self.assertTrue(text.endswith("\n"))


if __name__ == "__main__":
    unittest.main()
