import json
import os
import shutil
import tempfile
import unittest
from io import StringIO
from unittest.mock import patch

import pandas as pd

from confinium.errors import NumericError
from confinium.reporter import Reporter


def table_row(state, params, quantity, computed, status="ok", passed=True, error=None):
    return {"table": "I", "system": {"kind": "cho1d", "omega": 1.0, "x_c": 1.0}, "state": state,
            "params": params, "quantity": quantity, "reference": 1.0, "digits": 10, "status": status,
            "computed": computed, "abs_err": None, "rel_err": None, "pass": passed, "error": error}


class TestReporter(unittest.TestCase):
    def setUp(self):
        self.test_dir = tempfile.mkdtemp()
        rows = [
            table_row("n=0", "xc=1", "energy", 1.298459832),
            table_row("n=0", "xc=3", "energy", 0.5000000001),
            table_row("n=0", "xc=1", "dV2", 0.02, status="disputed", passed=False),
            table_row("n=1", "xc=1", "energy", 5.0, passed=False),
            table_row("n=1", "xc=3", "energy", 1.5, status="literature"),
            table_row("n=1", "xc=1", "dV2", None, passed=False, error="ConvergenceError: no luck"),
        ]
        self.doc = Reporter.document("table", {"table_id": "I"}, rows, {"pass": 2, "fail": 2, "disputed": 1})

    def tearDown(self):
        if os.path.exists(self.test_dir):
            shutil.rmtree(self.test_dir)

    def test_document(self):
        self.assertEqual(self.doc["command"], "table")
        self.assertEqual(len(self.doc["rows"]), 6)
        self.assertEqual(len(self.doc["digest"]), 64)
        other = Reporter.document("table", {"table_id": "II"}, self.doc["rows"], {})
        self.assertEqual(other["digest"], self.doc["digest"])

    def test_render_json(self):
        text = Reporter.render(self.doc, "json")
        self.assertEqual(json.loads(text), self.doc)
        self.assertEqual(text, Reporter.render(self.doc, "json"))

    def test_render_csv(self):
        frame = pd.read_csv(StringIO(Reporter.render(self.doc, "csv")))
        self.assertEqual(len(frame), 6)
        self.assertIn("system.kind", frame.columns)
        self.assertAlmostEqual(frame["computed"][0], 1.298459832, places=12)

    def test_render_table_text(self):
        text = Reporter.render(self.doc, "text", digits=6)
        self.assertIn("Table I", text)
        self.assertIn("xc=1", text)
        self.assertIn("xc=3", text)
        self.assertIn("1.29846", text)
        self.assertIn("0.02 ?", text)
        self.assertIn("5 *", text)
        self.assertIn("1.5 L", text)
        self.assertIn("ERROR", text)
        self.assertIn("ConvergenceError: no luck", text)
        self.assertTrue(text.endswith("Summary: pass=2, fail=2, disputed=1\n"))

    def test_render_solve_records(self):
        doc = Reporter.document("solve", {}, [{"state": "1s", "energy": -0.5, "pass": True}], {})
        text = Reporter.render(doc, "text")
        self.assertIn("energy  -0.5", text)
        self.assertIn("pass    true", text)

    def test_render_empty(self):
        doc = Reporter.document("sweep", {}, [], {})
        self.assertEqual(Reporter.render(doc, "text"), "No rows.\n")
        self.assertEqual(Reporter.render(doc, "csv"), "")

    def test_error_document(self):
        exc = NumericError("domain did not settle", {"rounds": 3, "last": float("inf")})
        doc = Reporter.error_document(exc)
        self.assertEqual(doc["error"]["type"], "NumericError")
        self.assertEqual(doc["error"]["diagnostics"], {"rounds": 3, "last": "inf"})
        self.assertEqual(Reporter.render(doc, "text"), "NumericError: domain did not settle\n")

    def test_invalid_format(self):
        with self.assertRaises(ValueError):
            Reporter.render(self.doc, "xml")

    def test_write(self):
        path = os.path.join(self.test_dir, "nested", "report.json")
        content = Reporter.write(self.doc, path, "json")
        with open(path) as f:
            self.assertEqual(f.read(), content)

        captured_output = StringIO()
        with patch("sys.stdout", captured_output):
            Reporter.write(self.doc, None, "text")
        self.assertIn("Table I", captured_output.getvalue())


if __name__ == "__main__":
    unittest.main()
