import hashlib
import os
import shutil
import tempfile
import unittest
from collections import Counter

from confinium.errors import ParameterError
from confinium.hasher import Hasher
from confinium.model import Kind, StateSpec, SystemSpec
from confinium.report import (LAYOUTS, ReferenceEntry, compare, load_references, reference_digest, reproduce_table,
                              summarize, sweep)

HEADER = "table,state,param_list,quantity,value,digits,status\n"


def entry(value, digits, quantity="energy", status="ok", table_id="I"):
    sys = SystemSpec.make(Kind.CHO1D, x_c=1.0)
    return ReferenceEntry(table_id, sys, StateSpec(Kind.CHO1D, 0), quantity, value, digits, status, "xc=1")


class TestLoadReferences(unittest.TestCase):
    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def write(self, body):
        path = os.path.join(self.test_dir, "refs.csv")
        with open(path, "w") as f:
            f.write(HEADER + body)
        return path

    def test_packaged_counts(self):
        entries = load_references()
        body = Counter(e.table_id for e in entries if not e.literature)
        self.assertEqual(body, {"I": 60, "II": 90, "III": 90, "IV": 75, "V": 90, "VI": 90, "VII": 90})
        statuses = Counter(e.status for e in entries)
        self.assertEqual(statuses["disputed"], 100)
        self.assertEqual(statuses["literature_disputed"], 2)
        self.assertTrue(all(e.digits >= 3 for e in entries))

    def test_rydberg_barrier_converted(self):
        entries = [e for e in load_references() if e.table_id == "VI" and e.params == "V0=4;rc=5.75669"]
        self.assertTrue(entries)
        self.assertEqual(entries[0].system.V0, 2.0)
        self.assertEqual(entries[0].system.r_c, 5.75669)

    def test_state_sets_angular_momentum(self):
        entries = [e for e in load_references() if e.table_id == "III" and e.state.label == "2p"]
        self.assertTrue(all(e.system.ell == 1 for e in entries))

    def test_custom_file(self):
        path = self.write("# comment\nIII,2p,rc=inf,dV2,0.0208333333,9,ok\n")
        (ref,) = load_references(path)
        self.assertEqual(ref.state, StateSpec(Kind.CHA, 0, 1))
        self.assertEqual(ref.quantity, "dV2")

    def test_reference_digest(self):
        path = self.write("III,2p,rc=inf,dV2,0.0208333333,9,ok\n")
        with open(path, "rb") as f:
            self.assertEqual(reference_digest(path), hashlib.sha256(f.read()).hexdigest())
        packaged = reference_digest()
        self.assertEqual(len(packaged), 64)
        self.assertNotEqual(packaged, reference_digest(path))

    def test_too_few_digits(self):
        with self.assertRaises(ParameterError):
            load_references(self.write("I,n=0,xc=1,energy,1.3,2,ok\n"))

    def test_unknown_status(self):
        with self.assertRaises(ParameterError):
            load_references(self.write("I,n=0,xc=1,energy,1.298,4,maybe\n"))

    def test_unreadable_value(self):
        with self.assertRaises(ParameterError):
            load_references(self.write("I,n=0,xc=1,energy,one,4,ok\n"))

    def test_unknown_parameter(self):
        with self.assertRaises(ParameterError):
            load_references(self.write("I,n=0,width=1,energy,1.298,4,ok\n"))

    def test_missing_column(self):
        path = os.path.join(self.test_dir, "short.csv")
        with open(path, "w") as f:
            f.write("table,state,value\nI,n=0,1.0\n")
        with self.assertRaises(ParameterError):
            load_references(path)


class TestCompare(unittest.TestCase):
    def test_relative_pass(self):
        self.assertTrue(compare(entry(1.2984598320, 11), 1.29845983205).passed)

    def test_last_digit_floor(self):
        row = compare(entry(1.2345, 5), 1.23451)
        self.assertGreater(row.rel_err, LAYOUTS["I"].energy_rtol)
        self.assertTrue(row.passed)

    def test_truncated_print(self):
        self.assertTrue(compare(entry(0.124999, 6, "dV2"), 0.1249999).passed)

    def test_failure(self):
        row = compare(entry(1.2345, 5), 1.2347)
        self.assertFalse(row.passed)
        self.assertAlmostEqual(row.abs_err, 2e-4)

    def test_absolute_floor_for_tiny_values(self):
        self.assertTrue(compare(entry(1.82e-6, 3, "dV2"), 1.8205e-6).passed)

    def test_literature_tolerance(self):
        loose = entry(1.2990, 5, status="literature")
        self.assertFalse(compare(loose, 1.29846).passed)
        self.assertTrue(compare(entry(0.594, 3, status="literature", table_id="V"), 0.593771218).passed)

    def test_resolution(self):
        self.assertAlmostEqual(entry(4.4909017616, 11).resolution, 1e-10)
        self.assertAlmostEqual(entry(-0.028352228, 8).resolution, 1e-9)


class TestSummarize(unittest.TestCase):
    def test_disputed_excluded(self):
        rows = [compare(entry(1.2345, 5), 1.2345), compare(entry(1.2345, 5), 2.0),
                compare(entry(1.2345, 5, status="disputed"), 2.0)]
        self.assertEqual(summarize(rows), {"pass": 1, "fail": 1, "disputed": 1})


class TestReproduceTable(unittest.TestCase):
    def test_unknown_table(self):
        with self.assertRaises(ParameterError):
            reproduce_table("IX")

    def test_invalid_jobs(self):
        with self.assertRaises(ParameterError):
            reproduce_table("I", jobs=0)

    def test_parallel_matches_serial(self):
        subset = [e for e in load_references() if e.table_id == "III" and e.params in ("rc=1", "rc=0.5")]
        serial = reproduce_table("III", references=subset)
        parallel = reproduce_table("III", references=subset, jobs=3)
        self.assertEqual(len(serial), 30)
        self.assertEqual(Hasher.canonical_json([r.to_dict() for r in serial]),
                         Hasher.canonical_json([r.to_dict() for r in parallel]))
        self.assertTrue(all(r.passed for r in serial))

    def test_literature_rows_optional(self):
        subset = [e for e in load_references() if e.table_id == "V" and e.params == "rc=1;k=2"]
        self.assertEqual(len(reproduce_table("V", references=subset)), 15)
        with_lit = reproduce_table("V", references=subset, include_literature=True)
        self.assertEqual(len(with_lit), 18)
        self.assertTrue(all(r.passed for r in with_lit))

    def test_failing_cell_reported(self):
        sys = SystemSpec.make(Kind.SPCHA, V0=0.0, r_c=0.5, ell=1)
        bad = ReferenceEntry("VI", sys, StateSpec(Kind.SPCHA, 0, 1), "energy", 0.1, 4, "ok", "V0=0;rc=0.5")
        (row,) = reproduce_table("VI", references=[bad])
        self.assertFalse(row.passed)
        self.assertIsNone(row.computed)
        self.assertIsNotNone(row.error)
        self.assertEqual(summarize([row])["fail"], 1)


class TestSweep(unittest.TestCase):
    def test_box_width_trend(self):
        points = sweep(SystemSpec.make(Kind.CHO1D), "x_c", [0.1, 0.5, 1, 3, 5], [StateSpec(Kind.CHO1D, 0)])
        dT2 = [p.report.dT2 for p in points]
        self.assertTrue(all(a < b for a, b in zip(dT2, dT2[1:])))

    def test_cavity_radius_trend(self):
        points = sweep(SystemSpec.make(Kind.CHA), "r_c", [0.1, 0.2, 0.5, 1, 5], [StateSpec(Kind.CHA, 0)])
        dT2 = [p.report.dT2 for p in points]
        self.assertTrue(all(a > b for a, b in zip(dT2, dT2[1:])))

    def test_smooth_cavity_energies(self):
        points = sweep(SystemSpec.make(Kind.HICHA), "r_c", [0.1, 1, "inf"], [StateSpec(Kind.HICHA, 0)],
                       energies_only=True)
        for point, expected in zip(points, (16.80524705, 0.593771218, -0.5)):
            self.assertLess(abs(point.energy - expected) / abs(expected), 1e-6)
            self.assertIsNone(point.report)

    def test_several_states_per_value(self):
        states = [StateSpec.parse(Kind.CHA, label) for label in ("1s", "2p")]
        points = sweep(SystemSpec.make(Kind.CHA), "r_c", [1.0, 2.0], states)
        self.assertEqual([(p.value, p.state.label) for p in points],
                         [(1.0, "1s"), (1.0, "2p"), (2.0, "1s"), (2.0, "2p")])
        self.assertEqual(points[1].system.ell, 1)

    def test_unknown_parameter(self):
        with self.assertRaises(ParameterError):
            sweep(SystemSpec.make(Kind.CHA), "x_c", [1.0], [StateSpec(Kind.CHA, 0)])

    def test_invalid_value_recorded(self):
        points = sweep(SystemSpec.make(Kind.CHO1D), "x_c", [-1.0, 1.0], [StateSpec(Kind.CHO1D, 0)])
        self.assertIn("ParameterError", points[0].error)
        self.assertIsNone(points[1].error)
        self.assertIn("dV2", points[1].to_dict())


if __name__ == '__main__':
    unittest.main()
