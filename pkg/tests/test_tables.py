"""Full reproduction of the reference tables and the identity suite over their states."""
import unittest

from confinium.eigensolve import solve_bound_states
from confinium.observables import expectation_set, virial_report
from confinium.report import TABLE_IDS, load_references, reproduce_table, summarize


def find(rows, state, params, quantity):
    (row,) = [r for r in rows if r.reference.state.label == state and r.reference.params == params
              and r.reference.quantity == quantity and not r.reference.literature]
    return row


class TestTables(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.references = load_references()
        cls.rows = {table_id: reproduce_table(table_id, include_literature=True, references=cls.references)
                    for table_id in TABLE_IDS}

    def assertTablePasses(self, table_id, disputed=0):
        rows = self.rows[table_id]
        failures = [(r.reference.state.label, r.reference.params, r.reference.quantity,
                     r.reference.value, r.computed, r.error)
                    for r in rows if not r.passed and not r.reference.disputed]
        self.assertEqual(failures, [])
        self.assertEqual(summarize(rows)["disputed"], disputed)

    def test_table_i(self):
        self.assertTablePasses("I", disputed=6)
        self.assertEqual(len([r for r in self.rows["I"] if not r.reference.literature]), 60)

    def test_table_ii(self):
        self.assertTablePasses("II", disputed=6)
        row = find(self.rows["II"], "2s", "rc=5", "energy")
        self.assertTrue(row.reference.disputed)
        self.assertAlmostEqual(row.computed, 3.5000012214561, delta=1e-9)
        self.assertAlmostEqual(find(self.rows["II"], "2s", "rc=5", "dV2").computed, 1.6249315715, delta=1e-8)

    def test_table_iii(self):
        self.assertTablePasses("III")
        self.assertAlmostEqual(find(self.rows["III"], "2p", "rc=inf", "dV2").computed, 1.0 / 48.0, delta=1e-9)

    def test_table_iv(self):
        self.assertTablePasses("IV")
        row = find(self.rows["IV"], "2p", "ra=2;rb=8", "energy")
        self.assertLess(abs(row.computed + 0.028352228), 1e-8)

    def test_table_v(self):
        self.assertTablePasses("V", disputed=60)
        row = find(self.rows["V"], "1s", "rc=1;k=2", "dV2")
        self.assertGreater(row.computed, 3.7)
        self.assertFalse(find(self.rows["V"], "1s", "rc=1;k=2", "energy").reference.disputed)

    def test_table_vi(self):
        self.assertTablePasses("VI", disputed=20)
        row = find(self.rows["VI"], "1s", "V0=0;rc=5.77827", "energy")
        self.assertLess(abs(row.computed + 0.9998090) / 0.9998090, 1e-4)

    def test_table_vii(self):
        self.assertTablePasses("VII", disputed=10)
        row = find(self.rows["VII"], "1s", "rc=5;U0=10;w=1000", "energy")
        self.assertLess(abs(row.computed + 0.4974755) / 0.4974755, 1e-5)
        row = find(self.rows["VII"], "1s", "rc=1;U0=10;w=1000", "energy")
        self.assertLess(abs(row.computed - 1.14719324) / 1.14719324, 1e-5)

    def test_identities_hold_for_every_tabulated_state(self):
        cells = dict.fromkeys((e.system, e.state) for e in self.references)
        for sys, st in cells:
            with self.subTest(system=sys.describe(), state=st.label):
                es = solve_bound_states(sys, st.n_index + 1)[st.n_index]
                self.assertEqual(es.node_count, st.n_index)
                report = virial_report(sys, es)
                checks = report.checks(expectation_set(sys, es).t2)
                self.assertEqual(checks, {"spread": True, "t2_gap": True, "dH2": True})


if __name__ == '__main__':
    unittest.main()
