import dataclasses
import math
import unittest

import numpy as np

from confinium.eigensolve import solve_bound_states
from confinium.errors import ContractError, ParameterError
from confinium.grid import build_grid
from confinium.model import Domain, Kind, StateSpec, SystemSpec
from confinium.observables import (apply_kinetic, expectation_set, origin_values, schwartz_check, superpose,
                                   t_squared_via_energy, virial_report)


def state(kind, label, **params):
    st = StateSpec.parse(kind, label)
    sys = SystemSpec.make(kind, ell=st.ell, **params)
    return sys, solve_bound_states(sys, st.n_index + 1)[st.n_index]


def weighted_norm(grid, values):
    return math.sqrt(grid.inner(values, values))


class TestApplyKinetic(unittest.TestCase):
    def test_box_eigenfunction(self):
        grid = build_grid(Domain(0.0, 1.0), 32)
        psi = np.sin(math.pi * grid.nodes)
        residual = apply_kinetic(grid, psi, 0) - 0.5 * math.pi ** 2 * psi
        self.assertLess(weighted_norm(grid, residual), 1e-9)

    def test_free_oscillator_ground_state(self):
        sys, es = state(Kind.CHO1D, "n=0")
        x = es.grid.nodes
        residual = apply_kinetic(es.grid, es.psi, 0) - (0.5 - 0.5 * x ** 2) * es.psi
        self.assertLess(weighted_norm(es.grid, residual), 1e-8)

    def test_free_hydrogen_ground_state(self):
        sys, es = state(Kind.CHA, "1s")
        r = es.grid.nodes
        residual = apply_kinetic(es.grid, es.psi, 0) - (-0.5 + 1.0 / r) * es.psi
        self.assertLess(weighted_norm(es.grid, residual), 1e-8)

    def test_length_mismatch(self):
        grid = build_grid(Domain(0.0, 1.0), 16)
        with self.assertRaises(ParameterError):
            apply_kinetic(grid, np.ones(grid.size + 1), 0)


class TestExpectationSet(unittest.TestCase):
    def test_free_hydrogen(self):
        sys, es = state(Kind.CHA, "1s")
        moments = expectation_set(sys, es)
        self.assertAlmostEqual(moments.v, -1.0, delta=1e-8)
        self.assertAlmostEqual(moments.t, 0.5, delta=1e-8)
        self.assertAlmostEqual(moments.v2, 2.0, delta=1e-8)
        self.assertAlmostEqual(moments.t + moments.v, es.energy, delta=1e-9)

    def test_hard_kinds_have_no_confining_terms(self):
        sys, es = state(Kind.CHA, "1s", r_c=1.0)
        moments = expectation_set(sys, es)
        self.assertEqual(moments.v_conf, 0.0)
        self.assertEqual(moments.cross_vvc, 0.0)
        self.assertEqual(moments.v_interior, moments.v)

    def test_penetrable_split(self):
        sys, es = state(Kind.SPCHA, "1s", V0=0.5, r_c=3.0)
        moments = expectation_set(sys, es)
        self.assertGreater(moments.v_conf, 0.0)
        self.assertAlmostEqual(moments.v_interior + moments.v_conf, moments.v, delta=1e-12)

    def test_smooth_cavity_cross_term(self):
        sys, es = state(Kind.HICHA, "1s", r_c=1.0, k=2.0)
        moments = expectation_set(sys, es)
        self.assertLess(moments.cross_vvc, 0.0)

    def test_operator_orderings_agree(self):
        sys, es = state(Kind.CHO3D, "1s", r_c=1.0)
        moments = expectation_set(sys, es)
        self.assertAlmostEqual(moments.tv, moments.vt, delta=1e-6 * abs(moments.tv))

    def test_coulomb_orderings_agree(self):
        sys, es = state(Kind.CHA, "1s", r_c=1.0)
        moments = expectation_set(sys, es)
        self.assertAlmostEqual(moments.tv, moments.vt, delta=1e-7 * abs(moments.tv))

    def test_origin_values(self):
        sys, es = state(Kind.CHA, "1s")
        slope, t0, v0 = origin_values(sys, es.grid, es.psi)
        self.assertAlmostEqual(slope, 2.0, delta=1e-7)
        self.assertAlmostEqual(v0, -2.0, delta=1e-7)
        self.assertAlmostEqual(t0, 2.0, delta=1e-5)
        sys_p, es_p = state(Kind.CHA, "2p")
        self.assertIsNone(origin_values(sys_p, es_p.grid, es_p.psi))
        sys_s, es_s = state(Kind.SCHA, "1s", r_a=0.5, r_b=2.0)
        self.assertIsNone(origin_values(sys_s, es_s.grid, es_s.psi))

    def test_not_normalized(self):
        sys, es = state(Kind.CHA, "1s", r_c=1.0)
        with self.assertRaises(ContractError):
            expectation_set(sys, dataclasses.replace(es, psi=2.0 * es.psi))


class TestTSquared(unittest.TestCase):
    def test_closed_forms(self):
        self.assertEqual(t_squared_via_energy(-0.5, -1.0, 2.0), 1.25)
        self.assertEqual(t_squared_via_energy(0.5, 0.25, 3.0 / 16.0), 0.1875)

    def test_matches_direct_quadrature(self):
        sys, es = state(Kind.CHO1D, "n=0", x_c=0.5)
        self.assertLess(abs(es.energy - 4.9511293232) / 4.9511293232, 1e-9)
        moments = expectation_set(sys, es)
        shortcut = t_squared_via_energy(es.energy, moments.v, moments.v2)
        self.assertLess(abs(shortcut - moments.t2) / moments.t2, 1e-6)


class TestVirialReport(unittest.TestCase):
    def assertAllFour(self, report, expected, rtol):
        for name in ("dT2", "dV2", "cross1", "cross2"):
            value = getattr(report, name)
            self.assertLessEqual(abs(value - expected), rtol * abs(expected), msg=f"{name}={value}")

    def test_box_oscillator(self):
        sys, es = state(Kind.CHO1D, "n=0", x_c=1.0)
        self.assertAllFour(virial_report(sys, es), 0.0058688193, 1e-6)

    def test_hydrogen_2p_in_cavity(self):
        sys, es = state(Kind.CHA, "2p", r_c=5.0)
        report = virial_report(sys, es)
        self.assertAllFour(report, 0.0381647208, 1e-6)
        self.assertLessEqual(report.spread, 1e-6)

    def test_free_oscillator_3d(self):
        sys, es = state(Kind.CHO3D, "1s")
        self.assertAllFour(virial_report(sys, es), 0.375, 1e-8)

    def test_free_hydrogen(self):
        sys, es = state(Kind.CHA, "1s")
        self.assertAllFour(virial_report(sys, es), 1.0, 1e-8)

    def test_soft_barrier(self):
        sys, es = state(Kind.HPCHA, "1s", r_c=1.0)
        report = virial_report(sys, es)
        self.assertLess(abs(es.energy - 1.14719324) / 1.14719324, 1e-5)
        self.assertLessEqual(report.spread, 1e-6 * max(1.0, report.dV2))
        self.assertLessEqual(report.dH2, 1e-6 * max(1.0, es.energy ** 2))

    def test_eigenstate_checks_pass(self):
        sys, es = state(Kind.SCHA, "1s", r_a=0.5, r_b=2.0)
        moments = expectation_set(sys, es)
        checks = virial_report(sys, es).checks(moments.t2)
        self.assertEqual(checks, {"spread": True, "t2_gap": True, "dH2": True})

    def test_mixture_energy_variance(self):
        sys = SystemSpec.make(Kind.CHO1D, x_c=1.0)
        ground, excited = solve_bound_states(sys, 2)
        c = 0.01
        predicted = c * c * (excited.energy - ground.energy) ** 2 / (1.0 + c * c) ** 2
        report = virial_report(sys, superpose(ground, excited, c))
        self.assertGreater(report.dH2, 1e-4)
        self.assertLess(abs(report.dH2 - predicted) / predicted, 0.05)
        self.assertFalse(report.checks(expectation_set(sys, superpose(ground, excited, c)).t2)["dH2"])

    def test_superpose_requires_shared_grid(self):
        _, a = state(Kind.CHA, "1s", r_c=1.0)
        _, b = state(Kind.CHA, "1s", r_c=2.0)
        with self.assertRaises(ParameterError):
            superpose(a, b, 0.1)


class TestSchwartz(unittest.TestCase):
    def test_box_oscillator_excited(self):
        sys, es = state(Kind.CHO1D, "n=1", x_c=3.0)
        lhs, rhs = schwartz_check(sys, es)
        expected = 0.3353761814 ** 2
        self.assertLess(abs(lhs - expected) / expected, 1e-5)
        self.assertLess(abs(rhs - expected) / expected, 1e-5)

    def test_free_hydrogen_2s(self):
        sys, es = state(Kind.CHA, "2s")
        lhs, rhs = schwartz_check(sys, es)
        self.assertAlmostEqual(lhs, (3.0 / 16.0) ** 2, delta=1e-8)
        self.assertAlmostEqual(rhs, (3.0 / 16.0) ** 2, delta=1e-8)

    def test_mixture_strict(self):
        sys = SystemSpec.make(Kind.CHO1D, x_c=1.0)
        ground, excited = solve_bound_states(sys, 2)
        lhs, rhs = schwartz_check(sys, superpose(ground, excited, 0.01))
        self.assertGreater(lhs, rhs)


if __name__ == '__main__':
    unittest.main()
