# ruff: noqa: D102
import math
import unittest
from dataclasses import replace

import numpy as np

from integrators.core.config import SolverConfig
from integrators.methods.gradients import DiscreteGradientKind
from integrators.methods.presets import build_method
from integrators.methods.underlying import OneStepMethod, rk_step
from integrators.problems.kepler import PERIOD, kepler_initial, kepler_system
from integrators.utils.validations import ValidationError

from . import studies as st

H50 = 2 * math.pi / 50


class FitSlopeTestCase(unittest.TestCase):
    def test_power_law(self):
        hs = [0.1, 0.05, 0.025, 0.0125]
        errors = [3.0 * h**4 for h in hs]
        self.assertAlmostEqual(st.fit_slope(hs, errors), 4.0, delta=1e-12)

    def test_window(self):
        hs = [0.4, 0.2, 0.1, 0.05, 0.025]
        # The first point is above the window, the last on the roundoff floor.
        errors = [0.5, 2e-4, 1e-6, 5e-9, 1e-15]
        slope = st.fit_slope(hs, errors)
        expected = np.polyfit(np.log(hs[1:4]), np.log(errors[1:4]), 1)[0]
        self.assertAlmostEqual(slope, expected, delta=1e-12)

    def test_too_few_points(self):
        self.assertTrue(math.isnan(st.fit_slope([0.1], [1e-3])))
        self.assertTrue(math.isnan(st.fit_slope([0.1, 0.05], [1.0, 1e-13])))
        self.assertTrue(math.isnan(st.fit_slope([0.1, 0.05], [math.nan, 1e-5])))

    def test_lengths_must_match(self):
        with self.assertRaises(ValueError):
            st.fit_slope([0.1, 0.05], [1e-3])


class ReferenceStateTestCase(unittest.TestCase):
    def test_whole_periods(self):
        x0 = kepler_initial()
        self.assertIs(st.reference_state(kepler_system(), x0, PERIOD, 3), x0)

    def test_half_period(self):
        system = kepler_system()
        x0 = kepler_initial()
        x = st.reference_state(system, x0, PERIOD, 0.5)
        # Apoapsis of the e = 0.6 orbit.
        np.testing.assert_allclose(x, [-1.6, 0.0, 0.0, -0.5], rtol=0, atol=1e-9)


class OrderStudyTestCase(unittest.TestCase):
    def setUp(self):
        self.system = kepler_system()
        self.x0 = kepler_initial()

    def test_fourth_order_methods(self):
        specs = [build_method(name) for name in ("rk4", "a", "b", "c", "d")]
        rows = st.order_study(specs, self.system, self.x0, [50, 100, 200, 400, 800])
        self.assertEqual(len(rows), 25)
        for row in rows:
            with self.subTest(method=row.method_name, h=row.h):
                self.assertIsNone(row.failure)
                self.assertGreaterEqual(row.fitted_slope, 3.7)
                self.assertLessEqual(row.fitted_slope, 4.3)
        for name in ("rk4", "a", "b", "c", "d"):
            errors = [row.final_error for row in rows if row.method_name == name]
            self.assertGreater(errors[0], errors[-1])

    def test_sixth_order_methods(self):
        specs = [build_method(name) for name in ("a6", "b6", "c6", "d6")]
        rows = st.order_study(specs, self.system, self.x0, [20, 32, 50, 80, 128])
        for row in rows:
            with self.subTest(method=row.method_name, h=row.h):
                self.assertGreaterEqual(row.fitted_slope, 5.5)
                self.assertLessEqual(row.fitted_slope, 6.5)

    def test_grid_order_with_jobs(self):
        specs = [build_method("rk4"), build_method("b")]
        serial = st.order_study(specs, self.system, self.x0, [100, 50])
        threaded = st.order_study(specs, self.system, self.x0, [100, 50], jobs=3)
        self.assertEqual(
            [(row.method_name, row.h, row.final_error) for row in serial],
            [(row.method_name, row.h, row.final_error) for row in threaded],
        )
        np.testing.assert_array_equal(
            [row.fitted_slope for row in serial], [row.fitted_slope for row in threaded]
        )
        self.assertEqual(
            [(row.method_name, row.n_steps) for row in serial],
            [("rk4", 100), ("rk4", 50), ("b", 100), ("b", 50)],
        )
        self.assertEqual(serial[0].h, 2 * math.pi / 100)

    def test_periods(self):
        rows = st.order_study([build_method("rk4")], self.system, self.x0, [25], 2)
        self.assertEqual(rows[0].n_steps, 50)
        self.assertEqual(rows[0].h, 2 * math.pi / 25)

    def test_failed_cell(self):
        solver = SolverConfig(max_iterations=1, accept_tolerance=1e-14)
        spec = build_method("a", solver=solver)
        rows = st.order_study([spec], self.system, self.x0, [30])
        self.assertTrue(math.isnan(rows[0].final_error))
        self.assertIn("step 0", rows[0].failure)
        self.assertTrue(math.isnan(rows[0].fitted_slope))

    def test_bad_grid(self):
        spec = build_method("rk4")
        for counts in ([], [0], [10.0]):
            with self.subTest(counts=counts), self.assertRaises(ValidationError):
                st.order_study([spec], self.system, self.x0, counts)
        with self.assertRaises(ValidationError):
            st.order_study([spec], self.system, self.x0, [10], jobs=0)


class EquivalenceStudyTestCase(unittest.TestCase):
    def setUp(self):
        self.system = kepler_system()
        self.x0 = kepler_initial()

    def test_multi_integral_forms_agree(self):
        reference = build_method("b", (0, 1))
        variants = [build_method("b1", (0, 1)), build_method("b2", (0, 1))]
        result = st.equivalence_study(
            reference, variants, self.system, self.x0, H50, 3
        )
        self.assertEqual(result.reference_name, "b")
        self.assertEqual(set(result.single_step), {"b1", "b2"})
        for name, difference in result.single_step.items():
            with self.subTest(name=name):
                self.assertLessEqual(difference, 1e-10)
                self.assertEqual(result.differences[name].shape, (4,))
                self.assertEqual(result.differences[name][0], 0.0)

    def test_identical_specs(self):
        spec = build_method("c")
        result = st.equivalence_study(spec, [spec], self.system, self.x0, H50, 10)
        np.testing.assert_array_equal(result.differences["c"], np.zeros(11))
        self.assertEqual(result.single_step["c"], 0.0)

    def test_repeated_variants_are_kept(self):
        reference = build_method("b", (0,))
        itoh_abe = build_method("b1", (0,))
        gonzalez = replace(
            itoh_abe, discrete_gradients=(DiscreteGradientKind.gonzalez(),)
        )
        result = st.equivalence_study(
            reference, [itoh_abe, gonzalez, itoh_abe], self.system, self.x0, H50, 2
        )
        self.assertEqual(list(result.differences), ["b1", "b1#2", "b1#3"])
        self.assertEqual(list(result.single_step), ["b1", "b1#2", "b1#3"])
        np.testing.assert_array_equal(
            result.differences["b1"], result.differences["b1#3"]
        )

    def test_variant_labels(self):
        specs = [build_method(name) for name in ("b1", "b2", "b1", "b1")]
        self.assertEqual(st.variant_labels(specs), ["b1", "b2", "b1#2", "b1#3"])


class IntegralErrorStudyTestCase(unittest.TestCase):
    def setUp(self):
        self.system = kepler_system()
        self.x0 = kepler_initial()

    def test_method_b(self):
        series = st.integral_error_study(
            build_method("b"), self.system, self.x0, H50, 100
        )
        self.assertEqual(series.errors.shape, (101, 4))
        self.assertLessEqual(float(np.max(series.errors[:, :3])), 1e-12)
        self.assertEqual(series.integral_names, ("I1", "I2", "I3", "I4"))

    def test_previous_step_forms_stay_small(self):
        series = st.integral_error_study(
            build_method("b1", (0, 1)), self.system, self.x0, H50, 100
        )
        self.assertLessEqual(float(np.max(series.errors[:, :2])), 1e-10)

    def test_zero_step(self):
        series = st.integral_error_study(
            build_method("b"), self.system, self.x0, 0.0, 5
        )
        np.testing.assert_array_equal(series.errors, np.zeros((6, 4)))

    def test_unprojected(self):
        method, config = OneStepMethod.rk4(), SolverConfig()
        series = st.integral_error_study(
            build_method("rk4"), self.system, self.x0, H50, 2
        )
        x1 = rk_step(method, self.system.f, self.x0, H50, config)
        energy = self.system.integrals[0]
        self.assertAlmostEqual(
            series.errors[1, 0], abs(energy(x1) - energy(self.x0)), delta=1e-14
        )
