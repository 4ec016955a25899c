# ruff: noqa: D102
import math
import unittest
from fractions import Fraction
from unittest import mock

import numpy as np

from integrators.core.config import SolverConfig
from integrators.problems.kepler import kepler_initial, kepler_system
from integrators.problems.oscillator import harmonic_oscillator
from integrators.utils.validations import ValidationError

from . import underlying as ul


def _growth(x):
    return np.asarray(x, dtype=np.float64)


def _decay(x):
    return -np.asarray(x, dtype=np.float64)


def _global_error(method: ul.OneStepMethod, steps: int) -> float:
    """Integrate ẋ = x from 1 over [0, 1] and compare with e."""
    h = 1.0 / steps
    x = np.array([1.0])
    for _ in range(steps):
        x = ul.rk_step(method, _growth, x, h, SolverConfig())
    return abs(float(x[0]) - math.e)


class TableauTestCase(unittest.TestCase):
    def test_rk4_coefficients(self):
        tableau = ul.rk4_tableau()
        self.assertEqual(tableau.stages, 4)
        np.testing.assert_array_equal(tableau.b, [1 / 6, 1 / 3, 1 / 3, 1 / 6])
        self.assertEqual(tableau.a[1, 0], 0.5)
        self.assertEqual(tableau.a[2, 1], 0.5)
        self.assertEqual(tableau.a[3, 2], 1.0)
        self.assertEqual(np.count_nonzero(tableau.a), 3)
        np.testing.assert_array_equal(tableau.c, [0, 0.5, 0.5, 1])

    def test_rk6_coefficients(self):
        tableau = ul.rk6_tableau()
        self.assertEqual(tableau.stages, 7)
        self.assertEqual(tableau.b[0], 13 / 200)
        self.assertEqual(tableau.b[1], 0.0)
        expected_last_row = [
            Fraction(-261, 260),
            Fraction(33, 13),
            Fraction(43, 156),
            Fraction(-118, 39),
            Fraction(32, 195),
            Fraction(80, 39),
        ]
        np.testing.assert_allclose(
            tableau.a[6, :6], [float(v) for v in expected_last_row], rtol=1e-15
        )

    def test_weights_sum_to_one(self):
        tableaux = (ul.rk4_tableau(), ul.rk6_tableau(), ul.explicit_euler_tableau())
        for tableau in tableaux:
            self.assertAlmostEqual(float(np.sum(tableau.b)), 1.0, delta=1e-14)
            self.assertTrue(tableau.is_explicit)

    def test_inconsistent_weights(self):
        with self.assertRaises(ValidationError):
            ul.ButcherTableau(np.zeros((2, 2)), np.array([0.5, 0.4]), 1, "bad")

    def test_shape_mismatch(self):
        with self.assertRaises(ValidationError):
            ul.ButcherTableau(np.zeros((3, 3)), np.array([0.5, 0.5]), 1, "bad")

    def test_implicit_tableau_rejected(self):
        tableau = ul.ButcherTableau(np.array([[0.5]]), np.array([1.0]), 2, "mid")
        self.assertFalse(tableau.is_explicit)
        with self.assertRaises(ValidationError):
            ul.OneStepMethod(ul.MethodKind.EXPLICIT_RK, 2, tableau)


class RkStepTestCase(unittest.TestCase):
    def test_rk4_on_growth(self):
        h = 0.1
        y = ul.rk_step(ul.OneStepMethod.rk4(), _growth, np.array([1.0]), h, None)
        expected = 1 + h + h**2 / 2 + h**3 / 6 + h**4 / 24
        self.assertAlmostEqual(float(y[0]), expected, delta=1e-15)

    def test_zero_step(self):
        x = kepler_initial()
        system = kepler_system()
        for method in (
            ul.OneStepMethod.rk4(),
            ul.OneStepMethod.rk6(),
            ul.OneStepMethod.explicit_euler(),
            ul.OneStepMethod.implicit_midpoint(),
        ):
            with self.subTest(method=method.name):
                y = ul.rk_step(method, system.f, x, 0.0, SolverConfig())
                np.testing.assert_array_equal(y, x)

    def test_euler_on_kepler(self):
        system = kepler_system()
        y = ul.rk_step(
            ul.OneStepMethod.explicit_euler(),
            system.f,
            kepler_initial(),
            0.01,
            SolverConfig(),
        )
        expected = np.array([0.4, 0.0, 0.0, 2.0]) + 0.01 * np.array(
            [0.0, 2.0, -6.25, 0.0]
        )
        np.testing.assert_allclose(y, expected, rtol=0, atol=1e-15)

    def test_midpoint_on_decay(self):
        y = ul.rk_step(
            ul.OneStepMethod.implicit_midpoint(),
            _decay,
            np.array([1.0]),
            0.1,
            SolverConfig(),
        )
        self.assertAlmostEqual(float(y[0]), 0.95 / 1.05, delta=1e-13)

    def test_midpoint_is_symmetric(self):
        system = harmonic_oscillator()
        method = ul.OneStepMethod.implicit_midpoint()
        x = np.array([0.3, -0.8])
        y = ul.rk_step(method, system.f, x, 0.1, SolverConfig())
        back = ul.rk_step(method, system.f, y, -0.1, SolverConfig())
        np.testing.assert_allclose(back, x, rtol=0, atol=1e-13)

    def test_explicit_never_solves(self):
        system = kepler_system()
        with mock.patch.object(ul, "solve") as solve:
            for method in (ul.OneStepMethod.rk4(), ul.OneStepMethod.rk6()):
                ul.rk_step(method, system.f, kepler_initial(), 0.1, SolverConfig())
                _, report = ul.rk_increment(
                    method, system.f, kepler_initial(), 0.1, SolverConfig()
                )
                self.assertIsNone(report)
        solve.assert_not_called()

    def test_nan_step_rejected(self):
        with self.assertRaises(ValidationError):
            ul.rk_step(ul.OneStepMethod.rk4(), _growth, np.ones(1), math.nan, None)


class OrderTestCase(unittest.TestCase):
    def _slopes(self, method: ul.OneStepMethod, steps: list[int]) -> list[float]:
        errors = [_global_error(method, n) for n in steps]
        return [math.log2(a / b) for a, b in zip(errors, errors[1:])]

    def test_rk4_order(self):
        for slope in self._slopes(ul.OneStepMethod.rk4(), [10, 20, 40, 80]):
            self.assertAlmostEqual(slope, 4.0, delta=0.3)

    def test_rk6_order(self):
        for slope in self._slopes(ul.OneStepMethod.rk6(), [5, 10, 20]):
            self.assertAlmostEqual(slope, 6.0, delta=0.5)

    def test_rk6_local_error(self):
        method = ul.OneStepMethod.rk6()
        errors = [
            abs(
                float(ul.rk_step(method, _growth, np.array([1.0]), h, None)[0])
                - math.exp(h)
            )
            for h in (0.4, 0.2)
        ]
        self.assertAlmostEqual(math.log2(errors[0] / errors[1]), 7.0, delta=0.5)

    def test_midpoint_order(self):
        for slope in self._slopes(ul.OneStepMethod.implicit_midpoint(), [10, 20, 40]):
            self.assertAlmostEqual(slope, 2.0, delta=0.1)


class TwoPointIncrementTestCase(unittest.TestCase):
    def test_midpoint_uses_average(self):
        g = ul.two_point_increment(
            ul.OneStepMethod.implicit_midpoint(),
            _decay,
            np.array([1.0]),
            np.array([3.0]),
            0.1,
        )
        np.testing.assert_array_equal(g, [-2.0])

    def test_explicit_ignores_endpoint(self):
        method = ul.OneStepMethod.rk4()
        x = np.array([1.0])
        first = ul.two_point_increment(method, _growth, x, np.array([5.0]), 0.1)
        second = ul.two_point_increment(method, _growth, x, np.array([-5.0]), 0.1)
        np.testing.assert_array_equal(first, second)

    def test_solved_increment_matches_step(self):
        system = kepler_system()
        method = ul.OneStepMethod.implicit_midpoint()
        x = kepler_initial()
        g, report = ul.rk_increment(method, system.f, x, 0.05, SolverConfig())
        np.testing.assert_allclose(x + 0.05 * g, report.solution, rtol=0, atol=1e-13)
