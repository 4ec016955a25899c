# ruff: noqa: D102
import unittest

import numpy as np

from . import systems as s
from .errors import DimensionMismatch, ValidationError


def _half_norm_squared(dimension: int) -> s.OdeSystem:
    energy = s.FirstIntegral(
        "I",
        lambda x: 0.5 * float(x @ x),
        lambda x: np.array(x, dtype=np.float64),
    )
    return s.OdeSystem("ball", dimension, lambda x: -x, (energy,))


class AsStateTestCase(unittest.TestCase):
    def test_read_only_copy(self):
        source = [1.0, 2.0]
        state = s.as_state(source, 2)
        self.assertFalse(state.flags.writeable)
        np.testing.assert_array_equal(state, [1.0, 2.0])

    def test_rejects_nan(self):
        with self.assertRaises(ValidationError):
            s.as_state([1.0, np.nan])

    def test_rejects_wrong_dimension(self):
        with self.assertRaises(DimensionMismatch):
            s.as_state([1.0, 2.0], 4)


class OdeSystemTestCase(unittest.TestCase):
    def test_rejects_bad_dimension(self):
        with self.assertRaises(ValidationError):
            s.OdeSystem("bad", 0, lambda x: x)

    def test_f_checks_output_dimension(self):
        system = s.OdeSystem("bad", 2, lambda x: np.zeros(3))
        with self.assertRaises(DimensionMismatch):
            system.f(np.zeros(2))

    def test_select(self):
        system = _half_norm_squared(3)
        self.assertEqual(system.select([0]).n_integrals, 1)
        self.assertEqual(system.select([]).n_integrals, 0)

    def test_select_out_of_range(self):
        with self.assertRaises(ValidationError):
            _half_norm_squared(3).select([1])


class EvaluateIntegralsTestCase(unittest.TestCase):
    def test_no_integrals(self):
        system = s.OdeSystem("free", 2, lambda x: x)
        self.assertEqual(s.evaluate_integrals(system, np.ones(2)).shape, (0,))

    def test_quadratic(self):
        result = s.evaluate_integrals(_half_norm_squared(2), np.array([1.0, 0.0]))
        np.testing.assert_array_equal(result, [0.5])

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            s.evaluate_integrals(_half_norm_squared(2), np.ones(3))

    def test_pure(self):
        system = _half_norm_squared(3)
        x = np.array([0.1, -0.7, 2.3])
        first = s.evaluate_integrals(system, x)
        second = s.evaluate_integrals(system, x)
        self.assertEqual(first.tobytes(), second.tobytes())


class CheckGradientTestCase(unittest.TestCase):
    def test_quadratic_exact(self):
        integral = _half_norm_squared(3).integrals[0]
        deviation = s.check_gradient(integral, np.array([1.0, 2.0, 3.0]), 1e-6)
        self.assertLessEqual(deviation, 1e-8)

    def test_detects_wrong_gradient(self):
        wrong = s.FirstIntegral("I", lambda x: float(x @ x), lambda x: x)
        self.assertGreater(s.check_gradient(wrong, np.array([1.0, 1.0]), 1e-6), 0.5)

    def test_rejects_non_positive_eps(self):
        integral = _half_norm_squared(1).integrals[0]
        with self.assertRaises(ValidationError):
            s.check_gradient(integral, np.ones(1), 0.0)
