# ruff: noqa: D102
import math
from unittest import TestCase

import numpy as np

from . import validations as v
from .format import fmt_float


class ScalarValidationTestCase(TestCase):
    def test_is_positive_true(self):
        self.assertTrue(v.is_positive(1e-14))

    def test_is_positive_false(self):
        self.assertFalse(v.is_positive(0.0))
        self.assertFalse(v.is_positive(-1))
        self.assertFalse(v.is_positive(math.inf))
        self.assertFalse(v.is_positive("foo"))

    def test_validate_positive(self):
        self.assertEqual(v.validate_positive(2), 2.0)

    def test_validate_positive_raises(self):
        with self.assertRaises(v.ValidationError):
            v.validate_positive(-1.0, "tolerance")

    def test_validate_finite_raises(self):
        with self.assertRaises(v.ValidationError):
            v.validate_finite(math.nan)
        with self.assertRaises(v.ValidationError):
            v.validate_finite("foo")


class VectorValidationTestCase(TestCase):
    def test_is_finite_vector_true(self):
        self.assertTrue(v.is_finite_vector([1.0, 2.0]))

    def test_is_finite_vector_false(self):
        self.assertFalse(v.is_finite_vector([1.0, math.nan]))
        self.assertFalse(v.is_finite_vector([[1.0]]))

    def test_validate_finite_vector(self):
        result = v.validate_finite_vector([1, 2, 3], dimension=3)
        self.assertEqual(result.dtype, np.float64)
        np.testing.assert_array_equal(result, [1.0, 2.0, 3.0])

    def test_validate_finite_vector_raises_dimension(self):
        with self.assertRaises(v.DimensionMismatch):
            v.validate_finite_vector([1.0, 2.0], dimension=3)

    def test_validate_finite_vector_raises_inf(self):
        with self.assertRaises(v.ValidationError):
            v.validate_finite_vector([1.0, math.inf])

    def test_dimension_mismatch_is_validation_error(self):
        self.assertTrue(issubclass(v.DimensionMismatch, v.ValidationError))
        self.assertTrue(issubclass(v.DimensionMismatch, ValueError))


class MatrixValidationTestCase(TestCase):
    def test_validate_square(self):
        result = v.validate_square([[1, 2], [3, 4]])
        self.assertEqual(result.shape, (2, 2))

    def test_validate_square_raises(self):
        with self.assertRaises(v.DimensionMismatch):
            v.validate_square([[1, 2, 3], [4, 5, 6]])

    def test_validate_matrix_raises_vector(self):
        with self.assertRaises(v.ValidationError):
            v.validate_matrix([1.0, 2.0])

    def test_validate_same_shape_raises(self):
        with self.assertRaises(v.DimensionMismatch):
            v.validate_same_shape(np.zeros((3, 2)), np.zeros((3, 1)))


class FormatTestCase(TestCase):
    def test_fmt_float_round_trips(self):
        for value in (0.1, 2 * math.pi / 50, -6.25, 1e-300):
            self.assertEqual(float(fmt_float(value)), value)

    def test_fmt_float_integral(self):
        self.assertEqual(fmt_float(2.0), "2")
