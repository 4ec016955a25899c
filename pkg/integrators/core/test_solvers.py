# ruff: noqa: D102
import unittest

import numpy as np

from . import solvers as so
from .config import SolverConfig, SolverStrategy
from .errors import SingularMatrix, SolverDiverged


class FixedPointSolveTestCase(unittest.TestCase):
    def test_identity(self):
        x0 = np.array([3.0, -1.0])
        report = so.fixed_point_solve(lambda z: z, x0, SolverConfig())
        self.assertTrue(report.converged)
        self.assertEqual(report.iterations, 1)
        self.assertEqual(report.final_residual, 0.0)

    def test_contraction(self):
        report = so.fixed_point_solve(
            lambda z: z / 2 + 1, 0.0, SolverConfig(tolerance=1e-12)
        )
        self.assertTrue(report.converged)
        self.assertAlmostEqual(float(report.solution[0]), 2.0, delta=1e-11)

    def test_expansion_does_not_converge(self):
        report = so.fixed_point_solve(lambda z: 3 * z, 1.0, SolverConfig())
        self.assertFalse(report.converged)
        self.assertEqual(report.iterations, 50)

    def test_nan_raises(self):
        with self.assertRaises(SolverDiverged) as context:
            so.fixed_point_solve(lambda z: z * np.nan, 1.0, SolverConfig())
        self.assertEqual(context.exception.iterations, 1)

    def test_deterministic(self):
        first = so.fixed_point_solve(np.cos, 0.5, SolverConfig(tolerance=1e-13))
        second = so.fixed_point_solve(np.cos, 0.5, SolverConfig(tolerance=1e-13))
        self.assertEqual(first.solution.tobytes(), second.solution.tobytes())
        self.assertEqual(first.iterations, second.iterations)


class NewtonSolveTestCase(unittest.TestCase):
    def test_linear_one_iteration(self):
        report = so.newton_solve(lambda z: z - 2, 0.0, SolverConfig(tolerance=1e-6))
        self.assertTrue(report.converged)
        self.assertEqual(report.iterations, 1)
        self.assertAlmostEqual(float(report.solution[0]), 2.0, delta=1e-6)

    def test_linear_tight(self):
        report = so.newton_solve(lambda z: z - 2, 0.0, SolverConfig())
        self.assertLessEqual(report.iterations, 3)
        self.assertAlmostEqual(float(report.solution[0]), 2.0, delta=1e-14)

    def test_square_root(self):
        report = so.newton_solve(
            lambda z: z**2 - 4, 3.0, SolverConfig(tolerance=1e-12)
        )
        self.assertTrue(report.converged)
        self.assertLessEqual(report.iterations, 8)
        self.assertAlmostEqual(float(report.solution[0]), 2.0, delta=1e-12)

    def test_root_at_start(self):
        report = so.newton_solve(lambda z: z**3, np.zeros(2), SolverConfig())
        self.assertTrue(report.converged)
        self.assertEqual(report.iterations, 0)

    def test_system(self):
        def residual(z):
            return np.array([z[0] ** 2 + z[1] ** 2 - 1.0, z[0] - z[1]])

        report = so.newton_solve(residual, np.array([1.0, 0.5]), SolverConfig())
        np.testing.assert_allclose(report.solution, [0.5**0.5] * 2, atol=1e-14)

    def test_singular_jacobian(self):
        with self.assertRaises(SingularMatrix):
            so.newton_solve(lambda z: np.array([1.0]), 0.0, SolverConfig())

    def test_max_iterations(self):
        report = so.newton_solve(
            lambda z: np.arctan(z), 1.5, SolverConfig(max_iterations=1)
        )
        self.assertFalse(report.converged)
        self.assertEqual(report.iterations, 1)


class SolveTestCase(unittest.TestCase):
    def test_dispatch_fixed_point(self):
        config = SolverConfig(
            strategy=SolverStrategy.FIXED_POINT, tolerance=1e-13, max_iterations=200
        )
        report = so.solve(config, 0.0, lambda z: z - np.cos(z), np.cos)
        self.assertAlmostEqual(float(report.solution[0]), 0.7390851332151607, 12)

    def test_fixed_point_without_map_uses_newton(self):
        config = SolverConfig(strategy=SolverStrategy.FIXED_POINT)
        report = so.solve(config, 3.0, lambda z: z**2 - 4)
        self.assertAlmostEqual(float(report.solution[0]), 2.0, delta=1e-14)

    def test_strategies_agree(self):
        newton = so.solve(SolverConfig(), 0.0, lambda z: z - np.cos(z), np.cos)
        fixed = so.solve(
            SolverConfig(strategy=SolverStrategy.FIXED_POINT, max_iterations=200),
            0.0,
            lambda z: z - np.cos(z),
            np.cos,
        )
        self.assertAlmostEqual(
            float(newton.solution[0]), float(fixed.solution[0]), delta=1e-12
        )

    def test_accept_close_enough(self):
        report = so.SolveReport(np.zeros(1), 50, 1e-12, False)
        self.assertIs(so.accept(report, SolverConfig()), report)

    def test_reject_far(self):
        report = so.SolveReport(np.zeros(1), 50, 1e-3, False)
        with self.assertRaises(SolverDiverged) as context:
            so.accept(report, SolverConfig())
        self.assertEqual(context.exception.iterations, 50)

    def test_diverging_fixed_point_raises(self):
        config = SolverConfig(strategy=SolverStrategy.FIXED_POINT)
        with self.assertRaises(SolverDiverged):
            so.solve(config, 1.0, lambda z: -2 * z, lambda z: 3 * z)
