"""Tests for the quadrature module."""

import os
import unittest
import numpy as np
from numpy.testing import assert_allclose
from src.exceptions import InvalidArgumentError
from src.quadrature import gauss_hermite_1d, integrate, smolyak_grid


class TestGaussHermite(unittest.TestCase):
    """Test cases for one-dimensional Gauss-Hermite rules."""

    def test_weights_sum_to_one(self):
        """Weights integrate the standard normal density to one."""
        for order in range(1, 8):
            self.assertAlmostEqual(gauss_hermite_1d(order).weights.sum(), 1.0, places=14)

    def test_exact_moments(self):
        """An m-point rule reproduces E[x^k] for k <= 2m - 1."""
        rule = gauss_hermite_1d(4)
        moments = {0: 1.0, 1: 0.0, 2: 1.0, 3: 0.0, 4: 3.0, 5: 0.0, 6: 15.0, 7: 0.0}
        for power, expected in moments.items():
            self.assertAlmostEqual(float(rule.weights @ rule.nodes ** power), expected, places=10)

    def test_symmetric_nodes(self):
        """Nodes are symmetric and odd rules contain zero exactly."""
        rule = gauss_hermite_1d(5)
        assert_allclose(rule.nodes, -rule.nodes[::-1], atol=0.0)
        self.assertEqual(rule.nodes[2], 0.0)

    def test_rejects_non_positive_order(self):
        """Order 0 is rejected."""
        with self.assertRaises(InvalidArgumentError):
            gauss_hermite_1d(0)


class TestSmolyakGrid(unittest.TestCase):
    """Test cases for the Smolyak combination rule."""

    def test_point_counts(self):
        """Point counts of the standard benchmark grids."""
        for (dim, level), count in {(10, 2): 21, (40, 2): 81, (5, 5): 781}.items():
            self.assertEqual(smolyak_grid(dim, level).size, count)

    @unittest.skipUnless(os.environ.get('CHAOS_DD_SLOW'), 'large grids are slow')
    def test_large_point_counts(self):
        """Level-5 grids in 10 and 15 dimensions."""
        self.assertEqual(smolyak_grid(10, 5).size, 8761)
        self.assertEqual(smolyak_grid(15, 5).size, 39941)

    def test_level_one_is_single_point(self):
        """Level 1 is the origin with unit weight."""
        grid = smolyak_grid(3, 1)
        assert_allclose(grid.points, np.zeros((1, 3)))
        assert_allclose(grid.weights, [1.0])

    def test_one_dimensional_grid_is_gauss_rule(self):
        """In one dimension the grid is the level-point Gauss rule."""
        grid = smolyak_grid(1, 4)
        rule = gauss_hermite_1d(4)
        assert_allclose(grid.points[:, 0], np.sort(rule.nodes), atol=1e-14)
        assert_allclose(grid.weights, rule.weights[np.argsort(rule.nodes)], atol=1e-14)

    def test_weights_sum_to_one(self):
        """Constants are integrated exactly."""
        self.assertAlmostEqual(smolyak_grid(4, 4).weights.sum(), 1.0, places=12)

    def test_total_degree_exactness(self):
        """Monomials of total degree <= 2l - 1 are integrated exactly."""
        grid = smolyak_grid(3, 3)
        x, y, z = grid.points.T
        self.assertAlmostEqual(integrate(grid, x ** 2 * y ** 2), 1.0, places=12)
        self.assertAlmostEqual(integrate(grid, x ** 4), 3.0, places=12)
        self.assertAlmostEqual(integrate(grid, x ** 2 * y ** 2 * z), 0.0, places=12)
        self.assertAlmostEqual(integrate(grid, x ** 3 * y), 0.0, places=12)

    def test_points_are_unique_and_sorted(self):
        """Merged nodes leave no duplicate points; rows are lexicographically sorted."""
        grid = smolyak_grid(3, 4)
        self.assertEqual(np.unique(grid.points, axis=0).shape[0], grid.size)
        order = np.lexsort(grid.points.T[::-1])
        assert_allclose(order, np.arange(grid.size))

    def test_deterministic(self):
        """Two builds are bitwise identical."""
        first, second = smolyak_grid(4, 3), smolyak_grid(4, 3)
        self.assertTrue(np.array_equal(first.points, second.points))
        self.assertTrue(np.array_equal(first.weights, second.weights))

    def test_rejects_bad_arguments(self):
        """Dimension and level must be positive integers."""
        with self.assertRaises(InvalidArgumentError):
            smolyak_grid(0, 2)
        with self.assertRaises(InvalidArgumentError):
            smolyak_grid(2, 0)

    def test_integrate_length_mismatch(self):
        """integrate checks the value count."""
        grid = smolyak_grid(2, 2)
        with self.assertRaises(InvalidArgumentError):
            integrate(grid, np.ones(grid.size + 1))


if __name__ == '__main__':
    unittest.main()
