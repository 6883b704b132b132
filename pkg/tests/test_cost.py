"""Tests for the flop model and the cost ledger."""

import math
import unittest
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
import numpy as np
from src.exceptions import InvalidArgumentError
from src.experiments.cost import (
    CostLedger,
    cost_dd,
    cost_projection,
    cost_ratio,
    cost_reference,
    flops_lu,
)


class TestFlopModel(unittest.TestCase):
    """Test cases for the closed-form flop counts."""

    def test_flops_lu(self):
        """(2/3) n^3 + 2 n^2."""
        self.assertAlmostEqual(flops_lu(1), 8.0 / 3.0)
        self.assertAlmostEqual(flops_lu(10), 2000.0 / 3.0 + 200.0)
        with self.assertRaises(InvalidArgumentError):
            flops_lu(0)

    def test_reference_and_dd(self):
        """Reference cost scales with the point count; empty blocks are free."""
        self.assertAlmostEqual(cost_reference(21, 10), 21 * flops_lu(10))
        expected = 5 * (flops_lu(4) + flops_lu(2) + flops_lu(3) + flops_lu(2))
        self.assertAlmostEqual(cost_dd(5, [4, 3], 2), expected)
        self.assertAlmostEqual(cost_dd(5, [4, 0], 0), 5 * flops_lu(4))
        with self.assertRaises(InvalidArgumentError):
            cost_reference(0, 10)

    def test_projection(self):
        """Matrix and vector change-of-basis terms for two subdomains."""
        # N_D=2, Q=3, N=4, |Gamma|=5
        matrix = 2 * (1 * 3 * 4 * 49 + 2 * 3 * 25)
        vector = 2 * (1 * 3 * 4 * 9 + 2 * 3 * 5)
        self.assertEqual(cost_projection(2, 3, 4, 5), float(matrix + vector))

    def test_projection_worked_example(self):
        """N_D=3, Q=25, N=35, |Gamma|=25 against a hand recomputation."""
        # matrix: 3 * (2*25*35*1249 + 3*25*625) = 3 * (2185750 + 46875)
        # vector: 3 * (2*25*35*49 + 3*25*25) = 3 * (85750 + 1875)
        self.assertEqual(cost_projection(3, 25, 35, 25), 6697875.0 + 262875.0)
        self.assertAlmostEqual(cost_reference(21, 100) / 1.442e7, 1.0, places=3)

    def test_randomized_arguments(self):
        """Five random tuples per formula reproduce the expanded arithmetic."""
        rng = np.random.Generator(np.random.Philox(2024))
        for n in rng.integers(1, 500, size=5):
            n = int(n)
            exact = Fraction(2, 3) * n * n * n + 2 * n * n
            self.assertTrue(math.isclose(flops_lu(n), float(exact), rel_tol=1e-14))
        for _ in range(5):
            q_eta = int(rng.integers(1, 60))
            sizes = [int(size) for size in rng.integers(0, 200, size=int(rng.integers(1, 6)))]
            n_gamma = int(rng.integers(0, 40))
            interface = Fraction(2, 3) * n_gamma ** 3 + 2 * n_gamma ** 2
            exact = q_eta * sum(Fraction(2, 3) * n_i ** 3 + 2 * n_i ** 2 + interface
                                for n_i in sizes)
            self.assertTrue(math.isclose(cost_dd(q_eta, sizes, n_gamma), float(exact),
                                         rel_tol=1e-14))
        for _ in range(5):
            n_d, q_eta, n_terms, n_gamma = (int(v) for v in rng.integers(1, 50, size=4))
            per_subdomain = ((n_d - 1) * q_eta * n_terms * (2 * n_gamma * n_gamma - 1)
                             + n_d * q_eta * n_gamma * n_gamma
                             + (n_d - 1) * q_eta * n_terms * (2 * n_gamma - 1)
                             + n_d * q_eta * n_gamma)
            self.assertEqual(cost_projection(n_d, q_eta, n_terms, n_gamma),
                             float(n_d * per_subdomain))

    def test_ratio(self):
        """CR is a plain quotient; zero approximate cost is rejected."""
        self.assertEqual(cost_ratio(100.0, 4.0), 25.0)
        with self.assertRaises(InvalidArgumentError):
            cost_ratio(1.0, 0.0)


class TestCostLedger(unittest.TestCase):
    """Test cases for the CostLedger class."""

    def test_charge_and_total(self):
        """Solves, sizes and flops accumulate per phase."""
        ledger = CostLedger()
        ledger.charge('reference', 10)
        ledger.charge('reference', 10)
        ledger.charge('interface', 2)
        ledger.charge_flops('projection', 5.0)
        self.assertEqual(ledger.solves['reference'], 2)
        self.assertEqual(ledger.sizes[10], 2)
        self.assertAlmostEqual(ledger.total(), 2 * flops_lu(10) + flops_lu(2) + 5.0)
        self.assertAlmostEqual(ledger.total(('interface',)), flops_lu(2))

    def test_unknown_phase_and_negative_flops(self):
        """Only the known phases and non-negative work are accepted."""
        ledger = CostLedger()
        with self.assertRaises(InvalidArgumentError):
            ledger.charge('setup', 3)
        with self.assertRaises(InvalidArgumentError):
            ledger.charge_flops('projection', -1.0)

    def test_merge_and_dict(self):
        """Merging adds counters; to_dict is JSON ready."""
        first, second = CostLedger(), CostLedger()
        first.charge('subdomain', 3)
        second.charge('subdomain', 3)
        second.charge('gaussian', 4)
        first.merge(second)
        snapshot = first.to_dict()
        self.assertEqual(snapshot['solves']['subdomain'], 2)
        self.assertEqual(snapshot['sizes'], {'3': 2, '4': 1})
        self.assertAlmostEqual(snapshot['total'], 2 * flops_lu(3) + flops_lu(4))

    def test_thread_safety(self):
        """Concurrent charges are all counted."""
        ledger = CostLedger()
        with ThreadPoolExecutor(max_workers=4) as executor:
            list(executor.map(lambda _: ledger.charge('subdomain', 5), range(400)))
        self.assertEqual(ledger.solves['subdomain'], 400)
        self.assertAlmostEqual(ledger.flops['subdomain'], 400 * flops_lu(5))


if __name__ == '__main__':
    unittest.main()
