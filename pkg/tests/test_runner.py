"""End-to-end tests for the experiment runner and the report."""

import json
import math
import os
import tempfile
import unittest
from src.exceptions import ExperimentError, InvalidArgumentError
from src.experiments.report import format_table, load_results, render_report
from src.experiments.runner import TABLE_COLUMNS, run_experiment
from src.infrastructure.cache.reference_cache import ReferenceCache
from src.infrastructure.config.experiment_config import ExperimentConfig
from src.infrastructure.files.dumps import read_table

SMALL_DIFFUSION = {
    'problem': 'diffusion-2d',
    'seed': 3,
    'mesh': {'n_x': 24, 'n_y': 6},
    'stochastic': {'dim': 3, 'order': 2},
    'reference': {'method': 'sparse-grid', 'level': 3},
    'dd': {'n_subdomains': [3], 'reduced_dims': [1, 3], 'level': 3, 'order': 2},
    'metrics': {'pdf_samples': 400, 'eps_samples': 50},
}

SMALL_RICHARDS = {
    'problem': 'richards-linear-1d',
    'seed': 5,
    'mesh': {'n_elements': 40},
    'stochastic': {'dim': 3, 'order': 2},
    'reference': {'method': 'monte-carlo', 'samples': 60},
    'dd': {'n_subdomains': [1, 2], 'reduced_dims': [2], 'level': 2, 'order': 1},
    'metrics': {'pdf_samples': 300, 'eps_samples': 30},
}


class TestRunExperiment(unittest.TestCase):
    """Test cases for run_experiment."""

    def setUp(self):
        """Temporary output and cache directories."""
        # pylint: disable=consider-using-with
        self.test_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        """Clean up the temporary directory."""
        self.test_dir.cleanup()

    def _config(self, raw, name):
        return ExperimentConfig.from_dict(raw, output_dir=os.path.join(self.test_dir.name, name))

    def test_diffusion_outputs(self):
        """All output files are written and the table is plausible."""
        result = run_experiment(self._config(SMALL_DIFFUSION, 'diffusion'))
        out = result.output_dir
        for name in ('config.json', 'mean.csv', 'std.csv', 'eps.csv', 'eigs_input.csv',
                     'kl_modes.csv', 'pdf_probe.csv', 'table.csv', 'ledger.json'):
            self.assertTrue(os.path.exists(os.path.join(out, name)), name)
        for name in ('partition.csv', 'eigs_0.csv', 'A_2.csv', 'pce_r1_0.csv', 'pce_r3_2.csv'):
            self.assertTrue(os.path.exists(os.path.join(out, 'nd3', name)), name)
        for r in (1, 3):
            for name in ('mean.csv', 'std.csv', 'eps.csv', 'pdf_probe.csv'):
                path = os.path.join(out, 'nd3', f'r{r}', name)
                self.assertTrue(os.path.exists(path), path)

        self.assertEqual(len(result.table), 2)
        full = result.table[1]
        self.assertEqual(full[:2], [3, 3])
        self.assertLess(full[2], 1.0)
        self.assertLess(full[3], 10.0)
        self.assertGreater(full[4], 0.0)
        self.assertEqual(list(read_table(os.path.join(out, 'table.csv'))[0]), TABLE_COLUMNS)

        ledger = result.ledger
        self.assertFalse(ledger['reference']['cached'])
        self.assertEqual(ledger['reference']['method'], 'sparse-grid')
        self.assertEqual(ledger['gaussian']['solves']['gaussian'], 7)
        self.assertEqual(len(ledger['cells']), 2)
        sources = {row['source'] for row in read_table(os.path.join(out, 'pdf_probe.csv'))}
        self.assertEqual(sources, {'reference', 'adapted'})

    def test_error_field_per_cell(self):
        """Every cell writes its own error field and keeping all directions shrinks it."""
        result = run_experiment(self._config(SMALL_DIFFUSION, 'cells'))
        totals = {}
        for r in (1, 3):
            rows = read_table(os.path.join(result.output_dir, 'nd3', f'r{r}', 'eps.csv'))
            totals[r] = sum(float(row['eps']) for row in rows)
        self.assertLess(totals[3], totals[1])
        with open(os.path.join(result.output_dir, 'eps.csv'), encoding='utf-8') as last, \
                open(os.path.join(result.output_dir, 'nd3', 'r3', 'eps.csv'),
                     encoding='utf-8') as cell:
            self.assertEqual(last.read(), cell.read())

    def test_probe_on_boundary_moves_inside(self):
        """A probe on a Dirichlet node is snapped to the nearest free node."""
        raw = dict(SMALL_RICHARDS, metrics={'probe': [0.0], 'pdf_samples': 300,
                                            'eps_samples': 30})
        result = run_experiment(self._config(raw, 'boundary'))
        self.assertEqual(result.ledger['probe_node'], 1)
        densities = [float(row['density']) for row in
                     read_table(os.path.join(result.output_dir, 'pdf_probe.csv'))]
        self.assertTrue(all(math.isfinite(value) for value in densities))

    def test_deterministic(self):
        """Two runs with the same seed write identical tables and moments."""
        first = run_experiment(self._config(SMALL_RICHARDS, 'one'))
        second = run_experiment(self._config(SMALL_RICHARDS, 'two'))
        self.assertEqual(first.table, second.table)
        for name in ('table.csv', 'mean.csv', 'std.csv', 'eps.csv'):
            with open(os.path.join(first.output_dir, name), encoding='utf-8') as a, \
                    open(os.path.join(second.output_dir, name), encoding='utf-8') as b:
                self.assertEqual(a.read(), b.read(), name)

    def test_reference_cache_hit(self):
        """A second run reuses the reference and charges the same flops."""
        cache = ReferenceCache(os.path.join(self.test_dir.name, 'cache'))
        first = run_experiment(self._config(SMALL_RICHARDS, 'one'), cache=cache)
        second = run_experiment(self._config(SMALL_RICHARDS, 'two'), cache=cache)
        self.assertFalse(first.ledger['reference']['cached'])
        self.assertTrue(second.ledger['reference']['cached'])
        self.assertAlmostEqual(first.ledger['reference']['total'],
                               second.ledger['reference']['total'])
        self.assertEqual(first.table, second.table)

    def test_failing_phase_is_named(self):
        """An impossible layout fails in the adaptation phase."""
        raw = dict(SMALL_DIFFUSION, dd={'n_subdomains': [5], 'reduced_dims': [1]})
        with self.assertRaises(ExperimentError) as context:
            run_experiment(self._config(raw, 'bad'))
        self.assertEqual(context.exception.phase, 'adaptation')


class TestReport(unittest.TestCase):
    """Test cases for the text report."""

    def setUp(self):
        """A minimal result directory."""
        # pylint: disable=consider-using-with
        self.test_dir = tempfile.TemporaryDirectory()
        directory = self.test_dir.name
        with open(os.path.join(directory, 'table.csv'), 'w', encoding='utf-8') as f:
            f.write('N_D,r,mu_e_pct,sigma_e_pct,CR\n3,4,0.0123,1.5,42.0\n')
        phases = {'reference': 100.0, 'gaussian': 0.0, 'subdomain': 0.0, 'interface': 0.0,
                  'projection': 0.0}
        empty = dict.fromkeys(phases, 0.0)
        ledger = {
            'seed': 1,
            'reference': {'flops': phases, 'method': 'sparse-grid'},
            'gaussian': {'flops': dict(empty, gaussian=10.0)},
            'cells': [{'N_D': 3, 'r': 4, 'ledger': {'flops': dict(empty, subdomain=5.0)},
                       'outer_residuals': [0.1, 0.001]}],
        }
        with open(os.path.join(directory, 'ledger.json'), 'w', encoding='utf-8') as f:
            json.dump(ledger, f)

    def tearDown(self):
        """Clean up the temporary directory."""
        self.test_dir.cleanup()

    def test_render(self):
        """The report shows the table, phase totals and outer residuals."""
        text = render_report(self.test_dir.name)
        self.assertIn('reference: sparse-grid', text)
        self.assertIn('42.0', text)
        self.assertIn('1.1500e+02', text)
        self.assertIn('outer residuals N_D=3 r=4: 1.00e-01, 1.00e-03', text)

    def test_table_alignment(self):
        """Every table line has the same width."""
        rows, _ = load_results(self.test_dir.name)
        lines = format_table(rows).splitlines()
        self.assertEqual(len({len(line) for line in lines}), 1)

    def test_missing_files(self):
        """A directory without results is an error."""
        with tempfile.TemporaryDirectory() as empty:
            with self.assertRaises(InvalidArgumentError):
                render_report(empty)


if __name__ == '__main__':
    unittest.main()
