"""Tests for the click command-line interface."""

import os
import tempfile
import unittest
from unittest.mock import patch
import yaml
from click.testing import CliRunner
from src.infrastructure.cache.reference_cache import ReferenceCache
from src.infrastructure.cli.cli import cli

APP_CONFIG = {'LOG_LEVEL': 'WARNING', 'OUTPUT_DIR': './results', 'MAX_WORKERS': 1}


@patch('src.infrastructure.cli.cli.configure_logger')
@patch('src.infrastructure.cli.cli.load_config', return_value=dict(APP_CONFIG))
class TestCli(unittest.TestCase):
    """Test cases for the chaos-dd commands."""

    def setUp(self):
        """Runner and a temporary working directory."""
        # pylint: disable=consider-using-with
        self.test_dir = tempfile.TemporaryDirectory()
        self.runner = CliRunner()

    def tearDown(self):
        """Clean up the temporary directory."""
        self.test_dir.cleanup()

    def test_grid_prints_point_count(self, *_):
        """Level 2 in ten dimensions has 21 points."""
        result = self.runner.invoke(cli, ['grid', '--dim', '10', '--level', '2'])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(result.output.strip(), '21')

    def test_grid_writes_file(self, *_):
        """--out writes one row per point plus a header."""
        out = os.path.join(self.test_dir.name, 'grid.csv')
        result = self.runner.invoke(cli, ['grid', '-d', '2', '-l', '3', '--out', out])
        self.assertEqual(result.exit_code, 0, result.output)
        with open(out, encoding='utf-8') as f:
            self.assertEqual(len(f.readlines()) - 1, int(result.output.strip()))

    def test_grid_rejects_bad_level(self, *_):
        """An invalid level exits with status 1."""
        result = self.runner.invoke(cli, ['grid', '--dim', '2', '--level', '0'])
        self.assertEqual(result.exit_code, 1)
        self.assertIn('Grid construction failed', result.output)

    def test_run_and_report(self, *_):
        """run writes results that report can render again."""
        config_path = os.path.join(self.test_dir.name, 'small.yml')
        output_dir = os.path.join(self.test_dir.name, 'out')
        with open(config_path, 'w', encoding='utf-8') as f:
            yaml.dump({
                'problem': 'richards-linear-1d',
                'mesh': {'n_elements': 20},
                'stochastic': {'dim': 2, 'order': 1},
                'reference': {'method': 'monte-carlo', 'samples': 20},
                'dd': {'n_subdomains': [2], 'reduced_dims': [1], 'level': 2, 'order': 1},
                'metrics': {'pdf_samples': 50, 'eps_samples': 10},
            }, f)
        result = self.runner.invoke(cli, ['run', '--config', config_path, '--output-dir',
                                          output_dir, '--no-cache'])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('sigma_e %', result.output)
        report = self.runner.invoke(cli, ['report', '--dir', output_dir])
        self.assertEqual(report.exit_code, 0, report.output)
        self.assertIn('Flops by phase', report.output)

    def test_run_with_invalid_config(self, *_):
        """Config errors are reported and exit with status 1."""
        config_path = os.path.join(self.test_dir.name, 'bad.yml')
        with open(config_path, 'w', encoding='utf-8') as f:
            f.write('problem: diffusion-2d\nmesh: {nx: 3}\n')
        result = self.runner.invoke(cli, ['run', '--config', config_path])
        self.assertEqual(result.exit_code, 1)
        self.assertIn("Unknown config key 'mesh.nx'", result.output)

    def test_report_missing_directory(self, *_):
        """Rendering a directory without results fails cleanly."""
        result = self.runner.invoke(cli, ['report', '--dir', self.test_dir.name])
        self.assertEqual(result.exit_code, 1)

    def test_config_show(self, *_):
        """The configuration is printed as YAML."""
        result = self.runner.invoke(cli, ['config', 'show'])
        self.assertEqual(result.exit_code, 0)
        self.assertIn('MAX_WORKERS: 1', result.output)

    def test_cache_show_and_reset(self, *_):
        """An empty cache is listed; reset asks for confirmation."""
        cache = ReferenceCache(cache_dir=self.test_dir.name)
        with patch('src.infrastructure.cli.cli.ReferenceCache', return_value=cache):
            shown = self.runner.invoke(cli, ['cache', 'show'])
            reset = self.runner.invoke(cli, ['cache', 'reset'], input='y\n')
        self.assertIn('No cached references.', shown.output)
        self.assertIn('0 entries removed', reset.output)


if __name__ == '__main__':
    unittest.main()
