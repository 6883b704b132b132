"""Tests for the experiment_config module."""

import os
import tempfile
import unittest
from src.exceptions import InvalidArgumentError
from src.infrastructure.config.experiment_config import (
    ExperimentConfig,
    default_values,
    load_experiment_config,
)


class TestExperimentConfig(unittest.TestCase):
    """Test cases for ExperimentConfig."""

    def test_defaults_are_filled_in(self):
        """A bare problem name gets every section."""
        config = ExperimentConfig.from_dict({'problem': 'diffusion-2d'})
        self.assertTrue(config.is_2d)
        self.assertEqual(config.mesh['n_x'], 96)
        self.assertEqual(config.stochastic['dim'], 10)
        self.assertEqual(config.reference['method'], 'sparse-grid')
        self.assertEqual(config.gaussian['level'], 2)
        self.assertEqual(config.metrics['probe'], [24.0, 45.0])

    def test_nested_override(self):
        """Overrides replace single keys and leave siblings alone."""
        config = ExperimentConfig.from_dict({
            'problem': 'richards-linear-1d',
            'mesh': {'n_elements': 80},
            'dd': {'n_subdomains': [2], 'layout_overrides': {2: [2]}},
        })
        self.assertEqual(config.mesh, {'n_elements': 80, 'length': 10.0})
        self.assertEqual(config.dd['layout_overrides'], {2: [2]})
        self.assertEqual(config.dd['reduced_dims'], [5])
        self.assertFalse(config.is_2d)

    def test_unknown_keys(self):
        """Typos are reported with their dotted path."""
        with self.assertRaises(InvalidArgumentError) as context:
            ExperimentConfig.from_dict({'problem': 'diffusion-2d', 'mesh': {'nx': 10}})
        self.assertIn('mesh.nx', str(context.exception))
        with self.assertRaises(InvalidArgumentError):
            ExperimentConfig.from_dict({'problem': 'diffusion-2d', 'solver': {}})

    def test_invalid_values(self):
        """Out-of-range settings are rejected."""
        bad = [
            {'problem': 'heat-3d'},
            {'problem': 'diffusion-2d', 'dd': {'reduced_dims': [11]}},
            {'problem': 'diffusion-2d', 'gaussian': {'level': 1}},
            {'problem': 'diffusion-2d', 'reference': {'method': 'quasi-mc'}},
            {'problem': 'diffusion-2d', 'mesh': {'n_x': 0}},
            {'problem': 'diffusion-2d', 'field': {'layers': 'mixed'}},
            {'problem': 'diffusion-2d', 'dd': {'n_subdomains': []}},
            {'mesh': {}},
        ]
        for raw in bad:
            with self.assertRaises(InvalidArgumentError, msg=str(raw)):
                ExperimentConfig.from_dict(raw)

    def test_reference_key(self):
        """The seed only matters for Monte Carlo references."""
        sparse = ExperimentConfig.from_dict({'problem': 'diffusion-2d', 'seed': 1})
        other = ExperimentConfig.from_dict({'problem': 'diffusion-2d', 'seed': 2,
                                            'dd': {'reduced_dims': [2]}})
        self.assertEqual(sparse.reference_key(), other.reference_key())
        mc_one = ExperimentConfig.from_dict({'problem': 'richards-linear-1d', 'seed': 1})
        mc_two = ExperimentConfig.from_dict({'problem': 'richards-linear-1d', 'seed': 2})
        self.assertNotEqual(mc_one.reference_key(), mc_two.reference_key())

    def test_to_dict_is_a_copy(self):
        """Mutating the returned mapping leaves the config alone."""
        config = ExperimentConfig.from_dict({'problem': 'diffusion-2d'})
        values = config.to_dict()
        values['mesh']['n_x'] = 1
        self.assertEqual(config.mesh['n_x'], 96)

    def test_default_values_per_problem(self):
        """The nonlinear problem carries van Genuchten parameters."""
        values = default_values('richards-nonlinear-1d')
        self.assertEqual(values['physics']['n'], 1.3954)
        self.assertEqual(values['physics']['psi_top'], -0.35)


class TestLoadExperimentConfig(unittest.TestCase):
    """Test cases for reading config files."""

    def setUp(self):
        """Temporary directory for config files."""
        # pylint: disable=consider-using-with
        self.test_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        """Clean up the temporary directory."""
        self.test_dir.cleanup()

    def _write(self, name, text):
        path = os.path.join(self.test_dir.name, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def test_yaml_and_json(self):
        """Both formats load; --output-dir wins over the file."""
        yaml_path = self._write('a.yml', 'problem: richards-linear-1d\noutput_dir: out\nseed: 4\n')
        json_path = self._write('b.json', '{"problem": "richards-linear-1d", "seed": 4}')
        from_yaml = load_experiment_config(yaml_path, output_dir='elsewhere')
        from_json = load_experiment_config(json_path)
        self.assertEqual(from_yaml.output_dir, 'elsewhere')
        self.assertIsNone(from_json.output_dir)
        self.assertEqual(from_yaml.seed, from_json.seed)

    def test_missing_and_malformed(self):
        """Missing files and broken YAML raise InvalidArgumentError."""
        with self.assertRaises(InvalidArgumentError):
            load_experiment_config(os.path.join(self.test_dir.name, 'none.yml'))
        with self.assertRaises(InvalidArgumentError):
            load_experiment_config(self._write('bad.yml', 'problem: [unclosed\n'))

    def test_shipped_configs_validate(self):
        """Every config under configs/ loads."""
        root = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'configs')
        for name in sorted(os.listdir(root)):
            config = load_experiment_config(os.path.join(root, name))
            self.assertIn(config.problem, ('diffusion-2d', 'richards-linear-1d',
                                           'richards-nonlinear-1d'))


if __name__ == '__main__':
    unittest.main()
