"""Tests for the application config module."""

import os
import tempfile
import unittest
from unittest.mock import patch
from src.exceptions import InvalidArgumentError
from src.infrastructure.config import config as app_config


class TestAppConfig(unittest.TestCase):
    """Test cases for loading and reading the YAML app config."""

    def setUp(self):
        """Point the config file at a temporary directory."""
        # pylint: disable=consider-using-with
        self.temp_dir = tempfile.TemporaryDirectory()
        config_dir = os.path.join(self.temp_dir.name, 'chaos-dd')
        self.config_file = os.path.join(config_dir, 'config.yml')
        self.patches = [
            patch.object(app_config, 'CONFIG_DIR', config_dir),
            patch.object(app_config, 'CONFIG_FILE_PATH', self.config_file),
        ]
        for active in self.patches:
            active.start()

    def tearDown(self):
        """Undo the patches and remove the directory."""
        for active in self.patches:
            active.stop()
        self.temp_dir.cleanup()

    def test_missing_file_is_created_with_defaults(self):
        """The first load writes the defaults."""
        loaded = app_config.load_config()
        self.assertEqual(loaded, app_config.DEFAULT_CONFIG)
        self.assertTrue(os.path.exists(self.config_file))
        loaded['MAX_WORKERS'] = 8
        self.assertEqual(app_config.DEFAULT_CONFIG['MAX_WORKERS'], 1)

    def test_partial_file_is_completed(self):
        """Missing keys come from the defaults."""
        os.makedirs(os.path.dirname(self.config_file))
        with open(self.config_file, 'w', encoding='utf-8') as f:
            f.write('MAX_WORKERS: 4\n')
        loaded = app_config.load_config()
        self.assertEqual(loaded['MAX_WORKERS'], 4)
        self.assertEqual(loaded['LOG_LEVEL'], 'INFO')

    def test_non_mapping_file(self):
        """A YAML list is not a config."""
        os.makedirs(os.path.dirname(self.config_file))
        with open(self.config_file, 'w', encoding='utf-8') as f:
            f.write('- 1\n- 2\n')
        with self.assertRaises(InvalidArgumentError):
            app_config.load_config()

    def test_save_then_load(self):
        """Saved values are read back."""
        app_config.save_config({'LOG_LEVEL': 'DEBUG', 'OUTPUT_DIR': 'out', 'MAX_WORKERS': 2})
        self.assertEqual(app_config.load_config()['OUTPUT_DIR'], 'out')

    def test_max_workers(self):
        """MAX_WORKERS must be a positive integer."""
        self.assertEqual(app_config.max_workers({'MAX_WORKERS': 3}), 3)
        self.assertEqual(app_config.max_workers({}), 1)
        for value in (0, -2, 1.5, '2', True):
            with self.assertRaises(InvalidArgumentError):
                app_config.max_workers({'MAX_WORKERS': value})

    def test_output_dir(self):
        """Empty values fall back to the default and ~ is expanded."""
        self.assertEqual(app_config.output_dir({'OUTPUT_DIR': None}), './results')
        expanded = app_config.output_dir({'OUTPUT_DIR': '~/runs'})
        self.assertFalse(expanded.startswith('~'))
        self.assertTrue(expanded.endswith('runs'))


if __name__ == '__main__':
    unittest.main()
