"""Application configuration stored as YAML in the user's config directory."""

import os
import yaml
from src.exceptions import InvalidArgumentError

# Determine the path to the user's config directory based on OS
home_dir = os.getenv('APPDATA') if os.name == 'nt' else os.path.expanduser('~/.config')
CONFIG_DIR = os.path.join(home_dir, 'chaos-dd')
CONFIG_FILE_PATH = os.path.join(CONFIG_DIR, 'config.yml')

DEFAULT_CONFIG = {
    'LOG_LEVEL': 'INFO',
    'OUTPUT_DIR': './results',
    'MAX_WORKERS': 1,
}


def load_config():
    """Load config.yml, filling in missing keys from the defaults."""
    if not os.path.exists(CONFIG_FILE_PATH):
        save_config(DEFAULT_CONFIG)
        return dict(DEFAULT_CONFIG)

    with open(CONFIG_FILE_PATH, 'r', encoding='utf-8') as config_file:
        config = yaml.safe_load(config_file)
    if config is not None and not isinstance(config, dict):
        raise InvalidArgumentError(f'{CONFIG_FILE_PATH} must hold a mapping')
    return {**DEFAULT_CONFIG, **(config or {})}


def save_config(config):
    """Write config.yml."""
    os.makedirs(CONFIG_DIR, exist_ok=True)
    with open(CONFIG_FILE_PATH, 'w', encoding='utf-8') as config_file:
        yaml.dump(config, config_file, default_flow_style=False)


def ensure_config_exists():
    """Create config.yml with the defaults if it is missing."""
    if not os.path.exists(CONFIG_FILE_PATH):
        save_config(DEFAULT_CONFIG)


def max_workers(config):
    """Thread-pool width for collocation solves."""
    value = config.get('MAX_WORKERS', DEFAULT_CONFIG['MAX_WORKERS'])
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InvalidArgumentError(f'MAX_WORKERS must be a positive integer, got {value!r}')
    return value


def output_dir(config):
    """Fallback output directory for experiments that set none."""
    value = config.get('OUTPUT_DIR') or DEFAULT_CONFIG['OUTPUT_DIR']
    return os.path.expanduser(str(value))
