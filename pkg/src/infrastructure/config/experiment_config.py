"""Experiment configuration: YAML/JSON file -> validated, fully defaulted ExperimentConfig."""

import copy
import json
import logging
import os
import yaml
from src.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

PROBLEMS = ('diffusion-2d', 'richards-linear-1d', 'richards-nonlinear-1d')
REFERENCE_METHODS = ('sparse-grid', 'monte-carlo')
LAYER_CORRELATIONS = ('independent', 'correlated')
# Mappings whose keys are user-chosen rather than part of the schema.
FREE_FORM = ('layout_overrides',)

COMMON_DEFAULTS = {
    'seed': 0,
    'output_dir': None,
    'gaussian': {'level': 2},
    'metrics': {'probe': None, 'pdf_samples': 100000, 'eps_samples': 10000},
}

PROBLEM_DEFAULTS = {
    'diffusion-2d': {
        'mesh': {'n_x': 96, 'n_y': 24, 'length_x': 240.0, 'length_y': 60.0},
        'field': {'a0': 5.0, 'sigma_a': 2.5, 'cov': None, 'kernel': 'squared-exponential',
                  'correlation_lengths': [24.0, 20.0], 'variance_convention': 'linear',
                  'layers': 'independent'},
        'physics': {'bcs': {'left': 50.0, 'right': 25.0},
                    'sink': {'location': [120.0, 30.0], 'magnitude': -1.0}},
        'stochastic': {'dim': 10, 'order': 3},
        'reference': {'method': 'sparse-grid', 'level': 4, 'samples': 2000},
        'dd': {'n_subdomains': [3, 8], 'layout_overrides': {}, 'reduced_dims': [3, 4, 5],
               'level': 3, 'order': 2, 'max_outer': 5, 'tol': 0.0},
        'metrics': {'probe': [24.0, 45.0]},
    },
    'richards-linear-1d': {
        'mesh': {'n_elements': 400, 'length': 10.0},
        'field': {'a0': None, 'sigma_a': None, 'cov': 0.1, 'kernel': 'exponential',
                  'correlation_lengths': [2.5], 'variance_convention': 'standard',
                  'layers': 'independent'},
        'physics': {'theta0': 0.4, 'flux': 0.01,
                    'layers': [{'upper': 6.0, 'ks': 1.0, 'alpha': 2.0, 'theta_s': 0.45},
                               {'upper': 10.0, 'ks': 10.0, 'alpha': 1.0, 'theta_s': 0.45}]},
        'stochastic': {'dim': 15, 'order': 3},
        'reference': {'method': 'monte-carlo', 'level': 5, 'samples': 2000},
        'dd': {'n_subdomains': [4], 'layout_overrides': {}, 'reduced_dims': [5], 'level': 3,
               'order': 2, 'max_outer': 5, 'tol': 0.0},
        'metrics': {'probe': [5.0]},
    },
    'richards-nonlinear-1d': {
        'mesh': {'n_elements': 400, 'length': 10.0},
        'field': {'a0': None, 'sigma_a': None, 'cov': 0.1, 'kernel': 'exponential',
                  'correlation_lengths': [2.5], 'variance_convention': 'standard',
                  'layers': 'independent'},
        'physics': {'n': 1.3954, 'alpha': 0.0104, 'theta_r': 0.1060, 'theta_s': 0.4686,
                    'ks': 0.5458, 'psi_bottom': 0.0, 'psi_top': -0.35, 'tol': 1e-10,
                    'max_iters': 200},
        'stochastic': {'dim': 15, 'order': 3},
        'reference': {'method': 'monte-carlo', 'level': 5, 'samples': 2000},
        'dd': {'n_subdomains': [4], 'layout_overrides': {}, 'reduced_dims': [5], 'level': 3,
               'order': 2, 'max_outer': 5, 'tol': 0.0},
        'metrics': {'probe': [5.0]},
    },
}


def _merge(defaults, given, path=''):
    """Overlay `given` on `defaults`, rejecting keys the defaults do not know."""
    if not isinstance(given, dict):
        raise InvalidArgumentError(f"Section '{path or 'root'}' must be a mapping")
    merged = copy.deepcopy(defaults)
    for key, value in given.items():
        if key not in defaults:
            raise InvalidArgumentError(f"Unknown config key '{path}{key}'")
        default = defaults[key]
        if isinstance(default, dict) and key not in FREE_FORM and value is not None:
            merged[key] = _merge(default, value, f'{path}{key}.')
        else:
            merged[key] = value
    return merged


def default_values(problem):
    """Fully defaulted config mapping for a problem."""
    if problem not in PROBLEMS:
        raise InvalidArgumentError(f"Unknown problem '{problem}', expected one of {PROBLEMS}")
    values = copy.deepcopy(COMMON_DEFAULTS)
    for section, content in PROBLEM_DEFAULTS[problem].items():
        if isinstance(content, dict) and section in values:
            values[section].update(copy.deepcopy(content))
        else:
            values[section] = copy.deepcopy(content)
    values['problem'] = problem
    return values


def _require_positive(values, path):
    for key, value in values.items():
        if isinstance(value, (int, float)) and not isinstance(value, bool) and value <= 0:
            raise InvalidArgumentError(f"'{path}{key}' must be positive, got {value}")


# pylint: disable=too-many-branches
def _validate(values):
    stochastic, dd, reference = values['stochastic'], values['dd'], values['reference']
    _require_positive(values['mesh'], 'mesh.')
    _require_positive(stochastic, 'stochastic.')
    if stochastic['order'] < 1:
        raise InvalidArgumentError('stochastic.order must be >= 1')
    if reference['method'] not in REFERENCE_METHODS:
        raise InvalidArgumentError(
            f"reference.method must be one of {REFERENCE_METHODS}, got {reference['method']!r}")
    _require_positive({'level': reference['level'], 'samples': reference['samples']},
                      'reference.')
    if values['gaussian']['level'] < 2:
        raise InvalidArgumentError('gaussian.level must be >= 2')
    if not dd['n_subdomains'] or not dd['reduced_dims']:
        raise InvalidArgumentError('dd.n_subdomains and dd.reduced_dims must not be empty')
    for r in dd['reduced_dims']:
        if not 1 <= r <= stochastic['dim']:
            raise InvalidArgumentError(
                f"dd.reduced_dims entry {r} must lie in [1, stochastic.dim={stochastic['dim']}]")
    for count in dd['n_subdomains']:
        if int(count) != count or count < 1:
            raise InvalidArgumentError(f'dd.n_subdomains entry {count} must be a positive integer')
    if dd['level'] < 1 or dd['order'] < 0 or dd['max_outer'] < 1 or dd['tol'] < 0:
        raise InvalidArgumentError('dd.level, dd.order, dd.max_outer and dd.tol are out of range')
    field = values['field']
    if field['layers'] not in LAYER_CORRELATIONS:
        raise InvalidArgumentError(f"field.layers must be one of {LAYER_CORRELATIONS}")
    if field['cov'] is not None and field['cov'] <= 0:
        raise InvalidArgumentError('field.cov must be positive')
    for key in ('a0', 'sigma_a'):
        if field[key] is not None and field[key] <= 0:
            raise InvalidArgumentError(f'field.{key} must be positive')


class ExperimentConfig:
    """Resolved experiment settings; sections are plain dicts."""

    def __init__(self, values):
        self.values = values

    @classmethod
    def from_dict(cls, raw, output_dir=None):
        """Validate a raw mapping and fill in defaults."""
        if not isinstance(raw, dict) or 'problem' not in raw:
            raise InvalidArgumentError("Experiment config needs a 'problem' key")
        defaults = default_values(raw['problem'])
        values = _merge(defaults, raw)
        if output_dir is not None:
            values['output_dir'] = output_dir
        _validate(values)
        return cls(values)

    def __getattr__(self, name):
        values = self.__dict__.get('values', {})
        if name in values:
            return values[name]
        raise AttributeError(name)

    @property
    def is_2d(self):
        """True for the rectangle problem."""
        return self.values['problem'] == 'diffusion-2d'

    def to_dict(self):
        """Deep copy of the resolved mapping."""
        return copy.deepcopy(self.values)

    def reference_key(self):
        """Subset that determines the reference solution."""
        key = {section: self.values[section]
               for section in ('problem', 'mesh', 'field', 'physics', 'stochastic', 'reference')}
        if self.values['reference']['method'] == 'monte-carlo':
            key['seed'] = self.values['seed']
        return key


def load_experiment_config(path, output_dir=None):
    """Read a YAML or JSON experiment file."""
    if not os.path.exists(path):
        raise InvalidArgumentError(f'Config file not found: {path}')
    with open(path, 'r', encoding='utf-8') as config_file:
        try:
            raw = yaml.safe_load(config_file)
        except yaml.YAMLError as exc:
            raise InvalidArgumentError(f'Cannot parse {path}: {exc}') from exc
    config = ExperimentConfig.from_dict(raw or {}, output_dir=output_dir)
    logger.info('Loaded %s experiment from %s.', config.problem, path)
    logger.debug('Resolved config: %s', json.dumps(config.to_dict(), sort_keys=True))
    return config
