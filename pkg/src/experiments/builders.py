"""Turn an ExperimentConfig into a mesh, a KL field and a StochasticProblem."""

import logging
import numpy as np
from src.exceptions import InvalidArgumentError
from src.pde.mesh import interval_mesh, rectangle_mesh
from src.pde.problems import DiffusionProblem2D, LinearRichardsProblem, NonlinearRichardsProblem
from src.pde.richards import GardnerLayer, GardnerModel, VanGenuchtenModel
from src.random_field import (
    CovarianceKernel,
    FieldLayer,
    LogNormalFieldSpec,
    assemble_covariance,
    assemble_layered_covariance,
    kl_solve,
    layer_membership,
    lognormal_params,
)

logger = logging.getLogger(__name__)

GARDNER_KEYS = {'upper', 'ks', 'alpha', 'theta_s'}


def build_mesh(config):
    """Structured mesh from the `mesh` section."""
    mesh = config.mesh
    if config.is_2d:
        return rectangle_mesh(mesh['n_x'], mesh['n_y'], mesh['length_x'], mesh['length_y'])
    return interval_mesh(mesh['n_elements'], mesh['length'])


def _gaussian_params(field, mean):
    """(g0, sigma_g) from either sigma_a or a coefficient of variation."""
    if field['cov'] is not None:
        return lognormal_params(mean, field['cov'] * mean, 'standard')
    if field['sigma_a'] is None:
        raise InvalidArgumentError('field needs either cov or sigma_a')
    return lognormal_params(mean, field['sigma_a'], field['variance_convention'])


def gardner_model(physics):
    """GardnerModel from physics.layers, bottom layer first."""
    layers = []
    for entry in physics['layers']:
        if set(entry) != GARDNER_KEYS:
            raise InvalidArgumentError(f'Gardner layer needs exactly {sorted(GARDNER_KEYS)}')
        layers.append(GardnerLayer(float(entry['upper']), float(entry['ks']), float(entry['alpha']),
                                   float(entry['theta_s'])))
    return GardnerModel(tuple(sorted(layers, key=lambda layer: layer.upper)))


def van_genuchten_model(physics):
    """VanGenuchtenModel from the physics section."""
    return VanGenuchtenModel(physics['n'], physics['alpha'], physics['theta_r'],
                             physics['theta_s'], physics['ks'])


def _layer_means(config):
    """(upper, mean coefficient) per layer."""
    if config.problem == 'richards-linear-1d':
        return [(layer.upper, layer.ks_mean) for layer in gardner_model(config.physics).layers]
    if config.problem == 'richards-nonlinear-1d':
        return [(config.mesh['length'], config.physics['ks'])]
    if config.field['a0'] is None:
        raise InvalidArgumentError('field.a0 is required for diffusion-2d')
    return [(np.inf, config.field['a0'])]


def build_field(config, mesh):
    """KL of the Gaussian part of the log-normal coefficient."""
    field = config.field
    lengths = field['correlation_lengths']
    if len(lengths) != mesh.dimension:
        raise InvalidArgumentError(
            f'{mesh.dimension}D mesh needs {mesh.dimension} correlation lengths, got {len(lengths)}')
    layers = []
    for upper, mean in _layer_means(config):
        g0, sigma_g = _gaussian_params(field, mean)
        layers.append(FieldLayer(upper, g0, CovarianceKernel(field['kernel'], sigma_g ** 2, lengths)))

    if len(layers) > 1 and field['layers'] == 'independent':
        cov, mean_fn = assemble_layered_covariance(mesh, layers)
    else:
        membership = layer_membership(mesh, layers)
        mean_fn = np.array([layers[index].g0 for index in membership])
        scale = np.sqrt(np.array([layers[index].kernel.variance for index in membership]))
        unit = CovarianceKernel(field['kernel'], 1.0, lengths)
        cov = scale[:, None] * assemble_covariance(mesh, unit) * scale[None, :]
    kl = kl_solve(cov, mesh.node_weights(), config.stochastic['dim'], mean_fn=mean_fn)
    logger.info('KL field: d=%d, lambda_1=%.4e, lambda_d/lambda_1=%.3e.', kl.dim,
                kl.eigenvalues[0], kl.eigenvalues[-1] / kl.eigenvalues[0])
    return LogNormalFieldSpec(kl)


def build_problem(config, mesh=None, field=None):
    """StochasticProblem for the configured experiment."""
    mesh = build_mesh(config) if mesh is None else mesh
    field = build_field(config, mesh) if field is None else field
    physics = config.physics
    if config.problem == 'diffusion-2d':
        sink = physics['sink']
        if sink is not None:
            sink = (tuple(sink['location']), float(sink['magnitude']))
        return DiffusionProblem2D(mesh, field, sink=sink, bcs=physics['bcs'])
    if config.problem == 'richards-linear-1d':
        return LinearRichardsProblem(mesh, field, gardner_model(physics),
                                     {'theta0': physics['theta0'], 'flux': physics['flux']})
    bcs = {'psi_bottom': physics['psi_bottom'], 'psi_top': physics['psi_top']}
    return NonlinearRichardsProblem(mesh, field, van_genuchten_model(physics), bcs,
                                    tol=physics['tol'], max_iters=physics['max_iters'])


def resolve_layouts(config):
    """(N_D, layout) per configured subdomain count, honoring dd.layout_overrides."""
    overrides = {int(key): tuple(value) for key, value in config.dd['layout_overrides'].items()}
    return [(int(count), overrides.get(int(count), int(count)))
            for count in config.dd['n_subdomains']]
