"""Covariance kernels, discrete Karhunen-Loeve decomposition and log-normal coefficient fields."""

import logging
import math
from typing import NamedTuple
import numpy as np
from scipy import linalg
from src.exceptions import InvalidArgumentError, NumericFailureError

logger = logging.getLogger(__name__)

KERNEL_VARIANTS = ('squared-exponential', 'exponential')
VARIANCE_CONVENTIONS = ('linear', 'standard')


class CovarianceKernel:
    """Stationary covariance C(x, y) = variance * rho(x - y) with per-axis correlation lengths."""

    def __init__(self, variant, variance, lengths):
        if variant not in KERNEL_VARIANTS:
            raise InvalidArgumentError(
                f"Unknown kernel variant '{variant}', expected one of {KERNEL_VARIANTS}")
        lengths = tuple(float(length) for length in np.atleast_1d(lengths))
        if variance <= 0 or any(length <= 0 for length in lengths):
            raise InvalidArgumentError('Kernel variance and correlation lengths must be positive')
        self.variant = variant
        self.variance = float(variance)
        self.lengths = lengths

    def __call__(self, x, y):
        """Return the matrix C(x_i, y_j) for coordinate arrays x (n x k) and y (m x k)."""
        x = np.asarray(x, dtype=float).reshape(len(x), -1)
        y = np.asarray(y, dtype=float).reshape(len(y), -1)
        if x.shape[1] != len(self.lengths):
            raise InvalidArgumentError(
                f'Kernel has {len(self.lengths)} correlation lengths, coordinates have '
                f'{x.shape[1]} axes')
        exponent = np.zeros((x.shape[0], y.shape[0]))
        for axis, length in enumerate(self.lengths):
            delta = (x[:, axis, None] - y[None, :, axis]) / length
            if self.variant == 'squared-exponential':
                exponent += delta ** 2
            else:
                exponent += np.abs(delta)
        return self.variance * np.exp(-exponent)

    def __repr__(self):
        return f'CovarianceKernel({self.variant!r}, {self.variance!r}, {self.lengths!r})'


class FieldLayer(NamedTuple):
    """A slab upper-bounded at `upper` along the first axis with its own mean and kernel."""
    upper: float
    g0: float
    kernel: CovarianceKernel


class KLExpansion(NamedTuple):
    """Truncated KL expansion: nodal mean, eigenvalues (non-increasing) and eigenfunction rows."""
    mean_fn: np.ndarray
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray

    @property
    def dim(self):
        """Number of retained modes."""
        return self.eigenvalues.shape[0]


class LogNormalFieldSpec(NamedTuple):
    """a(x, xi) = exp(g(x, xi)) for the Gaussian field described by `kl`."""
    kl: KLExpansion
    transform: str = 'exp'

    @property
    def dim(self):
        """Stochastic dimension of the field."""
        return self.kl.dim


def lognormal_params(a0, sigma_a, convention='linear'):
    """Return (g0, sigma_g) of the underlying Gaussian for a log-normal with mean a0.

    The 'linear' convention uses sigma_a / a0**2 inside the logarithm, the
    'standard' convention uses sigma_a**2 / a0**2 (the moment-matching identity).
    """
    if a0 <= 0 or sigma_a <= 0:
        raise InvalidArgumentError(f'a0 and sigma_a must be positive, got {a0}, {sigma_a}')
    if convention not in VARIANCE_CONVENTIONS:
        raise InvalidArgumentError(
            f"Unknown variance convention '{convention}', expected {VARIANCE_CONVENTIONS}")
    numerator = sigma_a if convention == 'linear' else sigma_a ** 2
    ratio = 1.0 + numerator / a0 ** 2
    sigma_g = math.sqrt(math.log(ratio))
    g0 = math.log(a0 / math.sqrt(ratio))
    return g0, sigma_g


def _coordinates(mesh):
    """Accept a mesh or a raw coordinate array."""
    coords = getattr(mesh, 'coords', mesh)
    coords = np.asarray(coords, dtype=float)
    return coords.reshape(coords.shape[0], -1)


def assemble_covariance(mesh, kernel):
    """Return the nodal covariance matrix M_ij = C(x_i, x_j)."""
    coords = _coordinates(mesh)
    if not np.all(np.isfinite(coords)):
        raise InvalidArgumentError('Mesh coordinates must be finite')
    matrix = kernel(coords, coords)
    return 0.5 * (matrix + matrix.T)


def layer_membership(mesh, layers):
    """Index of the layer containing each node; nodes on a layer interface join the lower layer."""
    coords = _coordinates(mesh)
    uppers = np.array([layer.upper for layer in layers])
    membership = np.searchsorted(uppers, coords[:, 0], side='left')
    return np.minimum(membership, len(layers) - 1)


def assemble_layered_covariance(mesh, layers):
    """Block-diagonal covariance with independent layers; returns (matrix, nodal g0)."""
    coords = _coordinates(mesh)
    membership = layer_membership(coords, layers)
    matrix = np.zeros((coords.shape[0], coords.shape[0]))
    mean = np.empty(coords.shape[0])
    for index, layer in enumerate(layers):
        nodes = np.flatnonzero(membership == index)
        if nodes.size == 0:
            logger.warning('Layer %d (upper=%s) contains no nodes.', index, layer.upper)
            continue
        matrix[np.ix_(nodes, nodes)] = layer.kernel(coords[nodes], coords[nodes])
        mean[nodes] = layer.g0
    return 0.5 * (matrix + matrix.T), mean


def weighted_eigenpairs(cov_matrix, node_weights, count):
    """Top `count` eigenpairs of the Nystrom operator C W, orthonormal in the W inner product."""
    cov_matrix = np.asarray(cov_matrix, dtype=float)
    node_weights = np.asarray(node_weights, dtype=float)
    size = cov_matrix.shape[0]
    if cov_matrix.shape != (size, size) or node_weights.shape != (size,):
        raise InvalidArgumentError('Covariance must be square and match the node weights')
    if count < 1 or count > size:
        raise InvalidArgumentError(f'Requested {count} modes from {size} dofs')
    if np.any(node_weights <= 0):
        raise InvalidArgumentError('Node weights must be positive')

    root = np.sqrt(node_weights)
    symmetric = root[:, None] * cov_matrix * root[None, :]
    try:
        values, vectors = linalg.eigh(symmetric, subset_by_index=[size - count, size - 1])
    except linalg.LinAlgError as exc:
        raise NumericFailureError(f'Eigensolver failed: {exc}') from exc

    values = values[::-1]
    functions = (vectors[:, ::-1] / root[:, None]).T
    pivots = np.argmax(np.abs(functions), axis=1)
    signs = np.sign(functions[np.arange(count), pivots])
    signs[signs == 0] = 1.0
    return values, functions * signs[:, None]


def kl_solve(cov_matrix, node_weights, d, mean_fn=None):
    """Discrete KL of the covariance operator: the d leading weighted eigenpairs."""
    values, functions = weighted_eigenpairs(cov_matrix, node_weights, d)
    if np.any(values <= 0):
        logger.warning('Non-positive KL eigenvalues were clipped: min=%.3e', values.min())
        values = np.clip(values, 0.0, None)
    if mean_fn is None:
        mean_fn = np.zeros(functions.shape[1])
    logger.debug('KL solve: %d modes, leading eigenvalue %.6e.', d, values[0])
    return KLExpansion(np.asarray(mean_fn, dtype=float), values, functions)


def gaussian_field(kl, xi):
    """g(x, xi) = g0(x) + sum sqrt(lambda_i) g_i(x) xi_i for one draw or a stack of draws."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != kl.dim:
        raise InvalidArgumentError(f'Expected {kl.dim} stochastic coordinates, got {xi.shape[-1]}')
    scaled = xi * np.sqrt(np.clip(kl.eigenvalues, 0.0, None))
    return kl.mean_fn + scaled @ kl.eigenfunctions


def evaluate_field(spec, xi):
    """Log-normal coefficient a(x, xi) at every node."""
    return np.exp(gaussian_field(spec.kl, xi))
