"""Hermite polynomial chaos: multi-index sets, basis evaluation, NISP projection and moments."""

import logging
from typing import NamedTuple
import numpy as np
from src.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

# Rows of collocation points evaluated at once when building basis matrices.
CHUNK_POINTS = 1024


class MultiIndexSet(NamedTuple):
    """Total-degree multi-indices, graded then descending-lexicographic, zero index first."""
    dim: int
    order: int
    indices: np.ndarray

    @property
    def size(self):
        """Number of basis terms including the constant one."""
        return self.indices.shape[0]

    @property
    def nonzero_count(self):
        """Number of terms with positive total degree."""
        return self.indices.shape[0] - 1


class PCExpansion(NamedTuple):
    """Chaos coefficients of a nodal field: row 0 is the mean, rows 1..N the modes."""
    basis: MultiIndexSet
    coefficients: np.ndarray
    dof_coords: np.ndarray = None


def _compositions(total, dim):
    """Yield length-`dim` tuples summing to `total` in descending lexicographic order."""
    if dim == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, dim - 1):
            yield (head,) + tail


def multi_index_set(dim, order):
    """Return every multi-index of total degree <= order in `dim` variables."""
    if int(dim) != dim or dim < 1:
        raise InvalidArgumentError(f'Chaos dimension must be >= 1, got {dim}')
    if int(order) != order or order < 0:
        raise InvalidArgumentError(f'Chaos order must be >= 0, got {order}')
    dim, order = int(dim), int(order)
    indices = [index for degree in range(order + 1) for index in _compositions(degree, dim)]
    indices = np.array(indices, dtype=int).reshape(-1, dim)
    indices.setflags(write=False)
    return MultiIndexSet(dim, order, indices)


def _hermite_table(values, max_degree):
    """Orthonormal He_n(x)/sqrt(n!) for n = 0..max_degree, stacked on a new last axis."""
    values = np.asarray(values, dtype=float)
    table = np.empty(values.shape + (max_degree + 1,))
    table[..., 0] = 1.0
    if max_degree >= 1:
        table[..., 1] = values
    for n in range(1, max_degree):
        table[..., n + 1] = (values * table[..., n] - np.sqrt(n) * table[..., n - 1]) / np.sqrt(n + 1)
    return table


def hermite_eval(index, point):
    """Evaluate the orthonormal multivariate Hermite polynomial `index` at `point`."""
    index = np.asarray(index, dtype=int).ravel()
    point = np.asarray(point, dtype=float).ravel()
    if index.shape != point.shape:
        raise InvalidArgumentError(
            f'Multi-index length {index.size} does not match point length {point.size}')
    if index.size == 0:
        return 1.0
    table = _hermite_table(point, int(index.max()))
    return float(np.prod(table[np.arange(index.size), index]))


def basis_matrix(points, basis):
    """Return the Q x (N+1) matrix of basis polynomials evaluated at each point."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != basis.dim:
        raise InvalidArgumentError(
            f'Points have dimension {points.shape[1]}, basis has dimension {basis.dim}')
    table = _hermite_table(points, basis.order)
    columns = np.arange(basis.dim)
    return np.prod(table[:, columns, basis.indices], axis=2)


def nisp_project(grid, samples, basis, dof_coords=None):
    """Project collocation samples onto the chaos basis by quadrature."""
    if grid.dim != basis.dim:
        raise InvalidArgumentError(f'Grid dimension {grid.dim} != basis dimension {basis.dim}')
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.shape[0] != grid.size:
        raise InvalidArgumentError(
            f'Expected {grid.size} sample rows, got {samples.shape[0]}')

    coefficients = np.zeros((basis.size, samples.shape[1]))
    for start in range(0, grid.size, CHUNK_POINTS):
        stop = start + CHUNK_POINTS
        psi = basis_matrix(grid.points[start:stop], basis)
        coefficients += psi.T @ (grid.weights[start:stop, None] * samples[start:stop])
    return PCExpansion(basis, coefficients, dof_coords)


def pce_mean(pce):
    """Mean of the expansion at every dof."""
    return np.array(pce.coefficients[0], copy=True)


def pce_std(pce):
    """Standard deviation of the expansion at every dof."""
    return np.sqrt(np.sum(pce.coefficients[1:] ** 2, axis=0))


def pce_sample(pce, xi_draws):
    """Evaluate the expansion at each row of `xi_draws`."""
    xi_draws = np.atleast_2d(np.asarray(xi_draws, dtype=float))
    if xi_draws.shape[1] != pce.basis.dim:
        raise InvalidArgumentError(
            f'Draws have dimension {xi_draws.shape[1]}, basis has dimension {pce.basis.dim}')
    out = np.empty((xi_draws.shape[0], pce.coefficients.shape[1]))
    for start in range(0, xi_draws.shape[0], CHUNK_POINTS):
        stop = start + CHUNK_POINTS
        out[start:stop] = basis_matrix(xi_draws[start:stop], pce.basis) @ pce.coefficients
    return out
