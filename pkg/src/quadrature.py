"""Gauss-Hermite rules and Smolyak sparse grids for the standard Gaussian measure."""

import itertools
import logging
import math
from typing import NamedTuple
import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import comb
from src.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

MERGE_TOLERANCE = 1e-12


class QuadratureRule1D(NamedTuple):
    """One-dimensional Gauss-Hermite rule with probabilists' weights summing to one."""
    order: int
    nodes: np.ndarray
    weights: np.ndarray


class SparseGrid(NamedTuple):
    """Merged Smolyak grid: Q points in `dim` Gaussian dimensions."""
    dim: int
    level: int
    points: np.ndarray
    weights: np.ndarray

    @property
    def size(self):
        """Number of collocation points."""
        return self.points.shape[0]


def gauss_hermite_1d(order):
    """Return the `order`-point Gauss-Hermite rule for the standard normal density."""
    if int(order) != order or order < 1:
        raise InvalidArgumentError(f'Gauss-Hermite order must be a positive integer, got {order}')
    order = int(order)
    nodes, weights = hermegauss(order)
    weights = weights / math.sqrt(2.0 * math.pi)
    # Symmetrize so the middle node of odd rules is exactly zero.
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule1D(order, nodes, weights)


def _excess_indices(dim, budget):
    """Yield every length-`dim` tuple of non-negative integers with sum <= budget."""
    if dim == 1:
        for value in range(budget + 1):
            yield (value,)
        return
    for head in range(budget + 1):
        for tail in _excess_indices(dim - 1, budget - head):
            yield (head,) + tail


def _canonical_nodes(rules):
    """Merge 1D nodes of all rules within MERGE_TOLERANCE into shared ids."""
    entries = sorted(
        (value, order, j)
        for order, rule in rules.items()
        for j, value in enumerate(rule.nodes)
    )
    node_ids = {order: np.empty(order, dtype=int) for order in rules}
    values = []
    for value, order, j in entries:
        if not values or value - values[-1] > MERGE_TOLERANCE:
            values.append(value)
        node_ids[order][j] = len(values) - 1
    return node_ids, np.array(values)


def smolyak_grid(dim, level):
    """Build the Smolyak combination rule with non-nested Gauss-Hermite order m(i) = i."""
    if int(dim) != dim or dim < 1:
        raise InvalidArgumentError(f'Sparse-grid dimension must be >= 1, got {dim}')
    if int(level) != level or level < 1:
        raise InvalidArgumentError(f'Sparse-grid level must be >= 1, got {level}')
    dim, level = int(dim), int(level)

    rules = {order: gauss_hermite_1d(order) for order in range(1, level + 1)}
    node_ids, node_values = _canonical_nodes(rules)
    zero_id = int(node_ids[1][0])

    accumulated = {}
    for excess in _excess_indices(dim, level - 1):
        total = sum(excess)
        if total < level - dim:
            continue
        coefficient = (-1) ** (level - 1 - total) * int(comb(dim - 1, level - 1 - total, exact=True))
        active = [k for k, e in enumerate(excess) if e > 0]
        for combo in itertools.product(*[range(excess[k] + 1) for k in active]):
            key = [zero_id] * dim
            weight = float(coefficient)
            for k, j in zip(active, combo):
                order = excess[k] + 1
                key[k] = int(node_ids[order][j])
                weight *= rules[order].weights[j]
            key = tuple(key)
            accumulated[key] = accumulated.get(key, 0.0) + weight

    keys = np.array(list(accumulated.keys()), dtype=int).reshape(-1, dim)
    points = node_values[keys]
    weights = np.array(list(accumulated.values()))
    order = np.lexsort(points.T[::-1])
    points = np.ascontiguousarray(points[order])
    weights = weights[order]
    points.setflags(write=False)
    weights.setflags(write=False)

    logger.debug('Smolyak grid dim=%d level=%d has %d points.', dim, level, len(weights))
    return SparseGrid(dim, level, points, weights)


def integrate(grid, values):
    """Return the quadrature sum of `values` (one row per grid point) against the grid weights."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] != grid.size:
        raise InvalidArgumentError(
            f'Expected {grid.size} values for the grid, got {values.shape[0]}')
    return grid.weights @ values
