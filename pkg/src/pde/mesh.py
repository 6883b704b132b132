"""Structured interval and rectangle meshes."""

import logging
import numpy as np
from src.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)


class Mesh:
    """Structured mesh with linear (1D) or bilinear (2D) elements.

    Nodes of a 2D mesh are numbered j * (n_x + 1) + i and elements j * n_x + i,
    element nodes listed counter-clockwise from the lower-left corner. Boundary
    tags partition the boundary nodes: 'left'/'right' own the corners,
    'bottom'/'top' hold the remaining edge nodes. A 1D mesh tags its end nodes
    'bottom' (z = 0) and 'top' (z = L).
    """

    def __init__(self, dimension, coords, elements, shape, lengths, boundary):
        self.dimension = dimension
        self.coords = coords
        self.elements = elements
        self.shape = shape
        self.lengths = lengths
        self.boundary = boundary

    @property
    def n_nodes(self):
        """Number of nodes."""
        return self.coords.shape[0]

    @property
    def n_elements(self):
        """Number of elements."""
        return self.elements.shape[0]

    @property
    def spacing(self):
        """Element size along each axis."""
        return tuple(length / count for length, count in zip(self.lengths, self.shape))

    def element_measure(self):
        """Length (1D) or area (2D) shared by every element."""
        return float(np.prod(self.spacing))

    def element_centroids(self):
        """Centroid of every element."""
        return self.coords[self.elements].mean(axis=1)

    def node_weights(self, elements=None):
        """Trapezoidal (1D) or lumped-area (2D) weights, optionally from a subset of elements."""
        elements = self.elements if elements is None else self.elements[elements]
        weights = np.zeros(self.n_nodes)
        share = self.element_measure() / self.elements.shape[1]
        np.add.at(weights, elements.ravel(), share)
        return weights

    def find_node(self, point, tol=1e-9):
        """Index of the node at `point`, or None when no node lies within `tol`."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        distance = np.max(np.abs(self.coords - point[None, :]), axis=1)
        index = int(np.argmin(distance))
        return index if distance[index] <= tol else None

    def nearest_node(self, point, candidates=None):
        """Index of the node closest to `point`, optionally among `candidates` only."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        nodes = np.arange(self.n_nodes) if candidates is None else np.asarray(candidates, dtype=int)
        if nodes.size == 0:
            raise InvalidArgumentError('No candidate nodes to choose from')
        distances = np.sum((self.coords[nodes] - point[None, :]) ** 2, axis=1)
        return int(nodes[np.argmin(distances)])


def interval_mesh(n_elements, length):
    """Uniform mesh of [0, length] with `n_elements` linear elements."""
    if n_elements < 1 or length <= 0:
        raise InvalidArgumentError('Interval mesh needs n_elements >= 1 and length > 0')
    coords = np.linspace(0.0, length, n_elements + 1)[:, None]
    elements = np.column_stack([np.arange(n_elements), np.arange(1, n_elements + 1)])
    boundary = {'bottom': np.array([0]), 'top': np.array([n_elements])}
    logger.debug('Interval mesh with %d elements on [0, %s].', n_elements, length)
    return Mesh(1, coords, elements, (n_elements,), (float(length),), boundary)


def rectangle_mesh(n_x, n_y, length_x, length_y):
    """Uniform mesh of [0, length_x] x [0, length_y] with n_x * n_y bilinear elements."""
    if n_x < 1 or n_y < 1 or length_x <= 0 or length_y <= 0:
        raise InvalidArgumentError('Rectangle mesh needs positive element counts and extents')
    xs = np.linspace(0.0, length_x, n_x + 1)
    ys = np.linspace(0.0, length_y, n_y + 1)
    grid_x, grid_y = np.meshgrid(xs, ys)
    coords = np.column_stack([grid_x.ravel(), grid_y.ravel()])

    i, j = np.meshgrid(np.arange(n_x), np.arange(n_y))
    lower_left = (j * (n_x + 1) + i).ravel()
    elements = np.column_stack([
        lower_left, lower_left + 1, lower_left + n_x + 2, lower_left + n_x + 1
    ])

    rows = np.arange(n_y + 1) * (n_x + 1)
    inner = np.arange(1, n_x)
    boundary = {
        'left': rows,
        'right': rows + n_x,
        'bottom': inner,
        'top': n_y * (n_x + 1) + inner,
    }
    logger.debug('Rectangle mesh %dx%d on [0, %s] x [0, %s].', n_x, n_y, length_x, length_y)
    return Mesh(2, coords, elements, (n_x, n_y), (float(length_x), float(length_y)), boundary)
