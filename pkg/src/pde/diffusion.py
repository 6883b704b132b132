"""Steady diffusion -div(a grad u) = f on a structured rectangle with bilinear elements."""

import logging
import numpy as np
from src.exceptions import InvalidArgumentError
from src.pde.assembly import assemble_system

logger = logging.getLogger(__name__)

DEFAULT_BCS = {'left': 50.0, 'right': 25.0}

_GAUSS = 1.0 / np.sqrt(3.0)
# Reference corners, counter-clockwise from (-1, -1).
_CORNERS = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
_QUAD_POINTS = np.array([[-_GAUSS, -_GAUSS], [_GAUSS, -_GAUSS], [_GAUSS, _GAUSS], [-_GAUSS, _GAUSS]])


def _shape_values():
    """Bilinear shape functions at the 2x2 Gauss points: (quad point, node)."""
    return 0.25 * np.prod(1.0 + _QUAD_POINTS[:, None, :] * _CORNERS[None, :, :], axis=2)


def _stiffness_kernels(spacing):
    """Per-quadrature-point matrices w_q |J| B_q^T B_q for an h_x by h_y element."""
    h_x, h_y = spacing
    xi, eta = _QUAD_POINTS[:, 0, None], _QUAD_POINTS[:, 1, None]
    d_xi = 0.25 * _CORNERS[None, :, 0] * (1.0 + eta * _CORNERS[None, :, 1])
    d_eta = 0.25 * _CORNERS[None, :, 1] * (1.0 + xi * _CORNERS[None, :, 0])
    gradients = np.stack([d_xi * 2.0 / h_x, d_eta * 2.0 / h_y], axis=2)
    jacobian = 0.25 * h_x * h_y
    return jacobian * np.einsum('qak,qbk->qab', gradients, gradients)


def element_stiffness(mesh, a_nodes, elements=None):
    """Element stiffness matrices with a interpolated to the quadrature points."""
    element_nodes = mesh.elements if elements is None else mesh.elements[elements]
    a_quad = a_nodes[element_nodes] @ _shape_values().T
    return np.einsum('eq,qab->eab', a_quad, _stiffness_kernels(mesh.spacing)), element_nodes


def dirichlet_constraints(mesh, bcs=None):
    """Dirichlet dofs and values for constant values on tagged boundaries."""
    bcs = DEFAULT_BCS if bcs is None else bcs
    dofs, values = [], []
    for tag, value in bcs.items():
        nodes = mesh.boundary[tag]
        dofs.append(nodes)
        values.append(np.full(nodes.size, float(value)))
    return np.concatenate(dofs), np.concatenate(values)


# pylint: disable=too-many-arguments, R0917
def assemble_diffusion_2d(mesh, a_nodes, sink=None, bcs=None, elements=None, owned_nodes=None):
    """Assemble the bilinear FEM system with a point sink and Dirichlet ends.

    `sink` is ((x, y), magnitude) and must sit on a node. `elements` restricts
    assembly to a subset of elements; `owned_nodes` (boolean mask) decides
    which nodes receive nodal loads.
    """
    a_nodes = np.asarray(a_nodes, dtype=float)
    if a_nodes.shape != (mesh.n_nodes,):
        raise InvalidArgumentError(f'Expected {mesh.n_nodes} coefficient values, got {a_nodes.shape}')
    if not np.all(a_nodes > 0):
        raise InvalidArgumentError('Diffusion coefficient must be strictly positive')

    nodal_load = np.zeros(mesh.n_nodes)
    if sink is not None:
        location, magnitude = sink
        node = mesh.find_node(location)
        if node is None:
            raise InvalidArgumentError(f'Sink location {tuple(location)} is not a mesh node')
        if owned_nodes is None or owned_nodes[node]:
            nodal_load[node] += magnitude

    matrices, element_nodes = element_stiffness(mesh, a_nodes, elements)
    return assemble_system(mesh.n_nodes, element_nodes, matrices, nodal_load=nodal_load,
                           dirichlet=dirichlet_constraints(mesh, bcs))
