"""One-dimensional steady Richards equation: Gardner-Russo (linear) and van Genuchten (nonlinear)."""

import logging
from typing import NamedTuple
import numpy as np
from src.exceptions import InvalidArgumentError, NonConvergenceError
from src.pde.assembly import assemble_system, solve_linear

logger = logging.getLogger(__name__)


class GardnerLayer(NamedTuple):
    """Soil layer up to elevation `upper` with K = K_s exp(alpha psi), theta = theta_s exp(alpha psi)."""
    upper: float
    ks_mean: float
    alpha: float
    theta_s: float


class GardnerModel(NamedTuple):
    """Stack of Gardner layers ordered from the bottom; interfaces sit at the layer uppers."""
    layers: tuple

    @property
    def interfaces(self):
        """Elevations of the internal layer interfaces."""
        return tuple(layer.upper for layer in self.layers[:-1])


class VanGenuchtenModel(NamedTuple):
    """van Genuchten retention and Mualem conductivity parameters."""
    n: float
    alpha: float
    theta_r: float
    theta_s: float
    ks: float

    @property
    def m(self):
        """Shape exponent m = 1 - 1/n."""
        return 1.0 - 1.0 / self.n


def validate_gardner(model):
    """Reject non-physical Gardner parameters."""
    if not model.layers:
        raise InvalidArgumentError('Gardner model needs at least one layer')
    for layer in model.layers:
        if layer.ks_mean <= 0 or layer.alpha <= 0 or not 0 < layer.theta_s <= 1:
            raise InvalidArgumentError(f'Invalid Gardner layer {layer}')


def validate_van_genuchten(model):
    """Reject non-physical van Genuchten parameters."""
    if model.n <= 1 or model.ks <= 0 or not 0 <= model.theta_r < model.theta_s:
        raise InvalidArgumentError(f'Invalid van Genuchten parameters {model}')


def element_layers(mesh, model):
    """Layer index of every element, decided by its midpoint."""
    uppers = np.array([layer.upper for layer in model.layers])
    midpoints = mesh.element_centroids()[:, 0]
    return np.minimum(np.searchsorted(uppers, midpoints), len(model.layers) - 1)


def gardner_coefficients(mesh, model, ks_nodes):
    """Elementwise diffusivity D = K_s/(alpha theta_s) and velocity v = K_s/theta_s."""
    layers = element_layers(mesh, model)
    alpha = np.array([layer.alpha for layer in model.layers])[layers]
    theta_s = np.array([layer.theta_s for layer in model.layers])[layers]
    ks_elements = ks_nodes[mesh.elements].mean(axis=1)
    return ks_elements / (alpha * theta_s), ks_elements / theta_s


# pylint: disable=too-many-arguments, R0917, too-many-locals
def assemble_richards_linear_1d(mesh, model, ks_nodes, bcs, elements=None, owned_nodes=None):
    """Assemble the saturation form d/dz[D theta' + v theta] = 0.

    bcs holds 'theta0' (Dirichlet at z = 0) and 'flux' q, imposed as
    D theta'(L) = -q. The advective boundary term -v(L) theta(L) lands on the
    top node's diagonal.
    """
    ks_nodes = np.asarray(ks_nodes, dtype=float)
    if ks_nodes.shape != (mesh.n_nodes,):
        raise InvalidArgumentError(f'Expected {mesh.n_nodes} K_s values, got {ks_nodes.shape}')
    if not np.all(ks_nodes > 0):
        raise InvalidArgumentError('Saturated conductivity must be strictly positive')
    validate_gardner(model)

    diffusivity, velocity = gardner_coefficients(mesh, model, ks_nodes)
    (step,) = mesh.spacing
    stiffness = np.array([[1.0, -1.0], [-1.0, 1.0]]) / step
    advection = 0.5 * np.array([[-1.0, -1.0], [1.0, 1.0]])
    matrices = diffusivity[:, None, None] * stiffness + velocity[:, None, None] * advection

    element_nodes = mesh.elements
    if elements is not None:
        matrices = matrices[elements]
        element_nodes = mesh.elements[elements]

    top = int(mesh.boundary['top'][0])
    nodal_load = np.zeros(mesh.n_nodes)
    nodal_diagonal = np.zeros(mesh.n_nodes)
    if owned_nodes is None or owned_nodes[top]:
        nodal_load[top] = -bcs['flux']
        nodal_diagonal[top] = -velocity[-1]

    bottom = mesh.boundary['bottom']
    dirichlet = (bottom, np.full(bottom.size, float(bcs['theta0'])))
    return assemble_system(mesh.n_nodes, element_nodes, matrices, nodal_load=nodal_load,
                           nodal_diagonal=nodal_diagonal, dirichlet=dirichlet)


def element_flux(mesh, model, ks_nodes, theta):
    """Total flux D theta' + v theta on every element, using the element mean of theta."""
    diffusivity, velocity = gardner_coefficients(mesh, model, ks_nodes)
    (step,) = mesh.spacing
    left, right = theta[mesh.elements[:, 0]], theta[mesh.elements[:, 1]]
    return diffusivity * (right - left) / step + velocity * 0.5 * (left + right)


def vg_conductivity(model, psi):
    """Effective saturation S_e and conductivity K at pressure head psi (|psi| is used)."""
    psi = np.asarray(psi, dtype=float)
    m = model.m
    saturation = (1.0 + (model.alpha * np.abs(psi)) ** model.n) ** (-m)
    conductivity = model.ks * np.sqrt(saturation) * (1.0 - (1.0 - saturation ** (1.0 / m)) ** m) ** 2
    return saturation, conductivity


def relative_conductivity(model, psi):
    """K(psi) / K_s for the van Genuchten-Mualem model."""
    return vg_conductivity(model, psi)[1] / model.ks


def richards_dirichlet(mesh, bcs):
    """Dirichlet dofs and values for psi(0) = psi_bottom and psi(L) = psi_top."""
    dofs = np.concatenate([mesh.boundary['bottom'], mesh.boundary['top']])
    return dofs, np.array([bcs['psi_bottom'], bcs['psi_top']], dtype=float)


def linear_profile(mesh, bcs):
    """Straight line between the two boundary heads."""
    z = mesh.coords[:, 0] / mesh.lengths[0]
    return bcs['psi_bottom'] + (bcs['psi_top'] - bcs['psi_bottom']) * z


# pylint: disable=too-many-arguments, R0917
def assemble_richards_nonlinear_1d(mesh, model, ks_nodes, psi_nodes, bcs, elements=None,
                                   conductivity=None):
    """Picard-linearized system int K psi' w' = -int K w' with K frozen at psi_nodes.

    `conductivity(psi)` overrides the relative conductivity K/K_s.
    """
    relative = relative_conductivity(model, psi_nodes) if conductivity is None \
        else conductivity(psi_nodes)
    k_nodes = np.asarray(ks_nodes, dtype=float) * relative
    k_elements = k_nodes[mesh.elements].mean(axis=1)
    (step,) = mesh.spacing
    matrices = k_elements[:, None, None] * (np.array([[1.0, -1.0], [-1.0, 1.0]]) / step)
    loads = k_elements[:, None] * np.array([1.0, -1.0])

    element_nodes = mesh.elements
    if elements is not None:
        matrices, loads, element_nodes = matrices[elements], loads[elements], mesh.elements[elements]
    return assemble_system(mesh.n_nodes, element_nodes, matrices, element_loads=loads,
                           dirichlet=richards_dirichlet(mesh, bcs))


# pylint: disable=too-many-arguments, R0917
def solve_richards_nonlinear_1d(mesh, model, ks_nodes, bcs, tol=1e-10, max_iters=200,
                                initial=None, conductivity=None, ledger=None, phase='reference'):
    """Picard iteration for d/dz[K(psi)(psi' + 1)] = 0; returns (psi, iterations).

    Each sweep freezes K at the current iterate, measures the residual of that
    iterate and stops once it drops below `tol`.
    """
    if tol <= 0:
        raise InvalidArgumentError('Tolerance must be positive')
    ks_nodes = np.asarray(ks_nodes, dtype=float)
    if not np.all(ks_nodes > 0):
        raise InvalidArgumentError('Saturated conductivity must be strictly positive')
    validate_van_genuchten(model)

    psi = linear_profile(mesh, bcs) if initial is None else np.array(initial, dtype=float)
    residuals = []
    for iteration in range(max_iters + 1):
        system = assemble_richards_nonlinear_1d(mesh, model, ks_nodes, psi, bcs,
                                                conductivity=conductivity)
        residuals.append(system.residual_norm(psi))
        logger.debug('Picard iteration %d residual %.3e', iteration, residuals[-1])
        if residuals[-1] < tol:
            return psi, iteration
        if iteration == max_iters:
            break
        psi = solve_linear(system, ledger=ledger, phase=phase)
    raise NonConvergenceError(
        f'Picard iteration did not reach {tol:.1e} in {max_iters} iterations', residuals)
