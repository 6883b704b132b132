"""Per-subdomain reduced stochastic bases and the reduced Neumann-Neumann solve."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple
import numpy as np
from src.chaos import multi_index_set, nisp_project, pce_mean, pce_sample, pce_std
from src.domain_decomposition import (
    assemble_subdomain,
    local_schur,
    recover_interior,
    solve_interface,
    subdomain_blocks,
)
from src.exceptions import InvalidArgumentError, NumericFailureError
from src.experiments.cost import cost_projection
from src.quadrature import smolyak_grid
from src.random_field import weighted_eigenpairs

logger = logging.getLogger(__name__)

SIGNIFICANT_EIGENVALUE = 1e-12
DEGENERATE_VARIANCE = 1e-20


class GaussianPart(NamedTuple):
    """Order-1 chaos of the full solution: u_g(xi) = mean + xi @ modes."""
    mean: np.ndarray
    modes: np.ndarray
    dim: int
    level: int

    def evaluate(self, xi):
        """Nodal values at one xi or a stack of xi rows."""
        return self.mean + np.asarray(xi, dtype=float) @ self.modes


class AdaptedBasis(NamedTuple):
    """Isometry eta = A xi of one subdomain; only the first r rows drive the reduced solve."""
    subdomain: int
    matrix: np.ndarray
    r: int
    mu: np.ndarray
    phi: np.ndarray
    nodes: np.ndarray

    @property
    def dim(self):
        """Dimension d of the underlying xi space."""
        return self.matrix.shape[1]

    @property
    def retained(self):
        """The r x d block [A]_r."""
        return self.matrix[:self.r]


class SubdomainSolution(NamedTuple):
    """Reduced chaos of the solution on a subdomain closure, plus the collocation values."""
    basis: AdaptedBasis
    pce: object
    nodes: np.ndarray
    values: np.ndarray


def _ordered_map(function, items, max_workers=1):
    """Map in input order, optionally over a thread pool."""
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            return list(executor.map(function, items))
    return [function(item) for item in items]


def gaussian_part(problem, coarse_level=2, ledger=None, max_workers=1):
    """Full-domain solves on a coarse sparse grid, projected onto the linear chaos."""
    if coarse_level < 2:
        raise InvalidArgumentError(f'Gaussian part needs a grid level >= 2, got {coarse_level}')
    grid = smolyak_grid(problem.dim, coarse_level)
    logger.info('Gaussian part: %d solves on the level-%d grid in %d dimensions.',
                grid.size, coarse_level, problem.dim)
    samples = problem.solve_batch(grid.points, ledger=ledger, phase='gaussian',
                                  max_workers=max_workers)
    pce = nisp_project(grid, samples, multi_index_set(problem.dim, 1))
    return GaussianPart(pce.coefficients[0].copy(), pce.coefficients[1:].copy(), problem.dim,
                        coarse_level)


def subdomain_weights(mesh, partition, s):
    """Quadrature weights of the closure nodes from the subdomain's own elements."""
    return mesh.node_weights(partition.element_sets[s])[partition.closure_nodes(s)]


def solution_covariance(gp, partition, s):
    """C_s(x1, x2) = sum_i u_i(x1) u_i(x2) on the closure of subdomain s."""
    modes = gp.modes[:, partition.closure_nodes(s)]
    return modes.T @ modes


def hilbert_kl(cov, node_weights, d):
    """d leading weighted eigenpairs of a subdomain covariance, zero-padded when n < d."""
    cov = np.asarray(cov, dtype=float)
    count = min(d, cov.shape[0])
    mu, phi = weighted_eigenpairs(cov, node_weights, count)
    mu = np.clip(mu, 0.0, None)
    if count < d:
        mu = np.concatenate([mu, np.zeros(d - count)])
        phi = np.vstack([phi, np.zeros((d - count, phi.shape[1]))])
    return mu, phi


def _complete_rows(rows, d, seed):
    """Extend orthonormal rows to an orthonormal basis of R^d with seeded random directions."""
    rng = np.random.Generator(np.random.Philox(seed))
    basis = list(rows)
    while len(basis) < d:
        candidate = rng.standard_normal(d)
        for _ in range(2):
            for row in basis:
                candidate -= (row @ candidate) * row
        norm = np.linalg.norm(candidate)
        if norm > 1e-8:
            basis.append(candidate / norm)
    return np.array(basis).reshape(d, d)


# pylint: disable=too-many-arguments, R0917
def adaptation_matrix(gp, mu, phi, node_weights, s, partition, r=None, seed=0):
    """Build the isometry A_s with a_ij = mu_i^-1/2 sum_x w(x) u_j(x) phi_i(x).

    Rows for eigenvalues below SIGNIFICANT_EIGENVALUE * mu_1 are completed to a
    full orthonormal basis of R^d.
    """
    mu = np.asarray(mu, dtype=float)
    d = gp.dim
    r = d if r is None else int(r)
    if not 1 <= r <= d:
        raise InvalidArgumentError(f'Retained dimension must lie in [1, {d}], got {r}')
    nodes = partition.closure_nodes(s)
    modes = gp.modes[:, nodes]
    scale = float(np.sum(node_weights * gp.mean[nodes] ** 2))
    if mu.size == 0 or mu[0] <= DEGENERATE_VARIANCE * scale + np.finfo(float).tiny:
        raise NumericFailureError(
            f'Solution covariance of subdomain {s} is degenerate; nothing to adapt')

    significant = int(np.sum(mu > SIGNIFICANT_EIGENVALUE * mu[0]))
    raw = (phi[:significant] * node_weights[None, :]) @ modes.T
    raw /= np.sqrt(mu[:significant])[:, None]
    q_factor, r_factor = np.linalg.qr(raw.T)
    signs = np.sign(np.diag(r_factor))
    signs[signs == 0] = 1.0
    rows = (q_factor * signs[None, :]).T
    if significant < d:
        logger.warning('Subdomain %d: %d of %d eigenvalues are insignificant; completing basis.',
                       s, d - significant, d)
    matrix = _complete_rows(list(rows), d, seed + s)

    defect = np.max(np.abs(matrix @ matrix.T - np.eye(d)))
    if defect > 1e-8:
        raise NumericFailureError(f'Adapted basis of subdomain {s} is not an isometry ({defect:.2e})')
    logger.debug('Subdomain %d: mu_1=%.4e, %d significant eigenvalues.', s, mu[0], significant)
    return AdaptedBasis(s, matrix, r, mu, phi, nodes)


def build_bases(problem, gp, partition, r, seed=0):
    """Adapted basis of every subdomain."""
    bases = []
    for s in range(partition.n_subdomains):
        weights = subdomain_weights(problem.mesh, partition, s)
        mu, phi = hilbert_kl(solution_covariance(gp, partition, s), weights, gp.dim)
        bases.append(adaptation_matrix(gp, mu, phi, weights, s, partition, r=r, seed=seed))
    return bases


def map_collocation(basis, eta_pts):
    """xi_q = [A^T]_r eta_q for every row of eta_pts."""
    eta_pts = np.atleast_2d(np.asarray(eta_pts, dtype=float))
    r = eta_pts.shape[1]
    if r > basis.dim:
        raise InvalidArgumentError(f'Reduced dimension {r} exceeds d = {basis.dim}')
    return eta_pts @ basis.matrix[:r]


def reduced_coordinates(basis, xi_draws):
    """eta = [A]_r xi for every row of xi_draws."""
    xi_draws = np.atleast_2d(np.asarray(xi_draws, dtype=float))
    if xi_draws.shape[1] != basis.dim:
        raise InvalidArgumentError(f'Draws have dimension {xi_draws.shape[1]}, expected {basis.dim}')
    return xi_draws @ basis.retained.T


def evaluate_between_bases(pce, source_matrix, target_matrix, eta_pts):
    """Values of a chaos in the source eta at points given in the target eta."""
    eta_pts = np.atleast_2d(np.asarray(eta_pts, dtype=float))
    r = eta_pts.shape[1]
    if source_matrix.shape != target_matrix.shape or r != pce.basis.dim:
        raise InvalidArgumentError('Adapted bases must share d and the chaos must have r dims')
    if r > source_matrix.shape[0]:
        raise InvalidArgumentError(f'Reduced dimension {r} exceeds d = {source_matrix.shape[0]}')
    transformed = eta_pts @ target_matrix[:r] @ source_matrix[:r].T
    return pce_sample(pce, transformed)


# pylint: disable=too-many-arguments, R0917
def project_between_bases(pce, source_matrix, target_matrix, r, grid, target_basis):
    """Re-expand a chaos from the source basis in the target basis by NISP on `grid`."""
    if grid.dim != r or target_basis.dim != r:
        raise InvalidArgumentError(f'Grid and target chaos must have {r} dimensions')
    values = evaluate_between_bases(pce, source_matrix, target_matrix, grid.points)
    return nisp_project(grid, values, target_basis)


# pylint: disable=too-many-arguments, R0917, too-many-locals
def adapted_subdomain_solve(problem, partition, bases, r, level, order, states=None, ledger=None,
                            max_workers=1):
    """Neumann-Neumann solve with every subdomain working in its own reduced chaos.

    `states[s]` is a Q x n_nodes array of linearization points per collocation
    point (nonlinear problems only). Foreign Schur and load contributions are
    re-projected onto this subdomain's chaos before being evaluated on its grid.
    """
    if len(bases) != partition.n_subdomains:
        raise InvalidArgumentError('Need exactly one adapted basis per subdomain')
    if len({basis.dim for basis in bases}) != 1:
        raise InvalidArgumentError('Adapted bases must share the dimension d')
    grid = smolyak_grid(r, level)
    chaos = multi_index_set(r, order)
    n_sub = partition.n_subdomains
    n_gamma = partition.interface.size
    logger.info('Adapted solve: %d subdomains, r=%d, %d points per subdomain, |Gamma|=%d.',
                n_sub, r, grid.size, n_gamma)

    locals_ = []
    schur_pces, rhs_pces = [], []
    for s, basis in enumerate(bases):
        xi_points = map_collocation(basis, grid.points)

        def local_at(q, s=s, xi_points=xi_points):
            state = None if states is None else states[s][q]
            blocks = subdomain_blocks(*assemble_subdomain(problem, partition, s, xi_points[q],
                                                          state), partition, s)
            local = local_schur(*blocks)
            if ledger is not None and local.n_interior:
                ledger.charge('subdomain', local.n_interior)
            return local

        per_point = _ordered_map(local_at, range(grid.size), max_workers)
        locals_.append(per_point)
        schur_pces.append(nisp_project(grid, np.array([local.schur.ravel() for local in per_point]),
                                       chaos))
        rhs_pces.append(nisp_project(grid, np.array([local.rhs for local in per_point]), chaos))

    solutions = []
    for s, basis in enumerate(bases):
        schur = np.zeros((grid.size, n_gamma, n_gamma))
        rhs = np.zeros((grid.size, n_gamma))
        for other in range(n_sub):
            positions = partition.interface_local[other]
            if positions.size == 0:
                continue
            size = positions.size
            if other == s:
                own_schur = np.array([local.schur for local in locals_[s]])
                own_rhs = np.array([local.rhs for local in locals_[s]])
            else:
                schur_here = project_between_bases(schur_pces[other], bases[other].matrix,
                                                   basis.matrix, r, grid, chaos)
                rhs_here = project_between_bases(rhs_pces[other], bases[other].matrix,
                                                 basis.matrix, r, grid, chaos)
                own_schur = pce_sample(schur_here, grid.points).reshape(grid.size, size, size)
                own_rhs = pce_sample(rhs_here, grid.points)
            schur[:, positions[:, None], positions[None, :]] += own_schur
            rhs[:, positions] += own_rhs

        closure_values = []
        for q in range(grid.size):
            u_gamma = solve_interface(schur[q], rhs[q], ledger=ledger)
            interior = recover_interior(locals_[s][q], u_gamma, partition, s)
            closure_values.append(np.concatenate([interior, u_gamma[partition.interface_local[s]]]))
        closure_values = np.array(closure_values)
        nodes = partition.closure_nodes(s)
        solutions.append(SubdomainSolution(basis, nisp_project(grid, closure_values, chaos),
                                           nodes, closure_values))

    if ledger is not None and n_gamma:
        ledger.charge_flops('projection', cost_projection(n_sub, grid.size, chaos.size, n_gamma))
    return solutions


# pylint: disable=too-many-arguments, R0917, too-many-locals
def adapted_nonlinear_solve(problem, partition, bases, gp, r, level, order, max_outer=5, tol=0.0,
                            ledger=None, max_workers=1):
    """Outer Picard loop around adapted_subdomain_solve; returns (solutions, residuals).

    Every collocation point of every subdomain is linearized at the previous
    iterate evaluated at that point's xi: the Gaussian part first, then the
    global field assembled from all reduced expansions. The residual is the
    relative change of the mean field.
    """
    if max_outer < 1:
        raise InvalidArgumentError(f'Need at least one outer iteration, got {max_outer}')
    grid = smolyak_grid(r, level)
    xi_points = [map_collocation(basis, grid.points) for basis in bases]
    states = [gp.evaluate(points) for points in xi_points]
    mean = gp.mean.copy()
    residuals = []
    solutions = None
    for outer in range(max_outer):
        solutions = adapted_subdomain_solve(problem, partition, bases, r, level, order,
                                            states=states, ledger=ledger, max_workers=max_workers)
        new_mean, _ = assemble_global_moments(solutions, partition, problem)
        residuals.append(float(np.linalg.norm(new_mean - mean)
                               / max(np.linalg.norm(new_mean), np.finfo(float).tiny)))
        logger.info('Adapted outer iteration %d: relative mean change %.3e', outer + 1,
                    residuals[-1])
        mean = new_mean
        if residuals[-1] < tol:
            break
        states = [sample_adapted_solution(solutions, partition, problem, points)
                  for points in xi_points]
    return solutions, residuals


def _owned_positions(partition, s, nodes):
    """Positions in `nodes` of the nodes whose values subdomain s reports."""
    return np.flatnonzero(partition.owner[nodes] == s)


def assemble_global_moments(solutions, partition, problem):
    """Global mean and std; each free node is taken from its owning subdomain."""
    n_nodes = problem.mesh.n_nodes
    mean, std = np.zeros(n_nodes), np.zeros(n_nodes)
    dofs, values = problem.dirichlet()
    mean[dofs] = values
    for s, part in enumerate(solutions):
        owned = _owned_positions(partition, s, part.nodes)
        mean[part.nodes[owned]] = pce_mean(part.pce)[owned]
        std[part.nodes[owned]] = pce_std(part.pce)[owned]
    return mean, std


def sample_adapted_solution(solutions, partition, problem, xi_draws):
    """Evaluate the reduced expansions at shared xi draws: M x n_nodes."""
    xi_draws = np.atleast_2d(np.asarray(xi_draws, dtype=float))
    out = np.empty((xi_draws.shape[0], problem.mesh.n_nodes))
    dofs, values = problem.dirichlet()
    out[:, dofs] = values
    for s, part in enumerate(solutions):
        owned = _owned_positions(partition, s, part.nodes)
        samples = pce_sample(part.pce, reduced_coordinates(part.basis, xi_draws))
        out[:, part.nodes[owned]] = samples[:, owned]
    return out


def sample_adapted_node(solutions, partition, problem, node, xi_draws):
    """Reduced solution at one node for every xi draw."""
    xi_draws = np.atleast_2d(np.asarray(xi_draws, dtype=float))
    dofs, values = problem.dirichlet()
    fixed = np.flatnonzero(dofs == node)
    if fixed.size:
        return np.full(xi_draws.shape[0], values[fixed[0]])
    part = solutions[int(partition.owner[node])]
    column = int(np.flatnonzero(part.nodes == node)[0])
    single = part.pce._replace(coefficients=part.pce.coefficients[:, [column]])
    return pce_sample(single, reduced_coordinates(part.basis, xi_draws))[:, 0]
