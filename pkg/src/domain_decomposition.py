"""Non-overlapping partitions, Schur complements and the Neumann-Neumann interface solve."""

import logging
from typing import NamedTuple
import numpy as np
from scipy import linalg, sparse
from src.exceptions import InvalidArgumentError, NonConvergenceError, NumericFailureError
from src.pde.assembly import backward_error, lu_factorize, RESIDUAL_TOLERANCE

logger = logging.getLogger(__name__)

LAYOUT_PRESETS = {3: (3, 1), 8: (4, 2), 15: (5, 3), 27: (9, 3)}
PINV_CUTOFF = 1e-12


class Partition:
    """Node-based partition of the free dofs.

    Dof indices refer to positions in `free_nodes` (the global free-dof
    numbering used by LinearSystem.reduced). `interface_local[s]` holds the
    positions of Gamma_s inside `interface` and acts as the restriction R_s.
    """

    # pylint: disable=too-many-arguments, R0917, too-many-instance-attributes
    def __init__(self, layout, element_sets, free_nodes, interiors, interface, interface_local,
                 owner):
        self.layout = layout
        self.element_sets = element_sets
        self.free_nodes = free_nodes
        self.interiors = interiors
        self.interface = interface
        self.interface_local = interface_local
        self.owner = owner

    @property
    def n_subdomains(self):
        """Number of subdomains N_D."""
        return len(self.interiors)

    @property
    def n_free(self):
        """Number of free dofs."""
        return self.free_nodes.size

    def subdomain_interface(self, s):
        """Free-dof indices of Gamma_s."""
        return self.interface[self.interface_local[s]]

    def closure(self, s):
        """Free-dof indices of the subdomain closure: interior first, then Gamma_s."""
        return np.concatenate([self.interiors[s], self.subdomain_interface(s)])

    def closure_nodes(self, s):
        """Mesh node ids of the subdomain closure, in closure order."""
        return self.free_nodes[self.closure(s)]

    def owned_mask(self, s):
        """Boolean node mask of nodes whose nodal terms belong to subdomain s."""
        return self.owner == s


class SchurLocal:
    """Blocks of a subdomain system and its Schur complement S = K_GG - K_GI K_II^-1 K_IG."""

    # pylint: disable=too-many-arguments, R0917, too-many-instance-attributes
    def __init__(self, k_ii, k_ig, k_gi, k_gg, f_i, f_g, schur, rhs, factor):
        self.k_ii = k_ii
        self.k_ig = k_ig
        self.k_gi = k_gi
        self.k_gg = k_gg
        self.f_i = f_i
        self.f_g = f_g
        self.schur = schur
        self.rhs = rhs
        self.factor = factor

    @property
    def n_interior(self):
        """Number of interior dofs."""
        return self.f_i.size

    @property
    def n_interface(self):
        """Number of interface dofs."""
        return self.f_g.size

    def solve_interior(self, rhs):
        """Apply K_II^-1 to a vector or matrix."""
        if self.n_interior == 0:
            return np.zeros_like(rhs, dtype=float)
        solution = self.factor.solve(np.asarray(rhs, dtype=float))
        if not np.all(np.isfinite(solution)):
            raise NumericFailureError('Interior solve produced non-finite values')
        return solution


class DDResult(NamedTuple):
    """Outcome of a decomposed solve: full nodal solution and outer residual history."""
    solution: np.ndarray
    residuals: list
    iterations: int


def resolve_layout(mesh, layout):
    """Turn an N_D preset or explicit (k_x, k_y) into a layout tuple for the mesh."""
    if isinstance(layout, (tuple, list)):
        layout = tuple(int(k) for k in layout)
    elif mesh.dimension == 1:
        layout = (int(layout),)
    elif int(layout) == 1:
        layout = (1, 1)
    elif int(layout) in LAYOUT_PRESETS:
        layout = LAYOUT_PRESETS[int(layout)]
    else:
        raise InvalidArgumentError(
            f'No layout preset for {layout} subdomains; presets are {sorted(LAYOUT_PRESETS)}')
    if mesh.dimension == 1:
        layout = layout[:1]
    if len(layout) != mesh.dimension or any(k < 1 for k in layout):
        raise InvalidArgumentError(f'Layout {layout} does not fit a {mesh.dimension}D mesh')
    for count, k in zip(mesh.shape, layout):
        if count % k:
            raise InvalidArgumentError(f'{count} elements cannot be split into {k} equal blocks')
    return layout


def _element_subdomains(mesh, layout):
    """Subdomain id of every element: block column + k_x * block row."""
    if mesh.dimension == 1:
        return np.arange(mesh.n_elements) // (mesh.shape[0] // layout[0])
    n_x, n_y = mesh.shape
    k_x, k_y = layout
    index = np.arange(mesh.n_elements)
    column, row = index % n_x, index // n_x
    return column // (n_x // k_x) + k_x * (row // (n_y // k_y))


def partition_mesh(mesh, layout, dirichlet_dofs=()):
    """Split the mesh into equal blocks; shared free nodes form the interface Gamma."""
    layout = resolve_layout(mesh, layout)
    n_subdomains = int(np.prod(layout))
    element_owner = _element_subdomains(mesh, layout)
    element_sets = [np.flatnonzero(element_owner == s) for s in range(n_subdomains)]

    membership = np.zeros((n_subdomains, mesh.n_nodes), dtype=bool)
    for s, elements in enumerate(element_sets):
        membership[s, np.unique(mesh.elements[elements])] = True
    counts = membership.sum(axis=0)
    owner = np.argmax(membership, axis=0)

    free_mask = np.ones(mesh.n_nodes, dtype=bool)
    free_mask[np.asarray(dirichlet_dofs, dtype=int)] = False
    free_nodes = np.flatnonzero(free_mask)
    free_index = -np.ones(mesh.n_nodes, dtype=int)
    free_index[free_nodes] = np.arange(free_nodes.size)

    interface_nodes = np.flatnonzero(free_mask & (counts >= 2))
    interface = free_index[interface_nodes]
    interiors = [
        free_index[np.flatnonzero(free_mask & (counts == 1) & membership[s])]
        for s in range(n_subdomains)
    ]
    interface_local = [np.flatnonzero(membership[s, interface_nodes]) for s in range(n_subdomains)]

    logger.info('Partitioned mesh into %d subdomains (layout %s): |Gamma| = %d, interiors %s.',
                n_subdomains, layout, interface.size, [block.size for block in interiors])
    return Partition(layout, element_sets, free_nodes, interiors, interface, interface_local, owner)


def subdomain_blocks(matrix, load, partition, s):
    """Extract (K_II, K_IG, K_GI, K_GG, f_I, f_G) of subdomain s from its reduced system."""
    matrix = sparse.csr_matrix(matrix)
    interior = partition.interiors[s]
    gamma = partition.subdomain_interface(s)
    rows_i, rows_g = matrix[interior], matrix[gamma]
    return (rows_i[:, interior], rows_i[:, gamma], rows_g[:, interior], rows_g[:, gamma],
            load[interior], load[gamma])


def assemble_subdomain(problem, partition, s, xi, state=None):
    """Reduced system of subdomain s assembled from its own elements and owned nodal terms."""
    system = problem.assemble(xi, state=state, elements=partition.element_sets[s],
                              owned_nodes=partition.owned_mask(s))
    return system.reduced()


# pylint: disable=too-many-arguments, R0917
def local_schur(k_ii, k_ig, k_gi, k_gg, f_i, f_g):
    """Schur complement and condensed load of one subdomain via a factorization of K_II."""
    k_ii = sparse.csc_matrix(k_ii)
    k_ig = sparse.csr_matrix(k_ig)
    k_gi = sparse.csr_matrix(k_gi)
    k_gg = sparse.csr_matrix(k_gg)
    f_i = np.asarray(f_i, dtype=float)
    f_g = np.asarray(f_g, dtype=float)

    factor = lu_factorize(k_ii) if f_i.size else None
    local = SchurLocal(k_ii, k_ig, k_gi, k_gg, f_i, f_g, None, None, factor)
    if f_g.size == 0:
        local.schur = np.zeros((0, 0))
        local.rhs = np.zeros(0)
    elif f_i.size:
        coupled = local.solve_interior(k_ig.toarray())
        condensed = local.solve_interior(f_i)
        local.schur = k_gg.toarray() - k_gi @ coupled
        local.rhs = f_g - k_gi @ condensed
    else:
        local.schur = k_gg.toarray()
        local.rhs = f_g.copy()
    return local


def assemble_global_schur(locals_, partition):
    """S_Gamma = sum R_s^T S_s R_s and g_Gamma = sum R_s^T g_s."""
    size = partition.interface.size
    schur = np.zeros((size, size))
    rhs = np.zeros(size)
    for s, local in enumerate(locals_):
        positions = partition.interface_local[s]
        schur[np.ix_(positions, positions)] += local.schur
        rhs[positions] += local.rhs
    return schur, rhs


def solve_interface(schur, rhs, ledger=None, phase='interface', tol=RESIDUAL_TOLERANCE):
    """Dense LU solve of S_Gamma u_Gamma = g_Gamma."""
    schur = np.asarray(schur, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.size == 0:
        return np.zeros(0)
    lu, pivots = linalg.lu_factor(schur, check_finite=False)
    if np.any(np.diag(lu) == 0.0):
        raise NumericFailureError('Interface Schur complement is singular')
    solution = linalg.lu_solve((lu, pivots), rhs, check_finite=False)
    if not np.all(np.isfinite(solution)):
        raise NumericFailureError('Interface solve produced non-finite values')
    error = backward_error(schur, solution, rhs)
    if error > tol:
        raise NumericFailureError(f'Interface residual {error:.3e} exceeds {tol:.1e}')
    if ledger is not None:
        ledger.charge(phase, rhs.size)
    return solution


def recover_interior(local, u_gamma, partition, s):
    """u_I = K_II^-1 (f_I - K_IG R_s u_Gamma)."""
    u_gamma = np.asarray(u_gamma, dtype=float)
    if u_gamma.size != partition.interface.size:
        raise InvalidArgumentError(
            f'Interface vector has {u_gamma.size} entries, expected {partition.interface.size}')
    return local.solve_interior(local.f_i - local.k_ig @ u_gamma[partition.interface_local[s]])


def gather_solution(partition, interiors, u_gamma):
    """Free-dof vector from per-subdomain interior values and the interface values."""
    values = np.empty(partition.n_free)
    for s, block in enumerate(interiors):
        values[partition.interiors[s]] = block
    values[partition.interface] = u_gamma
    return values


def dd_solve(problem, partition, xi=None, state=None, ledger=None, phase='subdomain'):
    """Non-iterative Neumann-Neumann solve at one xi; returns the full nodal solution."""
    xi = np.zeros(problem.dim) if xi is None else xi
    locals_ = []
    for s in range(partition.n_subdomains):
        local = local_schur(*subdomain_blocks(*assemble_subdomain(problem, partition, s, xi, state),
                                              partition, s))
        if ledger is not None and local.n_interior:
            ledger.charge(phase, local.n_interior)
        locals_.append(local)
    schur, rhs = assemble_global_schur(locals_, partition)
    u_gamma = solve_interface(schur, rhs, ledger=ledger)
    interiors = [recover_interior(local, u_gamma, partition, s) for s, local in enumerate(locals_)]

    dofs, values = problem.dirichlet()
    full = np.empty(problem.mesh.n_nodes)
    full[partition.free_nodes] = gather_solution(partition, interiors, u_gamma)
    full[dofs] = values
    return full


def _preconditioner(locals_, partition):
    """sum R_s^T pinv(S_s) R_s with singular values below PINV_CUTOFF * ||S_s|| dropped."""
    size = partition.interface.size
    preconditioner = np.zeros((size, size))
    for s, local in enumerate(locals_):
        if local.schur.size == 0:
            continue
        if not np.any(local.schur):
            raise NumericFailureError(f'Local Schur complement of subdomain {s} vanishes')
        try:
            inverse = linalg.pinv(local.schur, atol=0.0, rtol=PINV_CUTOFF)
        except linalg.LinAlgError as exc:
            raise NumericFailureError(f'Pseudo-inverse of subdomain {s} failed: {exc}') from exc
        positions = partition.interface_local[s]
        preconditioner[np.ix_(positions, positions)] += inverse
    return preconditioner


def nn_richardson_step(locals_, partition, u_gamma, theta=0.25):
    """One relaxed Neumann-Neumann update of the interface values."""
    if theta < 0:
        raise InvalidArgumentError(f'Relaxation must be non-negative, got {theta}')
    schur, rhs = assemble_global_schur(locals_, partition)
    correction = _preconditioner(locals_, partition) @ (rhs - schur @ u_gamma)
    return u_gamma + theta * correction


# pylint: disable=too-many-arguments, R0917
def nn_richardson_solve(locals_, partition, theta=0.25, tol=1e-10, max_iters=500, u_gamma=None):
    """Iterate nn_richardson_step until ||g - S u|| / ||g|| < tol; returns (u_Gamma, residuals)."""
    schur, rhs = assemble_global_schur(locals_, partition)
    preconditioner = _preconditioner(locals_, partition)
    u_gamma = np.zeros(rhs.size) if u_gamma is None else np.array(u_gamma, dtype=float)
    scale = max(np.linalg.norm(rhs), np.finfo(float).tiny)
    residuals = []
    for _ in range(max_iters + 1):
        residual = rhs - schur @ u_gamma
        residuals.append(float(np.linalg.norm(residual) / scale))
        if residuals[-1] < tol:
            return u_gamma, residuals
        u_gamma = u_gamma + theta * (preconditioner @ residual)
    raise NonConvergenceError(f'Richardson iteration did not reach {tol:.1e}', residuals)


# pylint: disable=too-many-arguments, R0917
def nonlinear_dd_solve(problem, partition, max_outer=5, tol=1e-10, xi=None, ledger=None):
    """Outer Picard loop around the non-iterative Schur solve.

    Each sweep freezes the coefficients at the current iterate, records that
    iterate's residual, and stops once it is below `tol`.
    """
    xi = np.zeros(problem.dim) if xi is None else xi
    if problem.is_linear:
        solution = dd_solve(problem, partition, xi, ledger=ledger)
        return DDResult(solution, [problem.residual(xi, solution)], 1)

    state = problem.initial_state(xi)
    residuals = []
    for outer in range(max_outer + 1):
        residuals.append(problem.residual(xi, state))
        logger.debug('Outer iteration %d residual %.3e', outer, residuals[-1])
        if residuals[-1] < tol:
            return DDResult(state, residuals, outer)
        if outer == max_outer:
            break
        state = dd_solve(problem, partition, xi, state=state, ledger=ledger)
    raise NonConvergenceError(
        f'Decomposed solve did not reach {tol:.1e} in {max_outer} outer iterations', residuals)
