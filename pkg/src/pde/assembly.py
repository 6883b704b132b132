"""Sparse linear systems with Dirichlet elimination and LU solves."""

import logging
import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu, norm as sparse_norm
from src.exceptions import InvalidArgumentError, NumericFailureError

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10


class LinearSystem:
    """Stiffness matrix K, load f and Dirichlet constraints over all mesh nodes."""

    def __init__(self, matrix, load, dirichlet_dofs=(), dirichlet_values=()):
        self.matrix = sparse.csr_matrix(matrix)
        self.load = np.asarray(load, dtype=float)
        self.dirichlet_dofs = np.asarray(dirichlet_dofs, dtype=int)
        self.dirichlet_values = np.asarray(dirichlet_values, dtype=float)
        if self.matrix.shape != (self.load.size, self.load.size):
            raise InvalidArgumentError('Matrix and load sizes do not match')
        if self.dirichlet_dofs.shape != self.dirichlet_values.shape:
            raise InvalidArgumentError('Each Dirichlet dof needs exactly one value')

    @property
    def size(self):
        """Number of dofs before elimination."""
        return self.load.size

    @property
    def free_dofs(self):
        """Dofs not fixed by a Dirichlet constraint, in increasing order."""
        mask = np.ones(self.size, dtype=bool)
        mask[self.dirichlet_dofs] = False
        return np.flatnonzero(mask)

    def reduced(self):
        """Eliminate Dirichlet rows and columns: returns (K_ff, f_f - K_fD u_D)."""
        free = self.free_dofs
        k_ff = self.matrix[free][:, free]
        load = self.load[free]
        if self.dirichlet_dofs.size:
            load = load - self.matrix[free][:, self.dirichlet_dofs] @ self.dirichlet_values
        return k_ff.tocsc(), load

    def expand(self, free_values):
        """Full nodal vector from values on the free dofs."""
        full = np.empty(self.size)
        full[self.free_dofs] = free_values
        full[self.dirichlet_dofs] = self.dirichlet_values
        return full

    def residual_norm(self, values):
        """Euclidean norm of K_ff u_f - f_f for a full nodal vector."""
        k_ff, load = self.reduced()
        return float(np.linalg.norm(k_ff @ values[self.free_dofs] - load))


# pylint: disable=too-many-arguments, R0917
def assemble_system(n_nodes, element_nodes, element_matrices, element_loads=None,
                    nodal_load=None, nodal_diagonal=None, dirichlet=None):
    """Scatter element contributions into a LinearSystem."""
    per_element = element_nodes.shape[1]
    rows = np.repeat(element_nodes, per_element, axis=1).ravel()
    cols = np.tile(element_nodes, (1, per_element)).ravel()
    matrix = sparse.coo_matrix(
        (np.asarray(element_matrices).ravel(), (rows, cols)), shape=(n_nodes, n_nodes)
    ).tocsr()
    if nodal_diagonal is not None:
        matrix = matrix + sparse.diags(nodal_diagonal, format='csr')

    load = np.zeros(n_nodes)
    if element_loads is not None:
        np.add.at(load, element_nodes.ravel(), np.asarray(element_loads).ravel())
    if nodal_load is not None:
        load += nodal_load

    dofs, values = dirichlet if dirichlet is not None else ((), ())
    return LinearSystem(matrix, load, dofs, values)


def lu_factorize(matrix):
    """Sparse LU factorization; a singular matrix raises NumericFailureError."""
    matrix = sparse.csc_matrix(matrix)
    try:
        return splu(matrix)
    except RuntimeError as exc:
        raise NumericFailureError(f'LU factorization failed: {exc}') from exc


def backward_error(matrix, solution, rhs):
    """Normwise backward error ||Ku - f|| / (||K|| ||u|| + ||f||)."""
    residual = matrix @ solution - rhs
    if sparse.issparse(matrix):
        norm = sparse_norm(matrix, np.inf)
    else:
        norm = np.linalg.norm(matrix, np.inf)
    scale = norm * np.linalg.norm(solution, np.inf) + np.linalg.norm(rhs, np.inf)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(residual, np.inf) / scale)


def solve_linear(system, ledger=None, phase='reference', tol=RESIDUAL_TOLERANCE):
    """Solve the constrained system by sparse LU and return the full nodal solution."""
    k_ff, load = system.reduced()
    size = load.size
    if size == 0:
        return system.expand(load)
    factor = lu_factorize(k_ff)
    solution = factor.solve(load)
    if not np.all(np.isfinite(solution)):
        raise NumericFailureError('LU solve produced non-finite values')
    error = backward_error(k_ff, solution, load)
    if error > tol:
        raise NumericFailureError(f'Linear solve residual {error:.3e} exceeds {tol:.1e}')
    if ledger is not None:
        ledger.charge(phase, size)
    return system.expand(solution)
