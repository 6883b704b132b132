"""Stochastic boundary-value problems: a random coefficient field plus a deterministic discretization."""

import logging
from concurrent.futures import ThreadPoolExecutor
import numpy as np
from src.pde.assembly import solve_linear
from src.pde.diffusion import assemble_diffusion_2d, dirichlet_constraints, DEFAULT_BCS
from src.pde.richards import (
    assemble_richards_linear_1d,
    assemble_richards_nonlinear_1d,
    linear_profile,
    richards_dirichlet,
    solve_richards_nonlinear_1d,
    validate_gardner,
    validate_van_genuchten,
)
from src.random_field import evaluate_field

logger = logging.getLogger(__name__)


class StochasticProblem:
    """A PDE whose coefficient is the log-normal field `field` evaluated at xi."""

    name = 'abstract'
    is_linear = True

    def __init__(self, mesh, field):
        self.mesh = mesh
        self.field = field

    @property
    def dim(self):
        """Stochastic dimension."""
        return self.field.dim

    def coefficient(self, xi):
        """Nodal coefficient at xi."""
        return evaluate_field(self.field, xi)

    def dirichlet(self):
        """(dofs, values) fixed on the boundary, independent of xi."""
        raise NotImplementedError

    def assemble(self, xi, state=None, elements=None, owned_nodes=None):
        """LinearSystem at xi, linearized about `state` for nonlinear problems."""
        raise NotImplementedError

    def initial_state(self, xi):
        """Starting iterate of a nonlinear solve; None for linear problems."""
        return None

    def residual(self, xi, state):
        """Residual norm of a full nodal state, coefficients frozen at that state."""
        return self.assemble(xi, state=state).residual_norm(state)

    def solve(self, xi, ledger=None, phase='reference'):
        """Full nodal solution at xi."""
        return solve_linear(self.assemble(xi), ledger=ledger, phase=phase)

    def solve_batch(self, xis, ledger=None, phase='reference', max_workers=1):
        """Solve at every row of `xis`; rows come back in input order."""
        xis = np.atleast_2d(xis)
        if max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as executor:
                rows = list(executor.map(lambda xi: self.solve(xi, ledger, phase), xis))
        else:
            rows = [self.solve(xi, ledger, phase) for xi in xis]
        logger.debug('Solved %s at %d collocation points.', self.name, len(rows))
        return np.array(rows)


class DiffusionProblem2D(StochasticProblem):
    """-div(a grad u) = f on a rectangle, Dirichlet on x = 0 and x = L_x, point sink."""

    name = 'diffusion-2d'

    def __init__(self, mesh, field, sink=None, bcs=None):
        super().__init__(mesh, field)
        self.sink = sink
        self.bcs = DEFAULT_BCS if bcs is None else bcs

    def dirichlet(self):
        return dirichlet_constraints(self.mesh, self.bcs)

    def assemble(self, xi, state=None, elements=None, owned_nodes=None):
        return assemble_diffusion_2d(self.mesh, self.coefficient(xi), self.sink, self.bcs,
                                     elements=elements, owned_nodes=owned_nodes)


class LinearRichardsProblem(StochasticProblem):
    """Saturation-form Richards equation with Gardner layers and random K_s."""

    name = 'richards-linear-1d'

    def __init__(self, mesh, field, model, bcs):
        super().__init__(mesh, field)
        validate_gardner(model)
        self.model = model
        self.bcs = bcs

    def dirichlet(self):
        bottom = self.mesh.boundary['bottom']
        return bottom, np.full(bottom.size, float(self.bcs['theta0']))

    def assemble(self, xi, state=None, elements=None, owned_nodes=None):
        return assemble_richards_linear_1d(self.mesh, self.model, self.coefficient(xi), self.bcs,
                                           elements=elements, owned_nodes=owned_nodes)


class NonlinearRichardsProblem(StochasticProblem):
    """Pressure-form Richards equation with van Genuchten conductivity and random K_s."""

    name = 'richards-nonlinear-1d'
    is_linear = False

    # pylint: disable=too-many-arguments, R0917
    def __init__(self, mesh, field, model, bcs, tol=1e-10, max_iters=200):
        super().__init__(mesh, field)
        validate_van_genuchten(model)
        self.model = model
        self.bcs = bcs
        self.tol = tol
        self.max_iters = max_iters

    def dirichlet(self):
        return richards_dirichlet(self.mesh, self.bcs)

    def initial_state(self, xi):
        return linear_profile(self.mesh, self.bcs)

    def assemble(self, xi, state=None, elements=None, owned_nodes=None):
        state = self.initial_state(xi) if state is None else state
        return assemble_richards_nonlinear_1d(self.mesh, self.model, self.coefficient(xi), state,
                                              self.bcs, elements=elements)

    def solve(self, xi, ledger=None, phase='reference'):
        psi, iterations = solve_richards_nonlinear_1d(
            self.mesh, self.model, self.coefficient(xi), self.bcs, tol=self.tol,
            max_iters=self.max_iters, ledger=ledger, phase=phase)
        logger.debug('Nonlinear Richards solve converged in %d Picard iterations.', iterations)
        return psi
