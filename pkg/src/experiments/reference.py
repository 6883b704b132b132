"""Full-dimensional reference statistics by sparse-grid NISP or Monte Carlo."""

import logging
from typing import NamedTuple
import numpy as np
from src.chaos import multi_index_set, nisp_project, pce_mean, pce_std
from src.experiments.monte_carlo import draw_xi, mc_reference
from src.quadrature import smolyak_grid

logger = logging.getLogger(__name__)


class ReferenceSolution(NamedTuple):
    """Reference moments plus whatever is needed to sample it again.

    Sparse-grid references carry `pce`; Monte Carlo references carry the
    per-draw `solutions` (draws are regenerated from the seed).
    """
    method: str
    mean: np.ndarray
    std: np.ndarray
    solves: int
    size: int
    pce: object = None
    solutions: np.ndarray = None
    seed: int = None


def compute_reference(problem, reference, seed, ledger=None, max_workers=1, order=3):
    """Run the configured reference method; `reference` is the config section."""
    n_free = problem.mesh.n_nodes - problem.dirichlet()[0].size
    if reference['method'] == 'monte-carlo':
        result = mc_reference(problem, reference['samples'], seed, ledger=ledger,
                              max_workers=max_workers, keep_solutions=True)
        return ReferenceSolution('monte-carlo', result.mean, result.std, result.samples, n_free,
                                 solutions=result.solutions, seed=seed)

    grid = smolyak_grid(problem.dim, reference['level'])
    logger.info('Sparse-grid reference: %d solves (d=%d, level %d, order %d).', grid.size,
                problem.dim, reference['level'], order)
    samples = problem.solve_batch(grid.points, ledger=ledger, phase='reference',
                                  max_workers=max_workers)
    pce = nisp_project(grid, samples, multi_index_set(problem.dim, order),
                       dof_coords=problem.mesh.coords)
    return ReferenceSolution('sparse-grid', pce_mean(pce), pce_std(pce), grid.size, n_free,
                             pce=pce)


def reference_samples(reference, dim, count, seed):
    """(xi draws, reference values at those draws) for error estimates."""
    if reference.method == 'monte-carlo':
        count = min(count, reference.solutions.shape[0])
        return draw_xi(dim, reference.solutions.shape[0], reference.seed)[:count], \
            reference.solutions[:count]
    return draw_xi(dim, count, seed), reference.pce
