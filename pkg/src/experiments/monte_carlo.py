"""Monte Carlo reference statistics with streaming moment accumulation."""

import logging
from typing import NamedTuple
import numpy as np
from src.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

BATCH_SIZE = 64


class MonteCarloResult(NamedTuple):
    """Sample mean and std (ddof=1) plus the draws and, optionally, the stored solutions."""
    mean: np.ndarray
    std: np.ndarray
    samples: int
    seed: int
    draws: np.ndarray
    solutions: np.ndarray = None


def draw_xi(dim, count, seed):
    """count x dim standard normal draws from a seeded Philox generator."""
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.standard_normal((count, dim))


# pylint: disable=too-many-arguments, R0917
def mc_reference(problem, samples, seed, ledger=None, max_workers=1, keep_solutions=False):
    """Solve at `samples` independent draws, accumulating mean and variance with Welford updates."""
    if samples < 1:
        raise InvalidArgumentError(f'Need at least one Monte Carlo sample, got {samples}')
    draws = draw_xi(problem.dim, samples, seed)
    logger.info('Monte Carlo reference: %d samples, seed %d.', samples, seed)

    mean = np.zeros(problem.mesh.n_nodes)
    m2 = np.zeros(problem.mesh.n_nodes)
    stored = [] if keep_solutions else None
    count = 0
    for start in range(0, samples, BATCH_SIZE):
        batch = problem.solve_batch(draws[start:start + BATCH_SIZE], ledger=ledger,
                                    phase='reference', max_workers=max_workers)
        for row in batch:
            count += 1
            delta = row - mean
            mean += delta / count
            m2 += delta * (row - mean)
        if stored is not None:
            stored.append(batch)
        logger.debug('Monte Carlo: %d/%d samples done.', count, samples)

    variance = m2 / (count - 1) if count > 1 else np.zeros_like(m2)
    solutions = np.vstack(stored) if stored else None
    return MonteCarloResult(mean, np.sqrt(np.clip(variance, 0.0, None)), count, seed, draws,
                            solutions)
