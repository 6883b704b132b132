"""Error norms against a reference, the expected squared error field and probe densities."""

import logging
import numpy as np
from scipy.stats import gaussian_kde
from src.chaos import CHUNK_POINTS, pce_sample
from src.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)


def _scaled_error(reference, approx):
    """||(ref - approx) / max|ref| ||_2 / sqrt(n).

    For non-negative fields (saturation, std, the shipped diffusion heads)
    max|ref| is max(ref). Suction heads are non-positive with max(ref) = 0 on a saturated
    boundary, so the peak magnitude is used throughout.
    """
    reference = np.asarray(reference, dtype=float)
    approx = np.asarray(approx, dtype=float)
    if reference.shape != approx.shape:
        raise InvalidArgumentError(f'Field shapes differ: {reference.shape} vs {approx.shape}')
    peak = np.max(np.abs(reference))
    if peak == 0.0:
        raise InvalidArgumentError('Reference field is identically zero')
    return float(np.linalg.norm((reference - approx) / peak) / np.sqrt(reference.size))


def rel_error_mean(ref_mean, approx_mean):
    """||(mu_ref - mu) / max|mu_ref| ||_2 / sqrt(n)."""
    return _scaled_error(ref_mean, approx_mean)


def rel_error_std(ref_std, approx_std):
    """||(sigma_ref - sigma) / max|sigma_ref| ||_2 / sqrt(n)."""
    return _scaled_error(ref_std, approx_std)


def expected_sq_error_field(full, reduced_sampler, xi_draws):
    """Monte Carlo estimate of E[(u(xi) - u_r(eta(xi)))^2] at every node.

    `full` is a chaos in xi or an M x n array of samples already taken at
    `xi_draws`; `reduced_sampler(xi_block)` returns the reduced solution.
    """
    xi_draws = np.atleast_2d(np.asarray(xi_draws, dtype=float))
    count = xi_draws.shape[0]
    if count == 0:
        raise InvalidArgumentError('Need at least one draw')
    total = None
    for start in range(0, count, CHUNK_POINTS):
        block = xi_draws[start:start + CHUNK_POINTS]
        if isinstance(full, np.ndarray):
            exact = full[start:start + CHUNK_POINTS]
        else:
            exact = pce_sample(full, block)
        squared = np.sum((exact - reduced_sampler(block)) ** 2, axis=0)
        total = squared if total is None else total + squared
    return total / count


def probe_pdf(samples, grid_points=200):
    """Gaussian KDE with Silverman bandwidth: returns (x, density).

    Constant samples have no density; callers keep the probe off Dirichlet nodes.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 2 or np.ptp(samples) == 0.0:
        raise InvalidArgumentError(
            f'Probe density needs at least two distinct samples, got {samples.size} '
            f'with spread {float(np.ptp(samples)) if samples.size else 0.0:.1e}')
    kde = gaussian_kde(samples, bw_method='silverman')
    logger.debug('KDE over %d samples, bandwidth factor %.3f', samples.size, kde.factor)
    pad = 3.0 * kde.factor * samples.std()
    x = np.linspace(samples.min() - pad, samples.max() + pad, grid_points)
    return x, kde(x)
