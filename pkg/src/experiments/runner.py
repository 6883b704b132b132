"""End-to-end experiment: reference, Gaussian part, adapted decomposed solves, metrics, outputs."""

import logging
import os
from contextlib import contextmanager
from typing import NamedTuple
import numpy as np
from src.basis_adaptation import (
    adapted_nonlinear_solve,
    adapted_subdomain_solve,
    assemble_global_moments,
    build_bases,
    gaussian_part,
    sample_adapted_node,
    sample_adapted_solution,
)
from src.chaos import pce_sample
from src.domain_decomposition import partition_mesh
from src.exceptions import ExperimentError
from src.experiments.builders import build_problem, resolve_layouts
from src.experiments.cost import CostLedger, cost_ratio
from src.experiments.metrics import expected_sq_error_field, probe_pdf, rel_error_mean, rel_error_std
from src.experiments.monte_carlo import draw_xi
from src.experiments.reference import compute_reference, reference_samples
from src.infrastructure.files import dumps
from src.infrastructure.files.pce_file import save_pce

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ['N_D', 'r', 'mu_e_pct', 'sigma_e_pct', 'CR']


class RunResult(NamedTuple):
    """Table rows, the ledger payload and where outputs went."""
    table: list
    ledger: dict
    output_dir: str


@contextmanager
def phase(name):
    """Re-raise any failure inside the block as an ExperimentError tagged with `name`."""
    try:
        yield
    except ExperimentError:
        raise
    except Exception as exc:  # pylint: disable=W0718
        raise ExperimentError(name, f'{type(exc).__name__}: {exc}') from exc


def _reference(problem, config, ledger, cache, max_workers):
    """Reference solution, from the cache when possible."""
    key = config.reference_key()
    cached = cache.load_reference(key) if cache is not None else None
    if cached is not None:
        for _ in range(cached.solves):
            ledger.charge('reference', cached.size)
        return cached, True
    reference = compute_reference(problem, config.reference, config.seed, ledger=ledger,
                                  max_workers=max_workers, order=config.stochastic['order'])
    reference = reference._replace(solves=ledger.solves['reference'])
    if cache is not None:
        cache.save_reference(key, reference)
    return reference, False


def _probe_node(problem, point):
    """Nearest node to `point` that is not fixed by a Dirichlet condition."""
    fixed = problem.dirichlet()[0]
    free = np.setdiff1d(np.arange(problem.mesh.n_nodes), fixed)
    return problem.mesh.nearest_node(point, candidates=free)


def _pdf_rows(source, samples):
    """Rows of pdf_probe.csv for one set of probe samples."""
    x, density = probe_pdf(samples)
    return [[source, float(a), float(b)] for a, b in zip(x, density)]


def _probe_samples(reference, problem, node, count, seed):
    """Reference values at one node over `count` draws."""
    if reference.method == 'monte-carlo':
        return reference.solutions[:, node]
    single = reference.pce._replace(coefficients=reference.pce.coefficients[:, [node]])
    return pce_sample(single, draw_xi(problem.dim, count, seed))[:, 0]


def _write_fields(directory, mesh, reference, mean, std, eps, pdf_rows):
    """mean.csv, std.csv, eps.csv and pdf_probe.csv of one cell."""
    dumps.write_nodal(os.path.join(directory, 'mean.csv'), mesh.coords,
                      {'reference': reference.mean, 'adapted': mean})
    dumps.write_nodal(os.path.join(directory, 'std.csv'), mesh.coords,
                      {'reference': reference.std, 'adapted': std})
    dumps.write_nodal(os.path.join(directory, 'eps.csv'), mesh.coords, {'eps': eps})
    dumps.write_rows(os.path.join(directory, 'pdf_probe.csv'), ['source', 'x', 'density'],
                     pdf_rows)


# pylint: disable=too-many-locals, too-many-statements
def run_experiment(config, max_workers=1, cache=None):
    """Execute the configured pipeline and write every output file under config.output_dir."""
    out = config.output_dir or 'results'
    seed = int(config.seed)
    dd = config.dd

    with phase('reference'):
        problem = build_problem(config)
        mesh = problem.mesh
        reference_ledger = CostLedger()
        reference, cached = _reference(problem, config, reference_ledger, cache, max_workers)
        logger.info('Reference ready (%s, %d solves%s).', reference.method, reference.solves,
                    ', cached' if cached else '')

    with phase('gaussian'):
        gaussian_ledger = CostLedger()
        gp = gaussian_part(problem, config.gaussian['level'], ledger=gaussian_ledger,
                           max_workers=max_workers)

    with phase('metrics'):
        xi_eps, full = reference_samples(reference, problem.dim, config.metrics['eps_samples'],
                                         seed + 1)
        node = _probe_node(problem, config.metrics['probe'])
        pdf_count = config.metrics['pdf_samples']
        xi_pdf = draw_xi(problem.dim, pdf_count, seed + 2)
        reference_pdf = _pdf_rows('reference',
                                  _probe_samples(reference, problem, node, pdf_count, seed + 2))

    table, cells = [], []
    last = None
    for n_subdomains, layout in resolve_layouts(config):
        with phase('adaptation'):
            partition = partition_mesh(mesh, layout, problem.dirichlet()[0])
            bases = build_bases(problem, gp, partition, r=max(dd['reduced_dims']), seed=seed)
        cell_dir = os.path.join(out, f'nd{n_subdomains}')
        with phase('output'):
            dumps.write_partition(os.path.join(cell_dir, 'partition.csv'), partition, mesh.n_nodes)
            for basis in bases:
                dumps.write_eigenvalues(os.path.join(cell_dir, f'eigs_{basis.subdomain}.csv'),
                                        basis.mu)
                dumps.write_matrix(os.path.join(cell_dir, f'A_{basis.subdomain}.csv'), basis.matrix)

        for r in dd['reduced_dims']:
            cell_ledger = CostLedger()
            reduced = [basis._replace(r=r) for basis in bases]
            residuals = []
            with phase('subdomain'):
                if problem.is_linear:
                    solutions = adapted_subdomain_solve(
                        problem, partition, reduced, r, dd['level'], dd['order'],
                        ledger=cell_ledger, max_workers=max_workers)
                else:
                    solutions, residuals = adapted_nonlinear_solve(
                        problem, partition, reduced, gp, r, dd['level'], dd['order'],
                        max_outer=dd['max_outer'], tol=dd['tol'], ledger=cell_ledger,
                        max_workers=max_workers)
            with phase('metrics'):
                mean, std = assemble_global_moments(solutions, partition, problem)
                ratio = cost_ratio(reference_ledger.total(),
                                   gaussian_ledger.total() + cell_ledger.total())
                row = [n_subdomains, r, 100.0 * rel_error_mean(reference.mean, mean),
                       100.0 * rel_error_std(reference.std, std), ratio]
                eps = expected_sq_error_field(
                    full,
                    lambda block, parts=solutions, split=partition: sample_adapted_solution(
                        parts, split, problem, block),
                    xi_eps)
                adapted_pdf = _pdf_rows('adapted', sample_adapted_node(
                    solutions, partition, problem, node, xi_pdf))
            logger.info('N_D=%d r=%d: mu_e=%.3f%% sigma_e=%.3f%% CR=%.1f', *row)
            table.append(row)
            cells.append({'N_D': n_subdomains, 'r': r, 'ledger': cell_ledger.to_dict(),
                          'outer_residuals': residuals})
            with phase('output'):
                for s, part in enumerate(solutions):
                    save_pce(part.pce, os.path.join(cell_dir, f'pce_r{r}_{s}.csv'),
                             extra={'nodes': [int(n) for n in part.nodes]})
                _write_fields(os.path.join(cell_dir, f'r{r}'), mesh, reference, mean, std, eps,
                              reference_pdf + adapted_pdf)
            last = (mean, std, eps, adapted_pdf)

    with phase('output'):
        dumps.write_json(os.path.join(out, 'config.json'), config.to_dict())
        mean, std, eps, adapted_pdf = last
        _write_fields(out, mesh, reference, mean, std, eps, reference_pdf + adapted_pdf)
        dumps.write_eigenvalues(os.path.join(out, 'eigs_input.csv'), problem.field.kl.eigenvalues)
        dumps.write_matrix(os.path.join(out, 'kl_modes.csv'), problem.field.kl.eigenfunctions)
        dumps.write_rows(os.path.join(out, 'table.csv'), TABLE_COLUMNS, table)
        ledger = {
            'seed': seed,
            'probe_node': node,
            'reference': dict(reference_ledger.to_dict(), method=reference.method,
                              cached=cached),
            'gaussian': gaussian_ledger.to_dict(),
            'cells': cells,
        }
        dumps.write_json(os.path.join(out, 'ledger.json'), ledger)
    logger.info('Experiment outputs written to %s', out)
    return RunResult(table, ledger, out)
