"""CSV and JSON writers for experiment outputs."""

import csv
import json
import logging
import os
import numpy as np

logger = logging.getLogger(__name__)

AXES = ('x', 'y')


def _fmt(value):
    return repr(float(value))


def _open_for_write(path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    return open(path, 'w', newline='', encoding='utf-8')


def write_rows(path, header, rows):
    """Generic CSV writer; floats are written with repr for exact round trips."""
    with _open_for_write(path) as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    logger.debug('Wrote %s', path)


def write_nodal(path, coords, columns):
    """`x[,y],<name>...` per node; `columns` maps names to nodal vectors."""
    coords = np.asarray(coords, dtype=float).reshape(len(coords), -1)
    names = list(columns)
    header = list(AXES[:coords.shape[1]]) + names
    rows = (list(point) + [columns[name][node] for name in names]
            for node, point in enumerate(coords))
    write_rows(path, header, ([float(v) for v in row] for row in rows))


def write_eigenvalues(path, values):
    """`index,eigenvalue,ratio` with ratio = value / leading value."""
    values = np.asarray(values, dtype=float)
    lead = values[0] if values.size and values[0] > 0 else 1.0
    write_rows(path, ['index', 'eigenvalue', 'ratio'],
               ([i + 1, float(v), float(v / lead)] for i, v in enumerate(values)))


def write_matrix(path, matrix):
    """Plain CSV matrix without a header."""
    with _open_for_write(path) as f:
        writer = csv.writer(f)
        for row in np.atleast_2d(matrix):
            writer.writerow([_fmt(v) for v in row])


def write_partition(path, partition, n_nodes):
    """`node,subdomain,interface`; Dirichlet nodes carry subdomain -1."""
    subdomain = np.full(n_nodes, -1)
    free_owner = partition.owner[partition.free_nodes]
    subdomain[partition.free_nodes] = free_owner
    on_interface = np.zeros(n_nodes, dtype=int)
    on_interface[partition.free_nodes[partition.interface]] = 1
    write_rows(path, ['node', 'subdomain', 'interface'],
               ([node, int(subdomain[node]), int(on_interface[node])] for node in range(n_nodes)))


def write_grid(path, grid):
    """Sparse grid as `xi_1..xi_d,weight` with 17 significant digits."""
    with _open_for_write(path) as f:
        writer = csv.writer(f)
        writer.writerow([f'xi_{k + 1}' for k in range(grid.dim)] + ['weight'])
        for point, weight in zip(grid.points, grid.weights):
            writer.writerow([format(v, '.17g') for v in point] + [format(weight, '.17g')])


def write_json(path, payload):
    """Pretty JSON with sorted keys."""
    with _open_for_write(path) as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write('\n')


def read_table(path):
    """Rows of a CSV written by write_rows as dicts of strings."""
    with open(path, newline='', encoding='utf-8') as f:
        return list(csv.DictReader(f))
