"""Chaos expansions on disk: one JSON header line followed by CSV coefficient rows."""

import csv
import json
import logging
import os
import numpy as np
from src.chaos import PCExpansion, multi_index_set
from src.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)


def save_pce(pce, path, extra=None):
    """Write `pce` so that load_pce returns identical arrays."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    header = {'dim': pce.basis.dim, 'order': pce.basis.order,
              'n_dof': int(pce.coefficients.shape[1])}
    if extra:
        header.update(extra)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        f.write(json.dumps(header, sort_keys=True) + '\n')
        writer = csv.writer(f)
        for index, row in zip(pce.basis.indices, pce.coefficients):
            writer.writerow([' '.join(str(k) for k in index)] + [repr(float(v)) for v in row])
    logger.debug('Saved chaos expansion (%d terms) to %s', pce.basis.size, path)


def load_pce(path):
    """Read a file written by save_pce; returns (PCExpansion, header)."""
    with open(path, newline='', encoding='utf-8') as f:
        try:
            header = json.loads(f.readline())
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f'{path} has no chaos header') from exc
        rows = list(csv.reader(f))
    basis = multi_index_set(header['dim'], header['order'])
    if len(rows) != basis.size:
        raise InvalidArgumentError(f'{path}: expected {basis.size} rows, found {len(rows)}')
    for expected, row in zip(basis.indices, rows):
        if [int(k) for k in row[0].split()] != list(expected):
            raise InvalidArgumentError(f'{path}: multi-index order does not match')
    coefficients = np.array([[float(v) for v in row[1:]] for row in rows])
    return PCExpansion(basis, coefficients.reshape(basis.size, header['n_dof'])), header
