"""Module for reference solution cache managing."""

import csv
import json
import logging
import os
import numpy as np
from src.chaos import PCExpansion
from src.experiments.reference import ReferenceSolution
from src.infrastructure.files.pce_file import load_pce, save_pce
from .utils.cache_utils import config_digest, ensure_directory_exists, get_cache_directory

logger = logging.getLogger(__name__)


class ReferenceCache:
    """Manages reference solutions as CSV files keyed by a config digest."""

    def __init__(self, cache_dir=None):
        default_dir = os.path.join(get_cache_directory(), 'references')
        self.cache_dir = cache_dir if cache_dir else default_dir
        ensure_directory_exists(self.cache_dir)

    def path_for(self, key):
        """CSV path of the entry for a reference key mapping."""
        return os.path.join(self.cache_dir, f'{config_digest(key)}.csv')

    def save_reference(self, key, reference):
        """Store a reference solution under its key."""
        path = self.path_for(key)
        meta = {'method': reference.method, 'solves': reference.solves, 'size': reference.size,
                'seed': reference.seed}
        if reference.pce is not None:
            save_pce(reference.pce, path, extra=meta)
        else:
            rows = np.vstack([reference.mean, reference.std, reference.solutions])
            with open(path, 'w', newline='', encoding='utf-8') as f:
                f.write(json.dumps(meta, sort_keys=True) + '\n')
                writer = csv.writer(f)
                for row in rows:
                    writer.writerow([repr(float(v)) for v in row])
        logger.info('Reference saved to cache: %s', path)

    def load_reference(self, key):
        """Return the cached ReferenceSolution, or None on a miss."""
        path = self.path_for(key)
        if not os.path.exists(path):
            logger.info('Reference cache miss.')
            return None
        with open(path, newline='', encoding='utf-8') as f:
            meta = json.loads(f.readline())
        if meta['method'] == 'sparse-grid':
            pce, _ = load_pce(path)
            coefficients = pce.coefficients
            reference = ReferenceSolution(
                'sparse-grid', coefficients[0].copy(),
                np.sqrt(np.sum(coefficients[1:] ** 2, axis=0)), meta['solves'], meta['size'],
                pce=PCExpansion(pce.basis, coefficients))
        else:
            with open(path, newline='', encoding='utf-8') as f:
                f.readline()
                rows = np.array([[float(v) for v in row] for row in csv.reader(f)])
            reference = ReferenceSolution('monte-carlo', rows[0], rows[1], meta['solves'],
                                          meta['size'], solutions=rows[2:], seed=meta['seed'])
        logger.info('Reference loaded from cache: %s', path)
        return reference

    def list_entries(self):
        """(file name, metadata) for every cached reference."""
        entries = []
        for name in sorted(os.listdir(self.cache_dir)):
            if not name.endswith('.csv'):
                continue
            with open(os.path.join(self.cache_dir, name), encoding='utf-8') as f:
                try:
                    entries.append((name, json.loads(f.readline())))
                except json.JSONDecodeError:
                    logger.warning('Skipping unreadable cache entry %s', name)
        return entries

    def reset_cache(self):
        """Deletes every cached reference."""
        removed = 0
        for name, _ in self.list_entries():
            os.remove(os.path.join(self.cache_dir, name))
            removed += 1
        if removed:
            logger.info('Deleted %d cached references from %s', removed, self.cache_dir)
        else:
            logger.info('No cached references found to delete.')
        return removed
