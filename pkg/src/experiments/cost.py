"""Flop models for LU-based solves and the per-phase cost ledger."""

import logging
import threading
from collections import Counter
from src.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

PHASES = ('reference', 'gaussian', 'subdomain', 'interface', 'projection')


def flops_lu(n):
    """(2/3) n^3 + 2 n^2 for a dense LU factorization plus two triangular solves."""
    if n < 1:
        raise InvalidArgumentError(f'System size must be >= 1, got {n}')
    return 2.0 / 3.0 * n ** 3 + 2.0 * n ** 2


def cost_reference(q_ref, n):
    """Q_ref full-domain solves of size n."""
    if q_ref < 1:
        raise InvalidArgumentError(f'Point count must be >= 1, got {q_ref}')
    return q_ref * flops_lu(n)


def cost_dd(q_eta, interior_sizes, n_gamma):
    """Q_eta * sum_s (flops_lu(n_I^s) + flops_lu(n_Gamma)); empty blocks cost nothing."""
    if q_eta < 1:
        raise InvalidArgumentError(f'Point count must be >= 1, got {q_eta}')
    interface = flops_lu(n_gamma) if n_gamma else 0.0
    return q_eta * sum((flops_lu(n_i) if n_i else 0.0) + interface for n_i in interior_sizes)


def cost_projection(n_subdomains, q_eta, n_terms, n_gamma):
    """Flops for moving interface Schur matrices and vectors between adapted bases."""
    others = n_subdomains - 1
    matrix = n_subdomains * (others * q_eta * n_terms * (2 * n_gamma ** 2 - 1)
                             + n_subdomains * q_eta * n_gamma ** 2)
    vector = n_subdomains * (others * q_eta * n_terms * (2 * n_gamma - 1)
                             + n_subdomains * q_eta * n_gamma)
    return float(matrix + vector)


def cost_ratio(ref_flops, approx_flops):
    """CR = reference flops / approximate flops."""
    if approx_flops <= 0:
        raise InvalidArgumentError('Approximate cost must be positive')
    return ref_flops / approx_flops


class CostLedger:
    """Thread-safe flop counters per phase with a histogram of solve sizes."""

    def __init__(self):
        self._lock = threading.Lock()
        self.flops = dict.fromkeys(PHASES, 0.0)
        self.solves = dict.fromkeys(PHASES, 0)
        self.sizes = Counter()

    def _check(self, phase):
        if phase not in self.flops:
            raise InvalidArgumentError(f'Unknown ledger phase {phase!r}; expected one of {PHASES}')

    def charge(self, phase, n):
        """Record one LU solve of size n."""
        self._check(phase)
        flops = flops_lu(n)
        with self._lock:
            self.flops[phase] += flops
            self.solves[phase] += 1
            self.sizes[int(n)] += 1

    def charge_flops(self, phase, flops):
        """Record work that is not a single solve."""
        self._check(phase)
        if flops < 0:
            raise InvalidArgumentError('Flop counts cannot be negative')
        with self._lock:
            self.flops[phase] += float(flops)

    def merge(self, other):
        """Add another ledger's counters into this one."""
        with self._lock:
            for phase in PHASES:
                self.flops[phase] += other.flops[phase]
                self.solves[phase] += other.solves[phase]
            self.sizes.update(other.sizes)

    def total(self, phases=PHASES):
        """Sum of the given phase counters."""
        with self._lock:
            return sum(self.flops[phase] for phase in phases)

    def to_dict(self):
        """JSON-ready snapshot."""
        with self._lock:
            return {
                'flops': dict(self.flops),
                'solves': dict(self.solves),
                'sizes': {str(size): count for size, count in sorted(self.sizes.items())},
                'total': sum(self.flops.values()),
            }
