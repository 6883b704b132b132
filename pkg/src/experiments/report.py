"""Re-render stored experiment results as plain text."""

import json
import os
from src.exceptions import InvalidArgumentError
from src.experiments.cost import PHASES
from src.infrastructure.files.dumps import read_table


def load_results(directory):
    """(table rows, ledger) from an experiment output directory."""
    table_path = os.path.join(directory, 'table.csv')
    ledger_path = os.path.join(directory, 'ledger.json')
    for path in (table_path, ledger_path):
        if not os.path.exists(path):
            raise InvalidArgumentError(f'Missing result file: {path}')
    with open(ledger_path, encoding='utf-8') as f:
        ledger = json.load(f)
    return read_table(table_path), ledger


def format_table(rows):
    """Aligned N_D / r / mu_e / sigma_e / CR table."""
    lines = [f"{'N_D':>4} {'r':>3} {'mu_e %':>9} {'sigma_e %':>10} {'CR':>10}"]
    for row in rows:
        lines.append(f"{int(row['N_D']):>4} {int(row['r']):>3} {float(row['mu_e_pct']):>9.3f} "
                     f"{float(row['sigma_e_pct']):>10.3f} {float(row['CR']):>10.1f}")
    return '\n'.join(lines)


def format_ledger(ledger):
    """Per-phase flop totals summed over the reference, the Gaussian part and every cell."""
    totals = dict.fromkeys(PHASES, 0.0)
    sections = [ledger['reference'], ledger['gaussian']] + [cell['ledger'] for cell in ledger['cells']]
    for section in sections:
        for name, flops in section['flops'].items():
            totals[name] += flops
    lines = [f'{name:<11} {flops:>14.4e}' for name, flops in totals.items()]
    lines.append(f"{'total':<11} {sum(totals.values()):>14.4e}")
    for cell in ledger['cells']:
        if cell['outer_residuals']:
            history = ', '.join(f'{value:.2e}' for value in cell['outer_residuals'])
            lines.append(f"outer residuals N_D={cell['N_D']} r={cell['r']}: {history}")
    return '\n'.join(lines)


def render_report(directory):
    """Full text report for `chaos-dd report`."""
    rows, ledger = load_results(directory)
    method = ledger['reference'].get('method', 'unknown')
    return (f'Results in {directory} (reference: {method}, seed {ledger["seed"]})\n\n'
            f'{format_table(rows)}\n\nFlops by phase\n{format_ledger(ledger)}')
