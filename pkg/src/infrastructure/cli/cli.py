"""chaos-dd CLI."""

import os
import subprocess
import sys
import yaml
import click
from src.exceptions import ChaosDDError
from src.experiments.report import render_report
from src.experiments.runner import run_experiment
from src.infrastructure.cache.reference_cache import ReferenceCache
from src.infrastructure.config.config import (
    CONFIG_FILE_PATH,
    DEFAULT_CONFIG,
    ensure_config_exists,
    load_config,
    max_workers,
    output_dir as default_output_dir,
    save_config,
)
from src.infrastructure.config.experiment_config import load_experiment_config
from src.infrastructure.files.dumps import write_grid
from src.infrastructure.logger.logger import logger, configure_logger
from src.quadrature import smolyak_grid

VALID_LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']


def fail(message):
    """Echo a one-line error and exit with status 1."""
    click.echo(message, err=True)
    sys.exit(1)


@click.group()
def cli():
    """Polynomial chaos with basis adaptation and domain decomposition."""
    config_data = load_config()
    log_level = str(config_data.get('LOG_LEVEL', 'INFO')).upper()

    if log_level not in VALID_LOG_LEVELS:
        click.echo(f"Invalid LOG_LEVEL '{log_level}' in configuration. Defaulting to 'INFO'.")
        log_level = 'INFO'

    configure_logger(log_level)


# run
@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False),
              help='Experiment config file (YAML or JSON).')
@click.option('--output-dir', default=None, type=click.Path(file_okay=False),
              help='Overrides output_dir from the experiment config.')
@click.option('--no-cache', is_flag=True, help='Always recompute the reference solution.')
def run(config_path, output_dir, no_cache):
    """Run an experiment and write its outputs."""
    app_config = load_config()
    try:
        experiment = load_experiment_config(config_path, output_dir=output_dir)
        if experiment.output_dir is None:
            experiment.values['output_dir'] = default_output_dir(app_config)
        cache = None if no_cache else ReferenceCache()
        result = run_experiment(experiment, max_workers=max_workers(app_config), cache=cache)
    except ChaosDDError as exc:
        logger.exception('Experiment failed: %s', exc)
        fail(f'Experiment failed: {exc}')
    except Exception as exc:  # pylint: disable=W0718
        logger.exception('Unexpected failure: %s', exc)
        fail(f'An unexpected error occurred: {exc}')
    else:
        click.echo(render_report(result.output_dir))


# grid
@cli.command()
@click.option('--dim', '-d', type=int, required=True, help='Stochastic dimension.')
@click.option('--level', '-l', type=int, required=True, help='Smolyak level.')
@click.option('--out', default=None, type=click.Path(dir_okay=False),
              help='Also write points and weights to this CSV file.')
def grid(dim, level, out):
    """Print the number of points of a Gauss-Hermite Smolyak grid."""
    try:
        sparse_grid = smolyak_grid(dim, level)
        if out:
            write_grid(out, sparse_grid)
    except ChaosDDError as exc:
        logger.exception('Grid construction failed: %s', exc)
        fail(f'Grid construction failed: {exc}')
    click.echo(sparse_grid.size)


# report
@cli.command()
@click.option('--dir', 'directory', required=True, type=click.Path(file_okay=False),
              help='Output directory of an earlier run.')
def report(directory):
    """Re-render the tables of a finished run."""
    try:
        click.echo(render_report(directory))
    except Exception as exc:  # pylint: disable=W0718
        logger.exception('Failed to render report: %s', exc)
        fail(f'An error occurred while rendering the report: {exc}')


# config
@cli.group()
def config():
    """View or edit configuration settings."""


# config show
@config.command('show')
def show_config():
    """Display the current configuration."""
    config_data = load_config()
    path_with_config = (
        f"Configuration path: {CONFIG_FILE_PATH}\n\n" +
        yaml.dump(config_data, default_flow_style=False)
    )
    click.echo(path_with_config)


# config edit
@config.command('edit')
def edit_config():
    """Open the configuration file in the default editor."""
    ensure_config_exists()
    editor = os.environ.get('EDITOR', 'notepad' if os.name == 'nt' else 'nano')
    click.echo(f"Opening config file at {CONFIG_FILE_PATH}...")
    try:
        subprocess.call([editor, CONFIG_FILE_PATH])
    except FileNotFoundError:
        message = f"Editor '{editor}' not found. Set the EDITOR environment variable."
        logger.error(message)
        click.echo(message)


# config reset
@config.command('reset')
def reset_config():
    """Reset the configuration to default values."""
    if click.confirm('Are you sure you want to reset the configuration to default values?'):
        save_config(DEFAULT_CONFIG)
        click.echo(f"Configuration reset to default values at {CONFIG_FILE_PATH}")


# cache
@cli.group()
def cache():
    """Manage cached reference solutions."""


# cache show
@cache.command('show')
def show_cache():
    """List cached reference solutions."""
    try:
        reference_cache = ReferenceCache()
        entries = reference_cache.list_entries()
        click.echo(f"Cache directory: {os.path.abspath(reference_cache.cache_dir)}")
        if not entries:
            click.echo("No cached references.")
        for name, meta in entries:
            click.echo(f"{name}  {meta.get('method')}  solves={meta.get('solves')} "
                       f"size={meta.get('size')}")
    except Exception as exc:  # pylint: disable=W0718
        logger.exception('Failed to show cache: %s', exc)
        click.echo(f"An error occurred while showing the cache: {exc}")


# cache reset
@cache.command('reset')
def reset_cache():
    """Delete every cached reference solution."""
    if click.confirm('Are you sure you want to reset the cache?'):
        try:
            removed = ReferenceCache().reset_cache()
            click.echo(f"Cache has been reset successfully ({removed} entries removed).")
        except Exception as exc:  # pylint: disable=W0718
            logger.exception('Failed to reset cache: %s', exc)
            click.echo(f"An error occurred while resetting the cache: {exc}")


if __name__ == '__main__':
    configure_logger()
    cli()
