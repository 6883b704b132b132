"""Experiment output files."""
