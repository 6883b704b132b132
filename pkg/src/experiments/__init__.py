"""Experiment orchestration: configs to problems, reference runs, metrics and reports."""
