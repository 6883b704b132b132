"""Deterministic discretizations and the stochastic problems built on them."""
