"""Shared model: systems, configuration, errors, dense algebra and solvers."""
