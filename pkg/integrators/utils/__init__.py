"""Top-level utils package for integrators."""
