"""Experiment driver: trajectories, studies and CSV output."""
