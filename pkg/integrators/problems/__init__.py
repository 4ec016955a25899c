"""Shipped test systems."""
