"""Goodness-of-fit tests for multivariate skewed and heavy-tailed families
based on a weighted L2 distance between empirical characteristic functions."""

__version__ = "0.1.0"
