"""Numerical laboratory for empirical-process suprema, nonparametric
learning rates, and entropic optimal transport under mixing dependence."""

__version__ = "0.1.0"

from . import classes, empirical, mixing, ot, rates  # noqa: F401
