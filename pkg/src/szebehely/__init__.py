"""Toolkit for the generalized inverse problem of dynamics in dimension
three: given two families of surfaces and a constant symmetric multiplier
metric, build the associated geometric fields, classify the problem's
integrability case, verify candidate potentials and energies, search the
metric parameters for favourable cases, and demonstrate solutions by
numerical integration."""

__version__ = "0.1.0"
