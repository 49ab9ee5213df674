"""Exact-arithmetic toolkit for Deligne systems, Deligne-Hodge systems,
relative monodromy filtrations, canonical splittings and SL(2)-orbits."""

__version__ = "0.1.0"
