"""Autostackable group structures: automata, prefix rewriting, stacking maps,
Cayley-graph balls and van Kampen diagrams."""

__version__ = "0.1.0"
