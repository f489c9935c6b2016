"""Exact verification lab for derivation-refined gt-henselian field topologies."""

__version__ = "0.1.0"
