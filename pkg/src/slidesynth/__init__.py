"""Symbolic slide layout synthesis, critique-driven refinement and quality scoring."""

__version__ = "0.1.0"
