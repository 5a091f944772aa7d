"""Dependency-tree metrics and diachronic trend analysis for treebanks."""

__version__ = "0.1.0"
