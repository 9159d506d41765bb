"""Exact-arithmetic workbench for minimal homotopy-algebra models,
formality obstruction sequences, and transfer-of-formality checks."""

__version__ = "0.1.0"
