"""Supervised two-dimensional dimensionality reduction with repulsion
graphs, vector-space baselines, and a recognition benchmark harness."""

__version__ = "0.1.0"
