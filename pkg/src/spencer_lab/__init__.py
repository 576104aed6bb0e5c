"""Exact computations for Spencer cohomology, prolongations of relative
connections and linear Pfaffian forms in the constant-coefficient model."""

__version__ = "0.1.0"
