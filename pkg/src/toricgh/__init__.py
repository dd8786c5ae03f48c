"""Polytope distances, Delzant polytopes and Guillemin metrics on toric manifolds."""

__version__ = "0.1.0"
