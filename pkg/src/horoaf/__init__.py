"""Numerical checks of weighted Alexandrov-Fenchel inequalities for
hypersurfaces of hyperbolic space in the Poincare ball model."""

__version__ = "0.1.0"
