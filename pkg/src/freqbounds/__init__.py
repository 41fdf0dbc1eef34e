"""Numerical study of generalized principal frequencies on convex planar sets.

The package computes the shape functionals

    lambda_{2,q}(Omega) = inf  |grad u|_{L^2}^2 / |u|_{L^q}^2   (u vanishing on the boundary)

together with torsional rigidity T(Omega) = 1/lambda_{2,1}(Omega), exact
convex-geometry quantities (inradius, Minkowski gauge, boundary integrals,
inner parallel bodies) and the one-dimensional Poincare-Sobolev constants
pi_{2,q}.  On top of those it checks a family of sharp inequalities relating
lambda_{2,q} to volume and inradius on concrete shape families.
"""

from . import bounds, geometry, onedim, solver

__all__ = ["geometry", "onedim", "solver", "bounds"]
__version__ = "0.1.0"
