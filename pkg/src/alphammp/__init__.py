"""Exact tools for rational points on split rational surfaces.

Picard-lattice intersection theory, adjoint-pair contraction runs,
approximation constants on rational curves, and an interval-certified
numerical lab for Diophantine approximation experiments.
"""

__version__ = "0.1.0"

from .lattice import (ConeCertificate, DivisorClass, IntersectionForm,
                      SurfaceModel, build_surface, eff_membership,
                      eff_threshold, enumerate_minus_one_classes, intersect,
                      is_ample, solve_classes)

__all__ = [
    "ConeCertificate", "DivisorClass", "IntersectionForm", "SurfaceModel",
    "build_surface", "eff_membership", "eff_threshold",
    "enumerate_minus_one_classes", "intersect", "is_ample", "solve_classes",
    "__version__",
]
