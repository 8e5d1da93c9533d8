"""Nodal DG solver for the 3D acoustic wave equations with a decoupled
absorbing layer, on unstructured tetrahedral meshes."""

__version__ = "0.1.0"

from .errors import ConfigError, InstabilityError, MeshError

__all__ = ["ConfigError", "InstabilityError", "MeshError", "__version__"]
