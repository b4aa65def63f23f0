"""Structure-preserving global Krylov solvers for quaternion matrix equations."""

__all__ = ["__version__"]
__version__ = "0.3.1"
