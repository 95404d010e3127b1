"""Quantum lattice gas simulators for Dirac, BCS/BdG and mean-field superfluid dynamics."""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, GapOverflowError  # noqa: E402

__all__ = ["ConfigError", "DomainError", "GapOverflowError", "__version__"]
