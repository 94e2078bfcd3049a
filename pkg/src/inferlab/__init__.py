"""Severity assessment, Bayes factors and p-value simulation."""

__version__ = "0.1.0"

from inferlab.errors import ConvergenceError, DomainError, InferlabError

__all__ = ["ConvergenceError", "DomainError", "InferlabError", "__version__"]
