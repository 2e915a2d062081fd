"""Renyi divergences, Renyi mutual information and thermal area laws."""

__version__ = "0.1.0"

from .linalg import DensityOperator, partial_trace  # noqa: E402
from .divergences import divergence, mutual_information  # noqa: E402

__all__ = ["__version__", "DensityOperator", "partial_trace", "divergence", "mutual_information"]
