"""Spectral analysis of the Laplacian on Sierpinski lattices."""

from .decimation import R, dirichlet_gamma_spectrum, extend_eigenfunction, transfer_coefficients
from .eigenfunctions import FourSeriesSpec, build_4_series, build_series_eigenfunction, verify_eigen
from .julia import CodingWord, bowen_dimension, julia_cloud, sigma_family
from .lattice import VertexId, WordSpec, build_gamma, build_truncation, detect_boundary
from .operators import VertexFunction, apply_laplacian, assemble_matrix, eigensolve
from .spectrum import classify, in_spectrum, pm_product

__version__ = "0.1.0"

__all__ = [
    "R", "dirichlet_gamma_spectrum", "extend_eigenfunction", "transfer_coefficients",
    "FourSeriesSpec", "build_4_series", "build_series_eigenfunction", "verify_eigen",
    "CodingWord", "bowen_dimension", "julia_cloud", "sigma_family",
    "VertexId", "WordSpec", "build_gamma", "build_truncation", "detect_boundary",
    "VertexFunction", "apply_laplacian", "assemble_matrix", "eigensolve",
    "classify", "in_spectrum", "pm_product",
]
