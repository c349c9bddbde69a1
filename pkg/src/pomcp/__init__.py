"""Uniform P-matroids, their single-element extensions, and the unique sink
orientations of the n-cube they induce."""

from .chirotope import Chirotope, Symmetry, check_axioms, evaluate, relabel, reorient
from .cube import CubeOrientation, holt_klee, is_acyclic, is_uso, orient_from_extension, orient_from_lcp
from .extension import ExtensionSignature, enumerate_uniform_extensions
from .lcp import LcpInstance, is_p_matrix, solve_spp
from .pipeline import PipelineConfig, RunReport, emit_report, run_pipeline
from .pmatroid import cfs_canonical_form, enumerate_uniform_p_matroids, is_p_matroid

__all__ = [
    "Chirotope", "Symmetry", "check_axioms", "evaluate", "relabel", "reorient",
    "CubeOrientation", "holt_klee", "is_acyclic", "is_uso", "orient_from_extension", "orient_from_lcp",
    "ExtensionSignature", "enumerate_uniform_extensions",
    "LcpInstance", "is_p_matrix", "solve_spp",
    "PipelineConfig", "RunReport", "emit_report", "run_pipeline",
    "cfs_canonical_form", "enumerate_uniform_p_matroids", "is_p_matroid",
]
__version__ = "0.1.0"
