"""Completely positive reduced dynamics from correlated system-environment states.

Builds Kraus representations of reduced maps for two classes of correlated
initial states, checks them against the exact partial trace of the unitary
evolution, and provides Choi/CP diagnostics and qubit closed forms.
"""

from .analysis import ChannelRep, CpReport, channel_distance, cp_report, rep_from_kraus, rep_from_map
from .channels import (
    InvariantPovm,
    KrausSet,
    apply_kraus,
    build_kraus,
    build_phi1_kraus,
    build_phi2_kraus,
    build_phiI_kraus,
    build_phiII_kraus,
    invariant_povm,
    oracle_reduced,
)
from .linalg import ConvergenceError, DimensionError, NotHermitianError, hermitian_eig
from .scenarios import Scenario, named_case
from .states import (
    CorrelatedClassSpec,
    NonOrthogonalDecomposition,
    OrthogonalDecomposition,
    ValidationError,
    assemble_composite,
    ghjw_link,
    marginal,
    spectral_decompose,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelRep", "CpReport", "channel_distance", "cp_report", "rep_from_kraus", "rep_from_map",
    "InvariantPovm", "KrausSet", "apply_kraus", "build_kraus", "build_phi1_kraus",
    "build_phi2_kraus", "build_phiI_kraus", "build_phiII_kraus", "invariant_povm",
    "oracle_reduced", "ConvergenceError", "DimensionError", "NotHermitianError",
    "hermitian_eig", "Scenario", "named_case", "CorrelatedClassSpec",
    "NonOrthogonalDecomposition", "OrthogonalDecomposition", "ValidationError",
    "assemble_composite", "ghjw_link", "marginal", "spectral_decompose",
]
