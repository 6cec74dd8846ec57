"""Quantum signal processing for the transverse-field Ising chain.

Momentum-space QSP sequences, their Kramers-Wannier and space-time duals, a
dense spin-chain oracle, and the worked applications built on them.
"""

from .errors import (
    BranchError,
    ConvergenceError,
    DegenerateAxisError,
    DomainError,
    GaplessPointError,
    InfeasibleTargetError,
    QSPError,
    SingularParameterError,
)
from .momentum import (
    PhaseProgram,
    PolyPair,
    canonical_to_phases,
    effective_axis,
    extract_poly,
    kw_dual_transform,
    modified_qsp_general_theta,
    phases_to_canonical,
    plus_response,
    qsp_canonical,
    qsp_dual_momentum,
    qsp_momentum,
    signal_bdg,
)
from .solver import PhaseSolver, SolverOptions, solve_phases

__version__ = "0.1.0"
