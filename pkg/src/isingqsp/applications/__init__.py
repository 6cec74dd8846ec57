"""Worked examples: cluster-model targets, Hamiltonian reverse engineering, BB1."""

from .bb1 import BB1_CHI, bb1_phases, bb1_response, bb1_response_closed_form
from .cluster import (
    ClusterParams,
    cluster_bdg,
    cluster_dispersion,
    cluster_evolution,
    cluster_omega,
    cluster_response_curve,
    cluster_target,
    minimax_even_fit,
    qsp_approximate_cluster,
)
from .reverse import (
    BoxModel,
    QuadOptions,
    box_closed_form,
    box_fourier_coeffs,
    box_projection_oracle,
    box_reconstruction,
    pauli_string,
    re_dispersion,
    re_hamiltonian_terms,
)
