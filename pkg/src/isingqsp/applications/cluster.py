"""Cluster-Hamiltonian simulation targets.

The cluster model with field ``g0``, coupling ``J`` and anisotropy ``gamma``
(``J_x = J(1 + gamma)/2``, ``J_y = J(1 - gamma)/2``) has the momentum-space
Hamiltonian ``2(g0 - J cos 4k) sz + 2 J gamma sin 4k sx``. Its propagator's
``|+>`` element is ``cos(Omega_k T) - i n_x sin(Omega_k T)``; the real part
``cos(Omega_k T)`` is the response that a QSP sequence is fitted to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import linprog

from ..errors import ConvergenceError, DomainError, GaplessPointError
from ..momentum import plus_response
from ..solver import SolverOptions, solve_phases

__all__ = [
    "ClusterParams",
    "cluster_bdg",
    "cluster_dispersion",
    "cluster_evolution",
    "cluster_response_curve",
    "cluster_target",
    "minimax_even_fit",
    "qsp_approximate_cluster",
]

# amounts by which the fit bound |p| <= 1 is pulled in when the phase solve stalls
FIT_MARGINS = (0.0, 1e-9, 1e-6, 1e-4)


@dataclass(frozen=True)
class ClusterParams:
    g0: float
    J: float
    gamma: float
    T: float

    def __post_init__(self):
        vals = (self.g0, self.J, self.gamma, self.T)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("cluster parameters must be finite")
        if self.T < 0:
            raise DomainError(f"T must be non-negative, got {self.T!r}")


def _components(k, p: ClusterParams):
    k = np.asarray(k, dtype=float)
    hz = 2.0 * (p.g0 - p.J * np.cos(4 * k))
    hx = 2.0 * p.J * p.gamma * np.sin(4 * k)
    return hx, hz


def cluster_bdg(k: float, p: ClusterParams) -> np.ndarray:
    hx, hz = (float(v) for v in _components(k, p))
    return np.array([[hz, hx], [hx, -hz]], dtype=complex)


def cluster_omega(k, p: ClusterParams):
    """``Omega_k``; broadcasts over ``k`` and never raises."""
    hx, hz = _components(k, p)
    return np.hypot(hx, hz)


def cluster_dispersion(k: float, p: ClusterParams, *, tol: float = 1e-12) -> tuple[float, float, float]:
    """``(Omega_k, n_x, n_z)`` with the Hamiltonian equal to ``Omega_k (n_x sx + n_z sz)``.

    Raises
    ------
    GaplessPointError
        If ``Omega_k`` vanishes.
    """
    hx, hz = (float(v) for v in _components(k, p))
    om = math.hypot(hx, hz)
    if om <= tol:
        raise GaplessPointError(f"Omega_k = 0 at k = {k!r}; Bloch direction undefined")
    return om, hx / om, hz / om


def cluster_evolution(k: float, p: ClusterParams) -> np.ndarray:
    """``exp(-i H_k T)``."""
    if p.T == 0:
        return np.eye(2, dtype=complex)
    om, nx, nz = cluster_dispersion(k, p)
    c, s = math.cos(om * p.T), math.sin(om * p.T)
    return np.array([[c - 1j * nz * s, -1j * nx * s], [-1j * nx * s, c + 1j * nz * s]])


def cluster_response_curve(p: ClusterParams, kgrid: Iterable[float]) -> list[tuple[float, float]]:
    """``(k, cos^2(Omega_k T))`` in grid order; gapless points give 1."""
    ks = np.asarray(list(kgrid), dtype=float)
    vals = np.cos(cluster_omega(ks, p) * p.T) ** 2
    return list(zip(ks.tolist(), vals.tolist()))


def cluster_target(x, p: ClusterParams):
    """``cos(Omega T)`` as a function of ``x = cos k``, through ``cos 4k = 8x^4 - 8x^2 + 1``."""
    x = np.asarray(x, dtype=float)
    c4 = 8 * x**4 - 8 * x**2 + 1
    s4sq = np.clip(1 - c4**2, 0.0, None)
    om = 2.0 * np.sqrt((p.g0 - p.J * c4) ** 2 + (p.J * p.gamma) ** 2 * s4sq)
    return np.cos(om * p.T)


def minimax_even_fit(func, degree: int, samples: int = 2001, bound: float = 1.0) -> np.ndarray:
    """Even Chebyshev series of ``degree`` minimising the max error on a grid, with ``|p| <= bound``.

    Solved as a linear programme. Returns full-length Chebyshev coefficients.
    """
    x = np.cos(np.linspace(0.0, np.pi / 2, samples))
    fx = func(x)
    n = degree // 2 + 1
    basis = np.stack([C.chebval(x, np.eye(2 * j + 1)[-1]) for j in range(n)], axis=1)
    ones = np.ones((samples, 1))
    zeros = np.zeros((samples, 1))
    A = np.vstack([
        np.hstack([basis, -ones]),
        np.hstack([-basis, -ones]),
        np.hstack([basis, zeros]),
        np.hstack([-basis, zeros]),
    ])
    b = np.concatenate([fx, -fx, np.full(samples, bound), np.full(samples, bound)])
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=A, b_ub=b, bounds=[(None, None)] * (n + 1), method="highs")
    if res.status != 0:  # pragma: no cover
        raise DomainError(f"minimax fit failed: {res.message}")
    coef = np.zeros(degree + 1)
    coef[0::2] = res.x[:n]
    # the bound holds on the grid only; rescale if the polynomial pokes out in between
    dense = C.chebval(np.cos(np.linspace(0.0, np.pi, 20001)), coef)
    peak = float(np.max(np.abs(dense)))
    if peak > bound:
        coef *= bound / peak
    return coef


def qsp_approximate_cluster(
    p: ClusterParams,
    degree: int,
    *,
    samples: int = 2001,
    opts: SolverOptions | None = None,
) -> tuple[np.ndarray, float]:
    """Canonical phases whose ``<+|V|+>`` approximates ``cos(Omega_k T)``.

    Returns
    -------
    Phis : ndarray
        Canonical phases of length ``degree + 1``.
    max_error : float
        ``max_k |<+|V_k|+> - cos(Omega_k T)|`` on ``samples`` points of ``[0, pi]``.
    """
    if degree < 2 or degree % 2:
        raise DomainError(f"degree must be even and at least 2, got {degree}")
    base = opts or SolverOptions()
    solve_opts = SolverOptions(**{**base.__dict__, "response": "plus", "basis": "chebyshev", "degree": degree})
    # Where the fit touches |p| = 1, 1 - p^2 has double roots and the phase
    # solve can stall; pulling the bound in slightly costs at most the margin.
    for margin in FIT_MARGINS:
        coef = minimax_even_fit(lambda x: cluster_target(x, p), degree, samples, bound=1.0 - margin)
        last = margin == FIT_MARGINS[-1]
        try:
            # random restarts rarely rescue a stalled solve; keep them for the last attempt
            Phis = solve_phases(coef, solve_opts, restarts=solve_opts.restarts if last else 0)
            break
        except ConvergenceError:
            if last:
                raise
    ks = np.linspace(0.0, np.pi, samples)
    err = np.abs(plus_response(ks, Phis) - cluster_target(np.cos(ks), p))
    return Phis, float(np.max(err))
