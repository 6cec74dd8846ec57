"""Floquet analysis of the periodic sequence and of its space-time dual.

The periodic sequence has interaction angle ``pi/4`` and every field phase
equal to ``(pi/2)(1 - 2 eps)``, with ``eps`` the over-rotation error. One
period is::

    F_k = exp(i pi/2 (sz cos k - sx sin k)) exp(-i pi (1 - 2 eps) sz).

Its space-time dual has the complex coupling
``theta_dual = -pi/4 + (i/2) log tan(pi/2 (1 - 2 eps))``::

    F_dual_k = exp(i pi/2 sz) exp(2i theta_dual (sz cos k - sx sin k)),

which keeps unit determinant but is generally not unitary.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BranchError, SingularParameterError
from .su2 import SX, SZ, eigenvalues, is_unitary, rot_components, wrap_phase, xrot, zrot

__all__ = [
    "ScanRecord",
    "floquet_op",
    "floquet_scan",
    "dual_theta",
    "dual_floquet_op",
    "dual_scan",
    "unitarity_region",
    "unitarity_region_by_diagonalization",
    "k_half_pi_sequence",
    "k_half_pi_closed_form",
]


@dataclass(frozen=True)
class ScanRecord:
    """One (k, eps) cell of a Floquet scan.

    ``mu`` is ``None`` when the operator's spectrum is not unitary.
    """

    k: float
    eps: float
    mu: tuple[float, float] | None
    lambda_mods: tuple[float, float]
    unitary: bool


def _processing_angle(eps: float) -> float:
    return math.pi * (1.0 - 2.0 * eps)


def floquet_op(k: float, eps: float) -> np.ndarray:
    """One period ``exp(i pi/2 n_k.sigma) exp(-i pi (1 - 2 eps) sz)``, ``n_k = (-sin k, 0, cos k)``."""
    sig = rot_components(-math.sin(k), 0.0, math.cos(k), math.pi / 2)
    return sig @ zrot(-_processing_angle(eps))


def _record(k: float, eps: float, u: np.ndarray, tol: float) -> ScanRecord:
    lam = eigenvalues(u)
    mods = (abs(lam[0]), abs(lam[1]))
    unitary = all(abs(m - 1.0) <= tol for m in mods)
    mu = None
    if unitary:
        mu = tuple(sorted(wrap_phase(-cmath.phase(z)) for z in lam))
    return ScanRecord(float(k), float(eps), mu, mods, unitary)


def floquet_scan(kgrid: Iterable[float], epsgrid: Iterable[float], tol: float = 1e-8) -> list[ScanRecord]:
    """Quasienergies of :func:`floquet_op` on a grid, k-major order."""
    epsgrid = list(epsgrid)
    return [_record(k, e, floquet_op(k, e), tol) for k in kgrid for e in epsgrid]


def dual_theta(eps: float) -> complex:
    """Complex coupling of the dual circuit.

    Raises
    ------
    SingularParameterError
        At ``eps`` where ``tan(pi/2 (1 - 2 eps))`` is infinite or zero.
    BranchError
        Where the tangent is negative and the principal logarithm would
        silently pick a branch.
    """
    arg = 0.5 * _processing_angle(eps)
    c, s = math.cos(arg), math.sin(arg)
    if abs(c) < 1e-15 or abs(s) < 1e-15:
        raise SingularParameterError(
            f"tan(pi/2 (1 - 2 eps)) is singular at eps = {eps!r}"
        )
    if s / c < 0:
        raise BranchError(f"tan(pi/2 (1 - 2 eps)) < 0 at eps = {eps!r}; log branch undefined")
    # log tan(pi/4 + delta) = 2 atanh(tan delta) is exactly zero at eps = 1/4
    delta = math.remainder(math.pi / 4 * (1.0 - 4.0 * eps), math.pi)
    return complex(-math.pi / 4, math.atanh(math.tan(delta)))


def dual_floquet_op(k: float, eps: float) -> np.ndarray:
    """``exp(i pi/2 sz) exp(2i theta_dual (sz cos k - sx sin k))`` with complex ``theta_dual``."""
    th = dual_theta(eps)
    gen = SZ * math.cos(k) - SX * math.sin(k)
    # gen squares to the identity, so the exponential is cos + i sin even for complex angles
    sig = cmath.cos(2 * th) * np.eye(2) + 1j * cmath.sin(2 * th) * gen
    return zrot(math.pi / 2) @ sig


def dual_scan(kgrid: Iterable[float], epsgrid: Iterable[float], tol: float = 1e-6) -> list[ScanRecord]:
    """Eigenvalue data of :func:`dual_floquet_op`, k-major order."""
    epsgrid = list(epsgrid)
    return [_record(k, e, dual_floquet_op(k, e), tol) for k in kgrid for e in epsgrid]


def unitarity_region(kgrid: Sequence[float], epsgrid: Sequence[float], tol: float = 1e-6) -> np.ndarray:
    """Boolean table, rows = k: both dual eigenvalue moduli within ``tol`` of 1.

    The criterion is spectral. At ``|k| = pi/2`` the dual operator is not a
    normal matrix, yet its eigenvalues stay on the unit circle.
    """
    table = np.zeros((len(kgrid), len(epsgrid)), dtype=bool)
    for i, k in enumerate(kgrid):
        for j, e in enumerate(epsgrid):
            mods = [abs(z) for z in eigenvalues(dual_floquet_op(k, e))]
            table[i, j] = all(abs(m - 1.0) <= tol for m in mods)
    return table


def unitarity_region_by_diagonalization(
    kgrid: Sequence[float], epsgrid: Sequence[float], tol: float = 1e-6
) -> np.ndarray:
    """Independent recomputation: ``is_unitary`` on the diagonalised dual operator."""
    table = np.zeros((len(kgrid), len(epsgrid)), dtype=bool)
    for i, k in enumerate(kgrid):
        for j, e in enumerate(epsgrid):
            w = np.linalg.eigvals(dual_floquet_op(k, e))
            table[i, j] = is_unitary(np.diag(w), tol)
    return table


def k_half_pi_sequence(d: int, eps: float) -> np.ndarray:
    """Explicit product ``prod_{r=1..d} (-i sx) exp(-i pi (1 - 2 eps) sz)``.

    At ``k = pi/2`` and ``theta = pi/4`` each signal factor is ``-i sx``.
    """
    if d < 1:
        raise ValueError("d must be a positive integer")
    step = xrot(-math.pi / 2) @ zrot(-_processing_angle(eps))
    out = np.eye(2, dtype=complex)
    for _ in range(d):
        out = out @ step
    return out


def k_half_pi_closed_form(d: int, eps: float) -> np.ndarray:
    """Closed form of :func:`k_half_pi_sequence` up to a scalar: ``I`` (even d) or ``sx exp(-i pi (1-2eps) sz)`` (odd d)."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    if d % 2 == 0:
        return np.eye(2, dtype=complex)
    return SX @ zrot(-_processing_angle(eps))
