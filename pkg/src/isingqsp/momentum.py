"""Momentum-space QSP sequences for the transverse-field Ising circuit.

Each momentum pair ``(k, -k)`` evolves under a 2x2 propagator. With interaction
angle ``theta`` and field phases ``phis = (phi_0, ..., phi_d)``::

    U_k = exp(-2i phi_0 sz) prod_r S_k exp(-2i phi_r sz),
    S_k = cos(2 theta) I + i sin(2 theta) (sz cos k - sx sin k).

At ``theta = pi/4`` the same product is the canonical sequence
``exp(i Phi_0 sz) prod_r exp(-i k sx) exp(i Phi_r sz)`` whose corner entries are
polynomials in ``x = cos k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P

from .errors import DegenerateAxisError, DomainError, QSPError
from .su2 import dagger, rot_components, yrot, zrot

__all__ = [
    "PhaseProgram",
    "PolyPair",
    "signal_bdg",
    "qsp_momentum",
    "qsp_dual_momentum",
    "kw_dual_transform",
    "phases_to_canonical",
    "canonical_to_phases",
    "qsp_canonical",
    "extract_poly",
    "modified_qsp_general_theta",
    "effective_axis",
    "plus_response",
]

QUARTER_PI = math.pi / 4


def _as_phases(values, name: str, min_len: int = 1) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    if arr.size < min_len:
        raise DomainError(f"{name} needs at least {min_len} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class PhaseProgram:
    """Interaction angle and field phases of an Onsager-picture sequence.

    Attributes
    ----------
    theta : float
        Coupling angle in radians.
    phis : tuple of float
        ``(phi_0, ..., phi_d)``; the degree is ``len(phis) - 1``.
    """

    theta: float
    phis: tuple[float, ...]

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise DomainError("theta must be finite")
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "phis", tuple(float(p) for p in _as_phases(self.phis, "phis")))

    @property
    def degree(self) -> int:
        return len(self.phis) - 1

    def to_json(self) -> dict:
        return {"theta": self.theta, "phis": list(self.phis)}

    @classmethod
    def from_json(cls, data: dict) -> "PhaseProgram":
        return cls(data["theta"], tuple(data["phis"]))


@dataclass(frozen=True)
class PolyPair:
    """Corner polynomials of a canonical sequence, power basis, low degree first.

    ``U[0, 0] = P(x)`` and ``U[0, 1] = i Q(x) sin k`` with ``x = cos k`` and
    ``k`` in ``[0, pi]``.
    """

    P: np.ndarray
    Q: np.ndarray
    degree: int

    def eval_P(self, x):
        return P.polyval(x, self.P)

    def eval_Q(self, x):
        return P.polyval(x, self.Q)

    def normalization_error(self, n: int = 201) -> float:
        x = np.linspace(-1.0, 1.0, n)
        val = np.abs(self.eval_P(x)) ** 2 + (1 - x**2) * np.abs(self.eval_Q(x)) ** 2
        return float(np.max(np.abs(val - 1.0)))


def signal_bdg(k, theta: float) -> np.ndarray:
    """Signal factor ``exp(2i theta (sz cos k - sx sin k))``."""
    k = np.asarray(k, dtype=float)
    return rot_components(-np.sin(k), 0.0, np.cos(k), 2.0 * theta)


def _field(phi, like) -> np.ndarray:
    return np.broadcast_to(zrot(-2.0 * phi), like.shape[:-2] + (2, 2))


def qsp_momentum(k, prog: PhaseProgram) -> np.ndarray:
    """Propagator of the Onsager-picture sequence in the ``(k, -k)`` block.

    ``k`` may be a scalar or an array; the result has shape ``k.shape + (2, 2)``.
    """
    sig = signal_bdg(k, prog.theta)
    out = _field(prog.phis[0], sig).copy()
    for phi in prog.phis[1:]:
        out = out @ sig @ zrot(-2.0 * phi)
    return out


def qsp_dual_momentum(k, prog: PhaseProgram) -> np.ndarray:
    """Propagator with the roles of signal and processing exchanged.

    ``exp(2i phi_0 n_k.sigma) prod_r exp(-2i theta sz) exp(2i phi_r n_k.sigma)``
    with ``n_k = (-sin k, 0, cos k)``.
    """
    k = np.asarray(k, dtype=float)
    proc = zrot(-2.0 * prog.theta)
    out = signal_bdg(k, prog.phis[0])
    for phi in prog.phis[1:]:
        out = out @ proc @ signal_bdg(k, phi)
    return out


def kw_dual_transform(u_minus_k: np.ndarray, k) -> np.ndarray:
    """Kramers-Wannier map in momentum space.

    Takes the primal propagator evaluated at ``-k`` and returns
    ``exp(i k/2 sy) conj(u) exp(-i k/2 sy)``, the dual propagator at ``k``.
    Complex conjugation happens here, so pass ``qsp_momentum(-k, prog)`` as is.
    """
    r = yrot(0.5 * np.asarray(k, dtype=float))
    return r @ np.conj(u_minus_k) @ dagger(r)


def phases_to_canonical(prog: PhaseProgram, *, tol: float = 1e-12) -> np.ndarray:
    """Translate Onsager-picture phases at ``theta = pi/4`` to canonical ``Phi``.

    ``Phi_0 = pi/4 - 2 phi_0``, ``Phi_d = pi/4 - 2 phi_d`` and
    ``Phi_r = pi/2 - 2 phi_r`` in between. The translation is exact: the two
    sequences agree with no leftover global phase.
    """
    if abs(prog.theta - QUARTER_PI) > tol:
        raise DomainError(f"canonical form needs theta = pi/4, got {prog.theta!r}")
    if prog.degree < 1:
        raise DomainError("canonical translation needs d >= 1; the endpoint rules collide at d = 0")
    phis = np.asarray(prog.phis)
    Phis = math.pi / 2 - 2.0 * phis
    Phis[0] = QUARTER_PI - 2.0 * phis[0]
    Phis[-1] = QUARTER_PI - 2.0 * phis[-1]
    return Phis


def canonical_to_phases(Phis: Sequence[float]) -> PhaseProgram:
    """Inverse of :func:`phases_to_canonical`; returns a ``theta = pi/4`` program."""
    Phis = _as_phases(Phis, "Phis", min_len=2)
    phis = (math.pi / 2 - Phis) / 2.0
    phis[0] = (QUARTER_PI - Phis[0]) / 2.0
    phis[-1] = (QUARTER_PI - Phis[-1]) / 2.0
    return PhaseProgram(QUARTER_PI, tuple(phis))


def qsp_canonical(k, Phis: Sequence[float]) -> np.ndarray:
    """``exp(i Phi_0 sz) prod_r exp(-i k sx) exp(i Phi_r sz)``; broadcasts over ``k``."""
    Phis = _as_phases(Phis, "Phis")
    k = np.asarray(k, dtype=float)
    sig = rot_components(1.0, 0.0, 0.0, -k)
    out = np.broadcast_to(zrot(Phis[0]), k.shape + (2, 2)).copy()
    for phi in Phis[1:]:
        out = out @ sig @ zrot(phi)
    return out


def plus_response(k, Phis: Sequence[float]) -> np.ndarray:
    """``<+|V|+>`` of the canonical sequence, ``|+> = (|0> + |1>)/sqrt(2)``."""
    u = qsp_canonical(k, Phis)
    return 0.5 * u.sum(axis=(-1, -2))


def _enforce_parity(coef: np.ndarray, parity: int, what: str, tol: float = 1e-8) -> np.ndarray:
    coef = coef.copy()
    wrong = coef[(1 - parity) % 2 :: 2]
    if wrong.size and np.max(np.abs(wrong)) > tol:
        raise QSPError(f"{what} lost its parity during extraction ({np.max(np.abs(wrong)):.3g})")
    coef[(1 - parity) % 2 :: 2] = 0.0
    return coef


def extract_poly(Phis: Sequence[float]) -> PolyPair:
    """Recover ``P`` and ``Q`` by sampling at Chebyshev nodes and interpolating.

    Degree bounds are known in advance (``deg P <= d``, ``deg Q <= d - 1``),
    so a least-squares Chebyshev fit on ``2d + 2`` nodes is exact up to
    rounding. Coefficients of the wrong parity are checked to be negligible
    and then zeroed.
    """
    Phis = _as_phases(Phis, "Phis")
    d = Phis.size - 1
    if d == 0:
        return PolyPair(np.array([np.exp(1j * Phis[0])]), np.array([0j]), 0)
    m = 2 * d + 2
    x = np.cos(np.pi * (np.arange(m) + 0.5) / m)
    k = np.arccos(x)
    u = qsp_canonical(k, Phis)
    p_vals = u[:, 0, 0]
    q_vals = u[:, 0, 1] / (1j * np.sin(k))
    try:
        p_cheb = C.chebfit(x, p_vals, d)
        q_cheb = C.chebfit(x, q_vals, d - 1)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise QSPError(f"polynomial interpolation failed: {exc}") from exc
    p = _enforce_parity(C.cheb2poly(p_cheb), d % 2, "P")
    q = _enforce_parity(C.cheb2poly(q_cheb), (d - 1) % 2, "Q")
    return PolyPair(p, q, d)


def _composite_signal(k, theta: float) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    s, c = np.sin(k), np.cos(k)
    first = rot_components(-s, 0.0, c, 2.0 * theta)
    second = rot_components(s, 0.0, c, -2.0 * theta)
    return first @ second


def modified_qsp_general_theta(k, prog: PhaseProgram) -> np.ndarray:
    """Sequence built from the two-factor signal used for general ``theta``.

    ``prod_{r=1..d} exp(2i theta (sz cos k - sx sin k)) exp(-2i theta (sz cos k + sx sin k))
    exp(-2i (phi_r + pi/4) sz)``. The product runs over ``r >= 1`` only, so
    ``phi_0`` does not enter; ``d = 0`` gives the identity.
    """
    sig = _composite_signal(k, prog.theta)
    out = np.broadcast_to(np.eye(2, dtype=complex), sig.shape).copy()
    for phi in prog.phis[1:]:
        out = out @ sig @ zrot(-2.0 * (phi + QUARTER_PI))
    return out


def effective_axis(k: float, theta: float, *, tol: float = 1e-12) -> tuple[float, float, float]:
    """Angle and in-plane axis of the composite signal.

    Returns ``(Omega, A, B)`` with the two-factor signal equal to
    ``exp(i Omega (A sx + B sy))`` and ``Omega`` in ``(0, pi)``.

    Raises
    ------
    DegenerateAxisError
        When ``sin Omega`` vanishes and the composite is +/- identity.
    """
    s2t = math.sin(2 * theta) ** 2
    cos_om = math.cos(2 * theta) ** 2 + math.cos(2 * k) * s2t
    a = -math.sin(k) * math.sin(4 * theta)
    b = math.sin(2 * k) * s2t
    sin_om = math.hypot(a, b)
    if sin_om < tol:
        raise DegenerateAxisError(
            f"composite signal is +/- identity at k={k!r}, theta={theta!r}; axis undefined"
        )
    return math.atan2(sin_om, cos_om), a / sin_om, b / sin_om
