"""Exact 2x2 complex linear algebra for SU(2) propagators.

Matrices are numpy arrays of shape ``(2, 2)`` and dtype ``complex128``.
Rotation helpers broadcast over leading axes, so a propagator can be built on
a whole momentum grid at once; the result then has shape ``(..., 2, 2)``.

Conventions: ``rot(n, a) = exp(i a n.sigma) = cos(a) I + i sin(a) n.sigma``.
"""

from __future__ import annotations

import cmath
import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

DEFAULT_TOL = 1e-10


class AxisAngle(NamedTuple):
    """Unit rotation axis and angle (radians) for :func:`rot`."""

    axis: tuple[float, float, float]
    angle: float


def rot_components(nx, ny, nz, angle) -> np.ndarray:
    """Broadcasting form of ``exp(i angle (nx sx + ny sy + nz sz))``.

    The axis is assumed normalised; no check is made.
    """
    nx, ny, nz, angle = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (nx, ny, nz, angle))
    )
    c = np.cos(angle)
    s = np.sin(angle)
    out = np.empty(angle.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c + 1j * s * nz
    out[..., 0, 1] = 1j * s * (nx - 1j * ny)
    out[..., 1, 0] = 1j * s * (nx + 1j * ny)
    out[..., 1, 1] = c - 1j * s * nz
    return out


def rot(spec: AxisAngle | Sequence[float], angle: float | None = None, *, tol: float = 1e-12) -> np.ndarray:
    """Rotation ``cos(a) I + i sin(a) (n . sigma)``.

    Accepts either an :class:`AxisAngle` or ``rot(axis, angle)``.

    Raises
    ------
    DomainError
        If the axis norm differs from one by more than ``tol``.
    """
    if angle is None:
        axis, angle = spec
    else:
        axis = spec
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise DomainError(f"rotation axis must be a 3-vector, got shape {n.shape}")
    norm = float(np.linalg.norm(n))
    if not math.isfinite(norm) or abs(norm - 1.0) > tol:
        raise DomainError(f"rotation axis must have unit norm, got |n| = {norm!r}")
    return rot_components(n[0], n[1], n[2], angle)


def zrot(angle) -> np.ndarray:
    """``exp(i angle sz)``; broadcasts over ``angle``."""
    return rot_components(0.0, 0.0, 1.0, angle)


def xrot(angle) -> np.ndarray:
    """``exp(i angle sx)``; broadcasts over ``angle``."""
    return rot_components(1.0, 0.0, 0.0, angle)


def yrot(angle) -> np.ndarray:
    """``exp(i angle sy)``; broadcasts over ``angle``."""
    return rot_components(0.0, 1.0, 0.0, angle)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a, b)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def conjugate(a: np.ndarray) -> np.ndarray:
    """Entrywise complex conjugate (no transpose)."""
    return np.conj(a)


def det(a: np.ndarray):
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def trace(a: np.ndarray):
    return a[..., 0, 0] + a[..., 1, 1]


def _order_key(z: complex) -> tuple[float, float]:
    return (cmath.phase(z), abs(z))


def eigenvalues(a: np.ndarray) -> tuple[complex, complex]:
    """Both roots of the characteristic polynomial of a 2x2 matrix.

    The quadratic is solved in the cancellation-free form: the root of larger
    modulus comes from ``(t +/- sqrt(t^2 - 4 det)) / 2`` with the sign matching
    ``t``, and its partner is ``det / root``. Roots are returned ascending in
    principal argument, ties broken by modulus.
    """
    a = np.asarray(a, dtype=complex)
    t = complex(a[0, 0] + a[1, 1])
    d = complex(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    disc = cmath.sqrt(t * t - 4.0 * d)
    if (t.conjugate() * disc).real < 0:
        disc = -disc
    q = 0.5 * (t + disc)
    if q == 0:
        # t == 0 and t^2 == 4 det, hence det == 0 too.
        lam = (0j, 0j)
    else:
        lam = (q, d / q)
    return tuple(sorted(lam, key=_order_key))


def is_unitary(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``max |a^dagger a - I| <= tol``."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    a = np.asarray(a, dtype=complex)
    return bool(np.max(np.abs(dagger(a) @ a - I2)) <= tol)


def wrap_phase(mu: float) -> float:
    """Map an angle into ``(-pi, pi]``."""
    mu = math.remainder(mu, 2.0 * math.pi)
    if mu <= -math.pi:
        mu += 2.0 * math.pi
    return mu


def floquet_exponents(u: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Quasienergies ``mu`` defined by ``lambda = exp(-i mu)``, ascending in ``(-pi, pi]``.

    Raises
    ------
    DomainError
        If ``u`` is not unitary to ``tol``; use :func:`eigenvalues` instead.
    """
    if not is_unitary(u, tol):
        raise DomainError(
            "floquet_exponents needs a unitary matrix; use eigenvalues() for non-unitary input"
        )
    mus = sorted(wrap_phase(-cmath.phase(lam)) for lam in eigenvalues(u))
    return mus[0], mus[1]


def strip_scalar(a: np.ndarray, b: np.ndarray) -> tuple[complex, float]:
    """Best scalar ``c`` with ``a ~ c b`` and the residual ``max |a - c b|``.

    Useful for comparisons that hold only up to a unit-modulus global phase.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = complex(np.vdot(b, a) / np.vdot(b, b))
    return c, float(np.max(np.abs(a - c * b)))
