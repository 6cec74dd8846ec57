"""Reverse engineering a spin Hamiltonian from a box-shaped momentum response.

The target response is ``2 box(cos k) - 1`` with ``box(x) = 1{|x| < w}``.
Through ``sinc(w omega)`` as the Fourier transform of the box and the
Jacobi-Anger expansion, the box has the harmonic expansion::

    box(cos k) = (w / pi) sum_n i^n exp(i n k) G_n,
    G_n = int_R sin(w omega) / (w omega) J_n(omega) d omega.

Only even ``n`` survive. The dispersion with ``cos(Omega_k T)`` equal to the
sign-flipped response is ``Omega_k T = pi (1 - box)``, a finite-range
fermionic pairing Hamiltonian.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from ..errors import ConvergenceError, DomainError

__all__ = [
    "QuadOptions",
    "BoxModel",
    "box_fourier_coeffs",
    "box_projection_oracle",
    "box_closed_form",
    "box_reconstruction",
    "re_dispersion",
    "re_hamiltonian_terms",
    "pauli_string",
]


@dataclass(frozen=True)
class QuadOptions:
    """Quadrature settings for the Bessel integrals.

    Attributes
    ----------
    epsabs : float
        Absolute tolerance per quadrature panel.
    panel : float
        Panel length on the finite part.
    omega_min : float
        Smallest split point between the panel sum and the asymptotic tail.
    max_error : float
        Total error estimate above which the integral is rejected.
    """

    epsabs: float = 1e-13
    panel: float = math.pi
    omega_min: float = 200.0
    max_error: float = 1e-9


@dataclass(frozen=True)
class BoxModel:
    w: float
    T: float
    G: np.ndarray = field(repr=False)

    @property
    def n_max(self) -> int:
        return self.G.size - 1

    def to_json(self) -> str:
        return json.dumps({"w": self.w, "T": self.T, "n_max": self.n_max, "G": self.G.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "BoxModel":
        data = json.loads(text)
        return cls(float(data["w"]), float(data["T"]), np.asarray(data["G"], dtype=float))


def _hankel_pq(n: int, omega: float, terms: int = 30) -> tuple[float, float]:
    """Hankel asymptotic series ``P_n(omega), Q_n(omega)``, truncated at the smallest term."""
    mu = 4.0 * n * n
    p, q = 0.0, 0.0
    a = 1.0  # a_k(n) / omega^k
    prev = math.inf
    for k in range(2 * terms):
        if k:
            a *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * omega)
        if abs(a) > prev and k > 2:
            break
        prev = abs(a)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * a
        else:
            q += sign * a
        if abs(a) < 1e-17:
            break
    return p, q


def _tail(n: int, w: float, omega_c: float, opts: QuadOptions) -> tuple[float, float]:
    """``int_{omega_c}^inf sinc(w omega) J_n(omega)`` via the Hankel expansion and QAWF."""
    phase = n * math.pi / 2 + math.pi / 4
    cphi, sphi = math.cos(phase), math.sin(phase)
    pref = math.sqrt(2.0 / math.pi) / (2.0 * w)

    def gp(om):
        return om**-1.5 * _hankel_pq(n, om)[0]

    def gq(om):
        return om**-1.5 * _hankel_pq(n, om)[1]

    total, err = 0.0, 0.0
    parts = {}
    for beta in (1.0 + w, 1.0 - w):
        for name, g in (("p", gp), ("q", gq)):
            for kind in ("sin", "cos"):
                val, e = integrate.quad(
                    g, omega_c, np.inf, weight=kind, wvar=beta, epsabs=opts.epsabs, limlst=200
                )
                parts[(beta, name, kind)] = val
                err += abs(e)
    bp, bm = 1.0 + w, 1.0 - w

    def s(beta, name):  # int g sin(beta om - phase)
        return parts[(beta, name, "sin")] * cphi - parts[(beta, name, "cos")] * sphi

    def c(beta, name):  # int g cos(beta om - phase)
        return parts[(beta, name, "cos")] * cphi + parts[(beta, name, "sin")] * sphi

    total = (s(bp, "p") - s(bm, "p")) - (c(bm, "q") - c(bp, "q"))
    return pref * total, pref * err


def _half_line(n: int, w: float, sign: int, opts: QuadOptions) -> tuple[float, float]:
    """``int_0^inf sinc(w omega) J_n(sign * omega) d omega``."""
    omega_c = max(opts.omega_min, 2.0 * n * n + 50.0)
    panels = int(math.ceil(omega_c / opts.panel))
    omega_c = panels * opts.panel

    def f(om):
        return np.sinc(w * om / math.pi) * special.jv(n, sign * om)

    total, err = 0.0, 0.0
    for j in range(panels):
        val, e = integrate.quad(f, j * opts.panel, (j + 1) * opts.panel, epsabs=opts.epsabs, limit=100)
        total += val
        err += e
    tail, terr = _tail(n, w, omega_c, opts)
    # J_n(-omega) = (-1)^n J_n(omega) on the asymptotic tail
    tail *= 1.0 if sign > 0 or n % 2 == 0 else -1.0
    return total + tail, err + terr


def box_fourier_coeffs(w: float = 0.75, n_max: int = 40, quad: QuadOptions | None = None, T: float = 1.0) -> BoxModel:
    """Compute ``G_0..G_n_max`` by Bessel quadrature over the whole real line.

    Each integral is the sum of the two half-line pieces. For odd ``n`` the
    pieces cancel, which the returned values show to quadrature accuracy.

    Raises
    ------
    ConvergenceError
        If the accumulated error estimate exceeds ``quad.max_error``.
    """
    if not 0.0 < w < 1.0:
        raise DomainError(f"box half-width must lie in (0, 1), got {w!r}")
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    opts = quad or QuadOptions()
    G = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        plus, e1 = _half_line(n, w, +1, opts)
        minus, e2 = _half_line(n, w, -1, opts)
        if e1 + e2 > opts.max_error:
            raise ConvergenceError(
                f"Bessel quadrature for G_{n} reached error estimate {e1 + e2:.3g}", residual=e1 + e2
            )
        G[n] = plus + minus
    return BoxModel(float(w), float(T), G)


def box_projection_oracle(w: float, n: int, points: int = 20001) -> float:
    """``G_n`` from a direct k-space projection of the box (trapezoid rule).

    ``c_n = (1/2pi) int 1{|cos k| < w} exp(-i n k) dk`` is integrated piecewise
    between the box edges, and ``G_n = (pi / w) i^-n c_n``.
    """
    a = math.acos(w)
    c = 0.0j
    for lo, hi in ((a, math.pi - a), (math.pi + a, 2 * math.pi - a)):
        k = np.linspace(lo, hi, points)
        c += integrate.trapezoid(np.exp(-1j * n * k), k)
    c /= 2 * math.pi
    return float(((math.pi / w) * (1j) ** (-n) * c).real)


def box_closed_form(w: float, n: int) -> float:
    """``G_n`` in closed form: ``(2/w) sin(n asin w) / n`` for even ``n > 0``."""
    if n % 2:
        return 0.0
    s = math.asin(w)
    return 2.0 * s / w if n == 0 else 2.0 * math.sin(n * s) / (w * n)


def box_reconstruction(k, model: BoxModel):
    """Truncated harmonic sum ``(w/pi) sum_{|n| <= n_max} i^n exp(ink) G_|n|`` (real)."""
    k = np.asarray(k, dtype=float)
    out = model.G[0] * np.ones_like(k)
    for n in range(1, model.n_max + 1):
        out = out + 2.0 * model.G[n] * np.real((1j) ** n * np.exp(1j * n * k))
    return model.w / math.pi * out


def re_dispersion(k, model: BoxModel):
    """``Omega_k = (1/T) [pi - w G_0 - 2 w sum_{n>=1} (-1)^n cos(2nk) G_2n]``, truncated at ``2n <= n_max``."""
    k = np.asarray(k, dtype=float)
    acc = model.G[0] * np.ones_like(k)
    for n in range(1, model.n_max // 2 + 1):
        acc = acc + 2.0 * (-1) ** n * np.cos(2 * n * k) * model.G[2 * n]
    return (math.pi - model.w * acc) / model.T


def pauli_string(r: int) -> str:
    """Spin form of a range-``r`` pairing term between sites ``j - r`` and ``j``."""
    if r == 0:
        return "1"
    mid = " ".join(f"Z_{{j-{m}}}" for m in range(r - 1, 0, -1))
    left = f"_{{j-{r}}}"
    mid = f" {mid} " if mid else " "
    return f"X{left}{mid}X_{{j}} - Y{left}{mid}Y_{{j}}"


def re_hamiltonian_terms(model: BoxModel) -> list[tuple[int, float, str]]:
    """Pairing couplings ``-(w/T)(-1)^n G_2n`` of range ``2n <= n_max``.

    Range 0 is the constant offset. Re-summing
    ``pi/T + c_0 + 2 sum_n c_n cos(2nk)`` reproduces :func:`re_dispersion`.
    """
    terms = []
    for n in range(model.n_max // 2 + 1):
        coef = -(model.w / model.T) * (-1) ** n * model.G[2 * n]
        terms.append((2 * n, float(coef), pauli_string(2 * n)))
    return terms
