"""Dense state-vector simulation of the Onsager-picture QSP circuits.

Basis ordering: site 1 is the least significant bit and spin up is bit 0, so
``Z_j`` has eigenvalue ``+1`` on a cleared bit. The all-up reference state is
basis index 0. Couplings are periodic, ``X_{N+1} = X_1``; for ``N = 2`` the
bond between the two sites therefore appears twice.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .momentum import PhaseProgram, qsp_momentum

__all__ = [
    "DenseState",
    "BdGParams",
    "MomentumGrid",
    "all_up",
    "apply_field",
    "apply_coupling",
    "qsp_spin",
    "qsp_spin_dual",
    "parity_expectation",
    "shift_sites",
    "bdg_matrix",
    "momentum_grid",
    "predict_vacuum_amplitude",
    "pair_amplitudes",
    "two_excitation_state",
]

MAX_SITES = 14


@dataclass(frozen=True)
class DenseState:
    """Normalised amplitudes over ``2**N`` basis states."""

    amplitudes: np.ndarray
    N: int

    def __post_init__(self):
        if not 2 <= self.N <= MAX_SITES:
            raise DomainError(f"N must lie in [2, {MAX_SITES}], got {self.N}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.N,):
            raise DomainError(f"expected {1 << self.N} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "DenseState") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_json(self) -> str:
        pairs = [[float(a.real), float(a.imag)] for a in self.amplitudes]
        return json.dumps({"N": self.N, "amplitudes": pairs})

    @classmethod
    def from_json(cls, text: str) -> "DenseState":
        data = json.loads(text)
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(amps, int(data["N"]))

    def to_bytes(self) -> bytes:
        """Little-endian ``uint32`` N followed by ``complex128`` amplitudes."""
        return struct.pack("<I", self.N) + self.amplitudes.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "DenseState":
        (n,) = struct.unpack_from("<I", blob)
        amps = np.frombuffer(blob, dtype="<c16", offset=4)
        return cls(amps.astype(complex), n)


def all_up(N: int) -> DenseState:
    amps = np.zeros(1 << N, dtype=complex)
    amps[0] = 1.0
    return DenseState(amps, N)


def _popcount(N: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << N, dtype=np.uint32)).astype(np.int64)


def _field(amps: np.ndarray, N: int, phi: float) -> np.ndarray:
    return amps * np.exp(1j * phi * (N - 2 * _popcount(N)))


def _coupling(amps: np.ndarray, N: int, theta: float) -> np.ndarray:
    idx = np.arange(1 << N)
    c, s = math.cos(theta), math.sin(theta)
    for j in range(N):
        mask = (1 << j) | (1 << ((j + 1) % N))
        amps = c * amps + 1j * s * amps[idx ^ mask]
    return amps


def apply_field(state: DenseState, phi: float) -> DenseState:
    """``exp(i phi sum_j Z_j)``."""
    return DenseState(_field(state.amplitudes, state.N, phi), state.N)


def apply_coupling(state: DenseState, theta: float) -> DenseState:
    """``prod_j (cos theta + i sin theta X_j X_{j+1})`` over periodic bonds."""
    return DenseState(_coupling(state.amplitudes, state.N, theta), state.N)


def qsp_spin(state: DenseState, prog: PhaseProgram) -> DenseState:
    """``exp(i phi_0 sum Z) prod_r exp(i theta sum XX) exp(i phi_r sum Z)`` applied to ``state``."""
    amps, N = state.amplitudes, state.N
    for phi in reversed(prog.phis[1:]):
        amps = _coupling(_field(amps, N, phi), N, prog.theta)
    return DenseState(_field(amps, N, prog.phis[0]), N)


def qsp_spin_dual(state: DenseState, prog: PhaseProgram) -> DenseState:
    """Signal and processing exchanged: ``exp(i phi_0 sum XX) prod_r exp(i theta sum Z) exp(i phi_r sum XX)``."""
    amps, N = state.amplitudes, state.N
    for phi in reversed(prog.phis[1:]):
        amps = _field(_coupling(amps, N, phi), N, prog.theta)
    return DenseState(_coupling(amps, N, prog.phis[0]), N)


def parity_expectation(state: DenseState) -> float:
    """``<prod_j Z_j>``."""
    sign = 1 - 2 * (_popcount(state.N) & 1)
    return float(np.sum(sign * np.abs(state.amplitudes) ** 2))


def shift_sites(state: DenseState, s: int = 1) -> DenseState:
    """Relabel site ``j`` as site ``j + s`` (cyclically)."""
    N = state.N
    s %= N
    idx = np.arange(1 << N)
    full = (1 << N) - 1
    rotated = ((idx << s) | (idx >> (N - s))) & full
    out = np.empty_like(state.amplitudes)
    out[rotated] = state.amplitudes
    return DenseState(out, N)


@dataclass(frozen=True)
class BdGParams:
    g: float
    J: float
    k: float


def bdg_matrix(p: BdGParams) -> np.ndarray:
    """``2 (g - J cos k) sz + 2 J sin k sx``."""
    hz = 2.0 * (p.g - p.J * math.cos(p.k))
    hx = 2.0 * p.J * math.sin(p.k)
    return np.array([[hz, hx], [hx, -hz]], dtype=complex)


@dataclass(frozen=True)
class MomentumGrid:
    """Positive momenta of the even-parity (antiperiodic) sector."""

    N: int
    sector: str
    ks: tuple[float, ...]


def momentum_grid(N: int) -> MomentumGrid:
    """``k_m = (2m - 1) pi / N`` for ``m = 1..N/2``."""
    if N % 2:
        raise DomainError(f"odd N = {N} is unsupported; only the even sector is modelled")
    if not 4 <= N <= MAX_SITES:
        raise DomainError(f"N must lie in [4, {MAX_SITES}], got {N}")
    ks = tuple((2 * m - 1) * math.pi / N for m in range(1, N // 2 + 1))
    return MomentumGrid(N, "even", ks)


def pair_amplitudes(prog: PhaseProgram, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evolve each pseudo-spin from ``(u, v) = (0, 1)``.

    Returns ``(ks, u, v)`` with the final pair and vacuum components per momentum.
    """
    ks = np.array(momentum_grid(N).ks)
    U = qsp_momentum(ks, prog)
    return ks, U[:, 0, 1], U[:, 1, 1]


def predict_vacuum_amplitude(prog: PhaseProgram, N: int) -> complex:
    """``prod_{k > 0} v_k``: the momentum-space prediction of ``<up...up|V|up...up>``.

    Magnitudes agree with the dense circuit; the phase differs by a convention
    dependent global factor.
    """
    _, _, v = pair_amplitudes(prog, N)
    return complex(np.prod(v))


def two_excitation_state(k0: float, N: int, *, tol: float = 1e-9) -> DenseState:
    """Dense form of a single Cooper pair with momenta ``(k0, -k0)`` on the vacuum.

    After the Jordan-Wigner strings cancel, the pair is
    ``sum_{a < b} sin(k0 (b - a)) |down at a, b>``, normalised.
    """
    ks = momentum_grid(N).ks
    if not any(abs(k0 - k) <= tol for k in ks):
        raise DomainError(f"k0 = {k0!r} is not a momentum of the N = {N} even sector")
    amps = np.zeros(1 << N, dtype=complex)
    for a in range(N):
        for b in range(a + 1, N):
            amps[(1 << a) | (1 << b)] = math.sin(k0 * (b - a))
    amps /= np.linalg.norm(amps)
    return DenseState(amps, N)
