"""BB1 composite-pulse sequence as a momentum-space QSP sequence."""

from __future__ import annotations

import math

import numpy as np

from ..momentum import PhaseProgram, canonical_to_phases, qsp_canonical

__all__ = ["BB1_CHI", "bb1_phases", "bb1_response", "bb1_response_closed_form"]

BB1_CHI = 0.5 * math.acos(-0.25)


def bb1_phases() -> tuple[np.ndarray, PhaseProgram]:
    """Canonical BB1 phases ``(pi/2, -chi, 2chi, 0, -2chi, chi)`` and their Onsager-picture preimage."""
    chi = BB1_CHI
    Phis = np.array([math.pi / 2, -chi, 2 * chi, 0.0, -2 * chi, chi])
    return Phis, canonical_to_phases(Phis)


def bb1_response_closed_form(k):
    """``(1/8) x^2 (3x^8 - 15x^6 + 35x^4 - 45x^2 + 30)`` with ``x = cos k``."""
    x = np.cos(np.asarray(k, dtype=float))
    x2 = x * x
    return x2 * ((((3 * x2 - 15) * x2 + 35) * x2 - 45) * x2 + 30) / 8


def bb1_response(k):
    """Survival probabilities ``|<0|V|0>|^2`` without processing and with BB1.

    Both are computed from the matrix products. :func:`bb1_response_closed_form`
    gives the same BB1 curve as a polynomial.
    """
    k = np.asarray(k, dtype=float)
    plain = np.abs(qsp_canonical(k, [0.0, 0.0])[..., 0, 0]) ** 2
    Phis, _ = bb1_phases()
    bb1 = np.abs(qsp_canonical(k, Phis)[..., 0, 0]) ** 2
    if k.ndim == 0:
        return float(plain), float(bb1)
    return plain, bb1
