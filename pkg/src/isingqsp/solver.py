"""Phase-factor solver for canonical QSP sequences.

Two responses can be targeted for a real polynomial ``f`` of definite parity:

``"P"``
    the full corner element, ``<0|V|0> = f(x)``. This needs a real ``Q`` with
    ``f^2 + (1 - x^2) Q^2 = 1``, which exists only for special ``f`` (for
    example Chebyshev polynomials).
``"plus"``
    the ``|+>`` matrix element, ``<+|V|+> = Re P + i sin(k) Re Q = f``. Any
    ``f`` with ``|f| <= 1`` on ``[-1, 1]`` is reachable.

The complementary polynomials come from a Fejer-Riesz factorisation. Phases
are then peeled off one layer at a time from the high-degree end. If the
stripped phases miss the tolerance, they seed a least-squares refinement,
followed by seeded random restarts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P
from scipy.optimize import least_squares

from .errors import ConvergenceError, DomainError, InfeasibleTargetError
from .momentum import qsp_canonical
from .su2 import rot_components, zrot

__all__ = ["SolverOptions", "PhaseSolver", "solve_phases"]

_X = Chebyshev([0.0, 1.0])
_ONE_MINUS_X2 = Chebyshev([0.5, 0.0, -0.5])


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for :class:`PhaseSolver`.

    Attributes
    ----------
    tol : float
        Allowed max error of the realised Chebyshev coefficients.
    response : {"P", "plus"}
        Which matrix element must equal the target.
    basis : {"power", "chebyshev"}
        Basis of the incoming coefficient vector (low degree first).
    degree : int or None
        Pad the sequence to this degree with identity pairs.
    seed : int
        Seed for the restart generator.
    restarts : int
        Random restarts after a failed refinement.
    samples : int
        Dense grid size for the ``|f| <= 1`` check.
    """

    tol: float = 1e-8
    response: str = "P"
    basis: str = "power"
    degree: int | None = None
    seed: int = 0
    restarts: int = 4
    samples: int = 4001


def _cheb_from_target(coeffs, basis: str) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise DomainError("target coefficients must be a non-empty finite vector")
    if basis == "power":
        c = C.poly2cheb(c)
    elif basis != "chebyshev":
        raise DomainError(f"unknown basis {basis!r}")
    scale = max(1.0, float(np.max(np.abs(c))))
    nz = np.nonzero(np.abs(c) > 1e-14 * scale)[0]
    return c[: nz[-1] + 1] if nz.size else np.zeros(1)


def _pair_near_real(roots: np.ndarray) -> np.ndarray:
    """Halve a multiset of real double roots by pairing neighbours."""
    r = np.sort(roots.real)
    if r.size % 2:
        raise InfeasibleTargetError(
            "complement polynomial has a real root of odd multiplicity",
            x=float(r[0]) if r.size else None,
        )
    return 0.5 * (r[0::2] + r[1::2])


def _complete_P(f: np.ndarray) -> np.ndarray:
    """Real ``Q`` with ``f^2 + (1 - x^2) Q^2 = 1``, in the Chebyshev basis."""
    d = f.size - 1
    fp = Chebyshev(f).convert(kind=Polynomial)
    one = Polynomial([1.0])
    num = one - fp * fp
    quo, rem = divmod(num, Polynomial([1.0, 0.0, -1.0]))
    if np.max(np.abs(rem.coef)) > 1e-9:
        x = 1.0 if abs(fp(1.0)) < abs(fp(-1.0)) else -1.0
        raise InfeasibleTargetError(
            "full-element target needs |f(+/-1)| = 1; try response='plus'",
            x=x, value=abs(abs(fp(x)) - 1.0),
        )
    if d == 0:
        return np.zeros(1)
    p = (d - 1) % 2
    qc = np.zeros(2 * (d - 1) + 1)
    qc[: quo.coef.size] = quo.coef[: qc.size]
    if p:
        if abs(qc[0]) > 1e-9:
            raise InfeasibleTargetError(
                "full-element target of even degree needs |f(0)| = 1; try response='plus'",
                x=0.0, value=abs(qc[0]),
            )
        qc = qc[2:]
    r_tilde = qc[0::2]  # coefficients in y = x^2
    lead = r_tilde[-1]
    if lead <= 0:
        raise InfeasibleTargetError("complement polynomial is not positive", x=None, value=lead)
    roots = np.roots(r_tilde[::-1]) if r_tilde.size > 1 else np.array([])
    near_real = np.abs(roots.imag) < 1e-6 * np.maximum(1.0, np.abs(roots))
    upper = roots[(~near_real) & (roots.imag > 0)]
    chosen = np.concatenate([upper, _pair_near_real(roots[near_real])])
    q_tilde = math.sqrt(lead) * np.poly(chosen)[::-1] if chosen.size else np.array([math.sqrt(lead)])
    qpow = np.zeros(2 * q_tilde.size - 1 + p, dtype=complex)
    qpow[p::2] = q_tilde
    q = -qpow  # negative leading coefficient: Chebyshev targets give zero phases
    if np.max(np.abs(q.imag)) > 1e-7:
        raise InfeasibleTargetError(
            "no real completion exists (complement is negative for some x^2 < 0); "
            "try response='plus'",
            x=complex(0.0, math.sqrt(abs(upper[0].real))) if upper.size else None,
        )
    return C.poly2cheb(q.real)


def _split_circle_roots(roots: np.ndarray) -> np.ndarray:
    """Select one root from each double root on the unit circle."""
    if roots.size == 0:
        return roots
    ang = np.sort(np.angle(roots))
    gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * np.pi]))
    start = (int(np.argmax(gaps)) + 1) % ang.size
    ang = np.roll(ang, -start)
    ang = np.unwrap(ang)
    if ang.size % 2:
        raise InfeasibleTargetError(
            "target touches |f| = 1 with odd multiplicity", x=float(np.cos(ang[0]))
        )
    mid = 0.5 * (ang[0::2] + ang[1::2])
    return np.exp(1j * mid)


def _complete_plus(f: np.ndarray):
    """Chebyshev coefficients of real ``A, B`` with ``f^2 + A^2 + (1-x^2) B^2 = 1``.

    ``1 - f(cos k)^2`` is a non-negative Laurent polynomial ``W`` in
    ``z = exp(ik)``. Its Fejer-Riesz factor ``c(z)`` keeps the roots inside the
    unit disk (one of each double root on the circle), and
    ``z^-d c(z) = A(x) + i sin(k) B(x)``.
    """
    d = f.size - 1
    lau = np.zeros(2 * d + 1)
    lau[d] = f[0]
    lau[d + 1 :] = 0.5 * f[1:]
    lau[:d] = 0.5 * f[1:][::-1]
    w = -np.convolve(lau, lau)  # index i <-> z^(i - 2d)
    w[2 * d] += 1.0
    if np.max(np.abs(w)) < 1e-14:
        return np.zeros(1), np.zeros(1)
    nz = np.nonzero(np.abs(w) > 1e-15 * np.max(np.abs(w)))[0]
    lo, hi = nz[0], nz[-1]
    roots = np.roots(w[lo : hi + 1][::-1]) if hi > lo else np.array([])
    mod = np.abs(roots)
    inside = roots[mod < 1 - 1e-6]
    circle = _split_circle_roots(roots[np.abs(mod - 1) <= 1e-6])
    chosen = np.concatenate([inside, circle])
    cz = np.poly(chosen)[::-1] if chosen.size else np.ones(1)
    # Fix the scale where W is largest on the circle.
    zs = np.exp(1j * np.linspace(0, np.pi, 257))
    wv = np.real(P.polyval(zs, w) * zs ** (-2 * d))
    j = int(np.argmax(wv))
    cz = cz * (math.sqrt(max(wv[j], 0.0)) / abs(P.polyval(zs[j], cz)))
    if np.max(np.abs(cz.imag)) > 1e-6 * max(1.0, np.max(np.abs(cz))):
        raise InfeasibleTargetError(
            "complementary factor is not real", value=float(np.max(np.abs(cz.imag)))
        )
    if cz.size > 2 * d + 1:
        raise InfeasibleTargetError("complementary factor exceeds the target degree")
    full = np.zeros(2 * d + 1)  # index i <-> z^(i - d)
    full[: cz.size] = cz.real
    full[1::2] = 0.0  # powers of the wrong parity cancel in exact arithmetic
    a = np.zeros(d + 1)
    b = np.zeros(max(d, 1))
    a[0] = full[d]
    for m in range(1, d + 1):
        a[m] = full[d + m] + full[d - m]
        coef = full[d + m] - full[d - m]
        if coef:
            u = np.zeros(m)  # U_{m-1} in the Chebyshev basis
            u[m - 1 :: -2] = 2.0
            if (m - 1) % 2 == 0:
                u[0] = 1.0
            b[:m] += coef * u
    return a, b


def _strip_layers(p: Chebyshev, q: Chebyshev, d: int, scale: float = 1.0) -> np.ndarray:
    """Peel canonical phases off ``(P, Q)``, highest layer first."""
    phis = np.zeros(d + 1)
    level = d
    while level > 0:
        xp = (_X * p).coef
        yq = (_ONE_MINUS_X2 * q).coef
        a = xp[level + 1] if xp.size > level + 1 else 0.0
        b = yq[level + 1] if yq.size > level + 1 else 0.0
        if max(abs(a), abs(b)) < 1e-9 * scale:
            if level < 2:
                raise InfeasibleTargetError("degenerate pair at the lowest layer")
            phis[level] = -math.pi / 2
            phis[level - 1] = math.pi / 2
            p = Chebyshev(p.coef[: level - 1]) if p.coef.size > level - 1 else p
            q = Chebyshev(q.coef[: max(level - 2, 1)]) if q.coef.size > level - 2 else q
            level -= 2
            continue
        phi = 0.5 * np.angle(a / b)
        e = np.exp(-1j * phi)
        p_new = e * _X * p - np.conj(e) * _ONE_MINUS_X2 * q
        q_new = e * p + np.conj(e) * _X * q
        phis[level] = phi
        p = Chebyshev(p_new.coef[:level])
        q = Chebyshev(q_new.coef[: max(level - 1, 1)])
        if level == 1:
            q = Chebyshev([0.0])
        level -= 1
    phis[0] = float(np.angle(p.coef[0]))
    return phis


class PhaseSolver:
    """Stateful solver; one instance per thread.

    Parameters
    ----------
    options : SolverOptions, optional
    """

    def __init__(self, options: SolverOptions | None = None):
        self.options = options or SolverOptions()
        if self.options.response not in ("P", "plus"):
            raise DomainError(f"unknown response {self.options.response!r}")
        self._rng = np.random.default_rng(self.options.seed)
        self.best_residual = math.inf
        self.nfev = 0

    def response_cheb(self, Phis: Sequence[float], d: int) -> np.ndarray:
        """Chebyshev coefficients of the targeted response realised by ``Phis``."""
        m = 2 * d + 2
        x = np.cos(np.pi * (np.arange(m) + 0.5) / m)
        vals = self._response(np.arccos(x), Phis)
        if self.options.response == "P":
            return C.chebfit(x, vals, d)
        return C.chebfit(x, vals.real, d)

    def _response(self, k, Phis):
        return self._project(qsp_canonical(k, Phis))

    def residual(self, Phis, target: np.ndarray) -> float:
        """Max error of the realised Chebyshev coefficients, including parasitic parts."""
        d = len(Phis) - 1
        m = 2 * max(d, target.size - 1) + 2
        x = np.cos(np.pi * (np.arange(m) + 0.5) / m)
        vals = self._response(np.arccos(x), Phis)
        deg = max(d, target.size - 1)
        t = np.zeros(deg + 1)
        t[: target.size] = target
        err = np.abs(C.chebfit(x, vals.real, deg) - t)
        if self.options.response == "P":
            err = np.maximum(err, np.abs(C.chebfit(x, vals.imag, deg)))
        else:
            # the imaginary part is sin(k) Re Q; it must vanish
            err = np.maximum(err, np.abs(C.chebfit(x, vals.imag / np.sin(np.arccos(x)), deg)))
        return float(np.max(err))

    def _check_norm(self, f: np.ndarray) -> None:
        x = np.cos(np.linspace(0.0, np.pi, self.options.samples))
        v = C.chebval(x, f)
        j = int(np.argmax(np.abs(v)))
        if abs(v[j]) > 1.0 + 1e-12:
            raise InfeasibleTargetError(
                f"target exceeds 1 in magnitude at x = {x[j]:.17g} (|f| = {abs(v[j]):.17g})",
                x=float(x[j]), value=float(abs(v[j]) - 1.0),
            )

    def _project(self, u):
        if self.options.response == "P":
            return u[..., 0, 0]
        return 0.5 * u.sum(axis=(-1, -2))

    def _expand(self, h: np.ndarray, d: int) -> np.ndarray:
        """Full phase vector from reduced parameters (identity in ``"P"`` mode).

        In ``"plus"`` mode the phases are ``psi + (-pi/4, 0, ..., 0, pi/4)``
        with ``psi`` palindromic. Then ``Q_psi`` is real and
        ``<+|V|+> = Re P_psi``, which leaves a square, well-conditioned system.
        """
        if self.options.response == "P":
            return h
        psi = np.concatenate([h, h[: (d + 1) // 2][::-1]])
        psi[0] -= math.pi / 4
        psi[-1] += math.pi / 4
        return psi

    def _reduce(self, Phis: np.ndarray) -> np.ndarray:
        if self.options.response == "P":
            return Phis.copy()
        d = Phis.size - 1
        psi = Phis.copy()
        psi[0] += math.pi / 4
        psi[-1] -= math.pi / 4
        psi = 0.5 * (psi + psi[::-1])
        return psi[: d // 2 + 1]

    def _jacobian(self, k: np.ndarray, Phis: np.ndarray) -> np.ndarray:
        """Derivatives of the projected response w.r.t. each phase, shape (len(k), d+1)."""
        d = Phis.size - 1
        sig = rot_components(1.0, 0.0, 0.0, -k)
        z = zrot(Phis)
        isz = np.diag([1j, -1j])
        # dV/dPhi_j = L_j (i sz) R_j, where L_j ends with exp(i Phi_j sz)
        left = [np.broadcast_to(z[0], k.shape + (2, 2))]
        for j in range(1, d + 1):
            left.append(left[-1] @ sig @ z[j])
        right = [np.broadcast_to(np.eye(2, dtype=complex), k.shape + (2, 2))]
        for j in range(d, 0, -1):
            right.append(sig @ z[j] @ right[-1])
        right.reverse()
        return np.stack([self._project(left[j] @ isz @ right[j]) for j in range(d + 1)], axis=1)

    def _refine(self, start: np.ndarray, target: np.ndarray, d: int) -> np.ndarray:
        """Least-squares polish of the phases (Levenberg-Marquardt, exact Jacobian)."""
        plus = self.options.response == "plus"
        m = d + 1 if plus else 2 * d + 2
        k = np.pi * (np.arange(m) + 0.5) / (2 * m if plus else m)  # x > 0 suffices by parity
        fx = C.chebval(np.cos(k), target)
        n = start.size
        fold = np.zeros((d + 1, n))
        if plus:
            idx = np.concatenate([np.arange(n), np.arange((d + 1) // 2)[::-1]])
            fold[np.arange(d + 1), idx] = 1.0
        else:
            fold[np.arange(n), np.arange(n)] = 1.0

        def fun(h):
            r = self._response(k, self._expand(h, d)) - fx
            return r.real if plus else np.concatenate([r.real, r.imag])

        def jac(h):
            g = self._jacobian(k, self._expand(h, d)) @ fold
            return g.real if plus else np.concatenate([g.real, g.imag])

        sol = least_squares(
            fun, start, jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
            max_nfev=100 * (n + 1),
        )
        self.nfev += sol.nfev
        return self._expand(sol.x, d)

    def solve(self, target_coeffs) -> np.ndarray:
        """Return canonical phases realising ``target_coeffs``.

        Raises
        ------
        DomainError
            Target of indefinite parity, or a requested degree of the wrong parity.
        InfeasibleTargetError
            ``|f| > 1`` somewhere in ``[-1, 1]``, or no completion exists.
        ConvergenceError
            Tolerance not reached; ``residual`` carries the best value found.
        """
        opts = self.options
        f = _cheb_from_target(target_coeffs, opts.basis)
        d = f.size - 1
        parity = d % 2
        wrong = f[(1 - parity) :: 2]
        if wrong.size and np.max(np.abs(wrong)) > 1e-10:
            raise DomainError("target must have definite parity")
        f = f.copy()
        f[(1 - parity) :: 2] = 0.0
        if opts.degree is not None and (opts.degree < d or (opts.degree - d) % 2):
            raise DomainError(
                f"requested degree {opts.degree} is incompatible with a target of degree {d}"
            )
        self._check_norm(f)

        if opts.response == "P":
            q = _complete_P(f)
            p_ch, q_ch = Chebyshev(f.astype(complex)), Chebyshev(q.astype(complex))
        else:
            a, b = _complete_plus(f)
            pc = f.astype(complex)
            pc[: a.size] += 1j * a[: pc.size]
            p_ch, q_ch = Chebyshev(pc), Chebyshev(1j * b)

        Phis = _strip_layers(p_ch, q_ch, d)
        res = self.residual(Phis, f)
        self.best_residual = min(self.best_residual, res)
        best = Phis
        if res > opts.tol:
            starts = [self._reduce(Phis)]
            if opts.response == "plus":
                # psi = (pi/4, 0, ..., 0, pi/4): a start from which the
                # symmetric system is known to converge for |f| < 1
                h0 = np.zeros(d // 2 + 1)
                h0[0] = math.pi / 4
                starts.insert(0, h0)
            starts += [self._rng.uniform(-np.pi, np.pi, starts[0].size) for _ in range(opts.restarts)]
            for s in starts:
                cand = self._refine(s, f, d)
                r = self.residual(cand, f)
                if r < self.best_residual:
                    self.best_residual, best = r, cand
                if r <= opts.tol:
                    break
            if self.best_residual > opts.tol:
                raise ConvergenceError(
                    f"phase solver stopped at residual {self.best_residual:.3g} > tol {opts.tol:.3g}",
                    residual=self.best_residual,
                )
        best = np.asarray(best, dtype=float)
        if opts.degree is not None and opts.degree > d:
            pad = np.tile([math.pi / 2, -math.pi / 2], (opts.degree - d) // 2)
            best = np.concatenate([best, pad])
        return best


def solve_phases(target_P, opts: SolverOptions | None = None, **kwargs) -> np.ndarray:
    """Solve for canonical phases; keyword arguments override ``opts`` fields."""
    base = opts or SolverOptions()
    if kwargs:
        base = SolverOptions(**{**base.__dict__, **kwargs})
    return PhaseSolver(base).solve(target_P)
