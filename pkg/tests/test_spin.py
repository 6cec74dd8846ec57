import math
from functools import reduce

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from isingqsp.applications import bb1_phases
from isingqsp.errors import DomainError
from isingqsp.momentum import PhaseProgram
from isingqsp.spin import (
    BdGParams,
    DenseState,
    all_up,
    apply_coupling,
    apply_field,
    bdg_matrix,
    momentum_grid,
    pair_amplitudes,
    parity_expectation,
    predict_vacuum_amplitude,
    qsp_spin,
    qsp_spin_dual,
    shift_sites,
    two_excitation_state,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def site_op(op, j, N):
    # site 1 (j = 0) is the least significant bit, i.e. the rightmost kron factor
    factors = [np.eye(2)] * N
    factors[N - 1 - j] = op
    return reduce(np.kron, factors)


def dense_sums(N):
    zsum = sum(site_op(Z, j, N) for j in range(N))
    xx = sum(site_op(X, j, N) @ site_op(X, (j + 1) % N, N) for j in range(N))
    return zsum, xx


def random_state(rng, N):
    v = rng.normal(size=1 << N) + 1j * rng.normal(size=1 << N)
    return DenseState(v / np.linalg.norm(v), N)


def random_program(rng, max_d=6):
    d = int(rng.integers(0, max_d + 1))
    return PhaseProgram(rng.uniform(-math.pi, math.pi), tuple(rng.uniform(-math.pi, math.pi, d + 1)))


class TestGates:
    def test_field_examples(self, rng):
        s = random_state(rng, 5)
        assert np.array_equal(apply_field(s, 0.0).amplitudes, s.amplitudes)
        up = apply_field(all_up(5), 0.3)
        assert abs(up.amplitudes[0] - np.exp(5 * 0.3j)) < 1e-15
        flipped = apply_field(s, math.pi)
        downs = np.array([bin(i).count("1") for i in range(32)])
        assert np.allclose(flipped.amplitudes, s.amplitudes * (-1.0) ** (5 - 2 * downs))

    def test_field_matches_dense_exponential(self, rng):
        N = 4
        zsum, _ = dense_sums(N)
        s = random_state(rng, N)
        want = scipy.linalg.expm(0.7j * zsum) @ s.amplitudes
        assert np.max(np.abs(apply_field(s, 0.7).amplitudes - want)) < 1e-12

    def test_coupling_identity(self, rng):
        s = random_state(rng, 4)
        assert np.allclose(apply_coupling(s, 0.0).amplitudes, s.amplitudes)

    def test_two_site_chain_counts_the_bond_twice(self):
        theta = 0.3
        out = apply_coupling(all_up(2), theta).amplitudes
        assert abs(out[0] - math.cos(2 * theta)) < 1e-15
        assert abs(out[3] - 1j * math.sin(2 * theta)) < 1e-15

    @pytest.mark.parametrize("N", [3, 4, 5])
    def test_coupling_matches_dense_exponential(self, rng, N):
        _, xx = dense_sums(N)
        s = random_state(rng, N)
        for theta in (math.pi / 4, 0.37):
            want = scipy.linalg.expm(1j * theta * xx) @ s.amplitudes
            assert np.max(np.abs(apply_coupling(s, theta).amplitudes - want)) < 1e-12

    def test_field_and_coupling_do_not_commute(self, rng):
        s = random_state(rng, 4)
        a = apply_coupling(apply_field(s, 0.4), 0.3)
        b = apply_field(apply_coupling(s, 0.3), 0.4)
        assert np.max(np.abs(a.amplitudes - b.amplitudes)) > 1e-3

    def test_same_kind_gates_commute(self, rng):
        s = random_state(rng, 4)
        a = apply_coupling(apply_coupling(s, 0.3), 0.8).amplitudes
        b = apply_coupling(apply_coupling(s, 0.8), 0.3).amplitudes
        assert np.max(np.abs(a - b)) < 1e-12
        a = apply_field(apply_field(s, 0.3), 0.8).amplitudes
        b = apply_field(apply_field(s, 0.8), 0.3).amplitudes
        assert np.max(np.abs(a - b)) < 1e-12


class TestCircuits:
    def test_degree_zero_is_field_only(self, rng):
        s = random_state(rng, 4)
        prog = PhaseProgram(0.9, (0.25,))
        assert np.allclose(qsp_spin(s, prog).amplitudes, apply_field(s, 0.25).amplitudes)
        assert np.allclose(qsp_spin_dual(s, PhaseProgram(0.9, (0.0,))).amplitudes, s.amplitudes)

    def test_matches_dense_operator_product(self, rng):
        N = 4
        zsum, xx = dense_sums(N)
        s = random_state(rng, N)
        prog = random_program(rng)
        V = scipy.linalg.expm(1j * prog.phis[0] * zsum)
        for phi in prog.phis[1:]:
            V = V @ scipy.linalg.expm(1j * prog.theta * xx) @ scipy.linalg.expm(1j * phi * zsum)
        assert np.max(np.abs(qsp_spin(s, prog).amplitudes - V @ s.amplitudes)) < 1e-10
        W = scipy.linalg.expm(1j * prog.phis[0] * xx)
        for phi in prog.phis[1:]:
            W = W @ scipy.linalg.expm(1j * prog.theta * zsum) @ scipy.linalg.expm(1j * phi * xx)
        assert np.max(np.abs(qsp_spin_dual(s, prog).amplitudes - W @ s.amplitudes)) < 1e-10

    def test_dual_with_zero_theta_is_pure_coupling(self, rng):
        s = random_state(rng, 4)
        prog = PhaseProgram(0.0, (0.2, 0.3, -0.1))
        assert np.allclose(qsp_spin_dual(s, prog).amplitudes, apply_coupling(s, 0.4).amplitudes)

    @pytest.mark.parametrize("N", [4, 6])
    def test_parity_and_norm_conserved(self, rng, N):
        for _ in range(5):
            s = random_state(rng, N)
            prog = random_program(rng)
            for out in (qsp_spin(s, prog), qsp_spin_dual(s, prog)):
                assert abs(parity_expectation(out) - parity_expectation(s)) < 1e-10
                assert abs(out.norm() - 1) < 1e-10

    def test_translation_invariance(self, rng):
        s = random_state(rng, 6)
        prog = random_program(rng)
        a = shift_sites(qsp_spin(s, prog), 1).amplitudes
        b = qsp_spin(shift_sites(s, 1), prog).amplitudes
        assert np.max(np.abs(a - b)) < 1e-10
        assert not np.allclose(shift_sites(s, 1).amplitudes, s.amplitudes)

    def test_bb1_kills_vacuum_at_n10(self):
        _, prog = bb1_phases()
        amp = all_up(10).overlap(qsp_spin(all_up(10), prog))
        assert abs(amp) ** 2 <= 1e-10
        assert abs(predict_vacuum_amplitude(prog, 10)) <= 1e-10


class TestMomentumCorrespondence:
    @pytest.mark.parametrize("N", [4, 6, 8, 10])
    def test_vacuum_amplitude_magnitudes(self, rng, N):
        vac = all_up(N)
        for _ in range(25):
            prog = random_program(rng, max_d=8)
            dense = vac.overlap(qsp_spin(vac, prog))
            assert abs(abs(dense) - abs(predict_vacuum_amplitude(prog, N))) < 1e-8

    @pytest.mark.parametrize("N", [4, 6, 8])
    def test_vacuum_amplitude_phase_is_pinned(self, rng, N):
        # Empirically the dense amplitude equals the block product exactly.
        vac = all_up(N)
        for _ in range(10):
            prog = random_program(rng)
            pred = predict_vacuum_amplitude(prog, N)
            if abs(pred) > 1e-3:
                assert abs(vac.overlap(qsp_spin(vac, prog)) - pred) < 1e-10

    def test_degree_zero_prediction(self):
        amp = predict_vacuum_amplitude(PhaseProgram(0.3, (0.2,)), 6)
        assert abs(abs(amp) - 1) < 1e-15
        assert abs(amp - np.exp(6 * 0.2j)) < 1e-14

    @pytest.mark.parametrize("N", [4, 6, 8])
    def test_pair_overlap_matches_block_evolution(self, rng, N):
        vac = all_up(N)
        for _ in range(3):
            prog = random_program(rng)
            out = qsp_spin(vac, prog)
            ks, u, v = pair_amplitudes(prog, N)
            for i, k0 in enumerate(ks):
                got = two_excitation_state(k0, N).overlap(out)
                pred = u[i] * np.prod(np.delete(v, i))
                assert abs(abs(got) - abs(pred)) < 1e-10
                assert abs(got + pred) < 1e-10  # pinned relative sign -1


class TestGridAndStates:
    def test_grids(self):
        assert np.allclose(momentum_grid(4).ks, (math.pi / 4, 3 * math.pi / 4))
        assert np.allclose(momentum_grid(6).ks, (math.pi / 6, math.pi / 2, 5 * math.pi / 6))
        assert all(abs(k - math.pi / 2) > 0.1 for k in momentum_grid(8).ks)
        g = momentum_grid(12)
        assert g.sector == "even" and len(g.ks) == 6 and all(np.diff(g.ks) > 0)

    def test_odd_n_unsupported(self):
        with pytest.raises(DomainError, match="unsupported"):
            momentum_grid(5)

    def test_pair_state(self):
        s = two_excitation_state(math.pi / 4, 4)
        assert abs(s.norm() - 1) < 1e-15
        assert s.overlap(all_up(4)) == 0
        support = np.nonzero(np.abs(s.amplitudes) > 0)[0]
        assert all(bin(i).count("1") == 2 for i in support)
        assert parity_expectation(s) == pytest.approx(1.0)
        with pytest.raises(DomainError):
            two_excitation_state(0.3, 4)

    def test_state_validation(self):
        with pytest.raises(DomainError):
            DenseState(np.ones(4), 3)
        with pytest.raises(DomainError):
            DenseState(np.ones(1 << 15), 15)

    def test_json_and_binary_roundtrip(self, rng):
        s = random_state(rng, 3)
        assert np.array_equal(DenseState.from_json(s.to_json()).amplitudes, s.amplitudes)
        blob = s.to_bytes()
        assert blob[:4] == (3).to_bytes(4, "little") and len(blob) == 4 + 16 * 8
        assert np.array_equal(DenseState.from_bytes(blob).amplitudes, s.amplitudes)


class TestBdG:
    def test_examples(self):
        assert np.allclose(bdg_matrix(BdGParams(1.5, 0.5, 0.0)), 2 * (1.5 - 0.5) * Z)
        assert np.allclose(bdg_matrix(BdGParams(0.7, 0.7, 0.0)), 0)
        assert np.allclose(bdg_matrix(BdGParams(1, 1, math.pi / 2)), 2 * Z + 2 * X)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-math.pi, math.pi))
    def test_hermitian_traceless(self, g, J, k):
        h = bdg_matrix(BdGParams(g, J, k))
        assert np.allclose(h, h.conj().T) and abs(np.trace(h)) < 1e-15
