import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isingqsp.errors import DomainError
from isingqsp.su2 import (
    I2,
    SX,
    SY,
    SZ,
    AxisAngle,
    conjugate,
    dagger,
    det,
    eigenvalues,
    floquet_exponents,
    is_unitary,
    matmul,
    rot,
    strip_scalar,
    trace,
)

from conftest import random_unitary

angles = st.floats(-10, 10, allow_nan=False)
unit_axes = st.tuples(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
).filter(lambda v: np.linalg.norm(v) > 1e-3).map(lambda v: tuple(np.asarray(v) / np.linalg.norm(v)))


def test_rot_zero_angle_is_identity():
    assert np.allclose(rot(AxisAngle((0, 0, 1), 0.0)), I2, atol=0)


def test_rot_quarter_turn_about_x():
    assert np.allclose(rot((1, 0, 0), math.pi / 2), 1j * SX, atol=1e-15)


def test_rot_signal_axis_example():
    k, theta = math.pi / 3, math.pi / 8
    got = rot((-math.sin(k), 0, math.cos(k)), 2 * theta)
    want = math.cos(math.pi / 4) * I2 + 1j * math.sin(math.pi / 4) * (SZ / 2 - SX * math.sqrt(3) / 2)
    assert np.max(np.abs(got - want)) < 1e-15


def test_rot_rejects_non_unit_axis():
    with pytest.raises(DomainError):
        rot((1, 1, 0), 0.3)


@given(unit_axes, angles, angles)
def test_rot_composes_additively(n, a, b):
    assert np.max(np.abs(rot(n, a) @ rot(n, b) - rot(n, a + b))) < 1e-12


@given(unit_axes, angles)
def test_rot_is_special_unitary(n, a):
    u = rot(n, a)
    assert is_unitary(u, 1e-12)
    assert abs(det(u) - 1) < 1e-12


def test_plumbing_identities(rng):
    a = random_unitary(rng) * 1.7
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.array_equal(matmul(I2, a), a)
    assert np.array_equal(dagger(dagger(a)), a)
    assert np.array_equal(conjugate(a), np.conj(a))
    assert abs(det(matmul(a, b)) - det(a) * det(b)) < 1e-12
    assert trace(a) == a[0, 0] + a[1, 1]
    assert np.allclose(dagger(rot((0, 0, 1), 0.4)), rot((0, 0, 1), -0.4))


def test_eigenvalues_identity():
    assert eigenvalues(I2) == (1, 1)


def test_eigenvalues_are_ordered_by_argument():
    lam = eigenvalues(np.diag([np.exp(1j * math.pi / 4), np.exp(-1j * math.pi / 4)]))
    assert abs(lam[0] - np.exp(-1j * math.pi / 4)) < 1e-15
    assert abs(lam[1] - np.exp(1j * math.pi / 4)) < 1e-15


def test_eigenvalues_modulus_tiebreak():
    lam = eigenvalues(np.diag([2.0, 0.5]).astype(complex))
    assert lam == (0.5, 2.0)


def test_eigenvalue_product_matches_det_on_random_matrices(rng):
    for _ in range(1000):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        l1, l2 = eigenvalues(a)
        assert abs(l1 * l2 - det(a)) < 1e-10
        assert abs(l1 + l2 - trace(a)) < 1e-10


def test_eigenvalues_of_defective_matrix():
    lam = eigenvalues(np.array([[1, 1], [0, 1]], dtype=complex))
    assert np.allclose(lam, (1, 1))


def test_floquet_exponents_examples():
    assert floquet_exponents(I2) == (0.0, 0.0)
    mu = floquet_exponents(rot((0, 0, 1), math.pi / 3))
    assert np.allclose(mu, (-math.pi / 3, math.pi / 3), atol=1e-15)


def test_floquet_exponents_branch_is_half_open():
    # lambda = -1 must map to mu = +pi, never -pi
    assert floquet_exponents(-I2) == (math.pi, math.pi)


def test_floquet_exponents_reject_non_unitary():
    with pytest.raises(DomainError, match="eigenvalues"):
        floquet_exponents(np.diag([2.0, 0.5]).astype(complex))


def test_floquet_exponents_agree_with_eigenvalues(rng):
    for _ in range(200):
        u = random_unitary(rng)
        mus = floquet_exponents(u)
        lams = eigenvalues(u)
        for mu in mus:
            assert min(abs(np.exp(-1j * mu) - lam) for lam in lams) < 1e-10


def test_is_unitary_examples():
    assert is_unitary(I2, 1e-12)
    assert not is_unitary(np.diag([2.0, 0.5]), 1e-6)
    with pytest.raises(DomainError):
        is_unitary(I2, 0.0)


def test_strip_scalar_recovers_phase():
    u = rot((0, 1, 0), 0.7)
    c, res = strip_scalar(np.exp(0.3j) * u, u)
    assert abs(c - np.exp(0.3j)) < 1e-15 and res < 1e-15
