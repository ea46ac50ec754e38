"""Unit tests for the quaternion algebra module.

The independent oracle for products is plain 2x2 complex matrix
multiplication of the matrix representations; the 4x4 real representation is
checked against numpy matmul.
"""

import numpy as np
import pytest

from quatwave.errors import SingularQuaternion
from quatwave.quaternion import (
    ONE, QI, QJ, QK,
    Quaternion, RotationDilation,
    from_vec4, quat_conj, quat_det, quat_inverse, quat_mul,
    rot_dil_assemble, rot_dil_decompose, to_real4x4, vec4,
)


def mat_oracle_mul(p: Quaternion, q: Quaternion) -> np.ndarray:
    return p.matrix @ q.matrix


def random_quaternion(rng) -> Quaternion:
    return Quaternion.from_components(*rng.standard_normal(4))


def assert_quat_close(p: Quaternion, q: Quaternion, atol=1e-12):
    np.testing.assert_allclose(p.matrix, q.matrix, atol=atol)


# ---------------------------------------------------------------------------
# multiplication


UNITS = {"1": ONE, "i": QI, "j": QJ, "k": QK}

# full multiplication table of {1, i, j, k}: (left, right) -> (sign, unit)
TABLE = {
    ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
    ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
    ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
    ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
}


@pytest.mark.parametrize("left,right", list(TABLE))
def test_unit_multiplication_table_exact(left, right):
    sign, unit = TABLE[(left, right)]
    prod = quat_mul(UNITS[left], UNITS[right])
    expect = UNITS[unit] if sign == 1 else -UNITS[unit]
    # entries are 0 or +-1: must be exact in floating point
    assert prod.z1 == expect.z1 and prod.z2 == expect.z2


def test_mul_matches_matrix_product_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p, q = random_quaternion(rng), random_quaternion(rng)
        np.testing.assert_allclose(quat_mul(p, q).matrix, mat_oracle_mul(p, q),
                                   rtol=1e-13, atol=1e-13)


def test_identity_element():
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = random_quaternion(rng)
        assert_quat_close(quat_mul(q, ONE), q)
        assert_quat_close(quat_mul(ONE, q), q)


def test_one_plus_i_times_one_minus_i():
    # (1+i)(1-i) = 2, frozen from the matrix-product oracle
    p = Quaternion.from_components(1, 1, 0, 0)
    q = Quaternion.from_components(1, -1, 0, 0)
    assert_quat_close(quat_mul(p, q), 2 * ONE)


def test_associativity_and_bilinearity_random():
    rng = np.random.default_rng(11)
    for _ in range(500):
        p, q, r = (random_quaternion(rng) for _ in range(3))
        lhs = quat_mul(quat_mul(p, q), r)
        rhs = quat_mul(p, quat_mul(q, r))
        np.testing.assert_allclose(lhs.matrix, rhs.matrix, rtol=1e-12, atol=1e-12)
        a, b = rng.standard_normal(2)
        lin = quat_mul(a * p + b * q, r)
        exp = a * quat_mul(p, r) + b * quat_mul(q, r)
        np.testing.assert_allclose(lin.matrix, exp.matrix, rtol=1e-12, atol=1e-12)


# ---------------------------------------------------------------------------
# det / conjugate / inverse


def test_det_componentwise():
    # (1,2,3,4) -> 1+4+9+16 = 30, evaluated componentwise
    assert quat_det(Quaternion.from_components(1, 2, 3, 4)) == pytest.approx(30.0)
    assert quat_det(ONE) == 1.0
    assert quat_det(Quaternion(0j, 0j)) == 0.0


def test_det_equals_matrix_determinant():
    rng = np.random.default_rng(5)
    for _ in range(50):
        q = random_quaternion(rng)
        np.testing.assert_allclose(quat_det(q), np.linalg.det(q.matrix).real,
                                   rtol=1e-12)


def test_det_multiplicative():
    rng = np.random.default_rng(13)
    for _ in range(500):
        p, q = random_quaternion(rng), random_quaternion(rng)
        np.testing.assert_allclose(quat_det(quat_mul(p, q)),
                                   quat_det(p) * quat_det(q), rtol=1e-12)


def test_conjugate():
    q = Quaternion.from_components(1, 2, 3, 4)
    assert quat_conj(q).components == (1, -2, -3, -4)
    assert_quat_close(quat_conj(quat_conj(q)), q)
    # q^dag q = q q^dag = |q|^2 sigma0
    np.testing.assert_allclose(quat_mul(quat_conj(q), q).matrix,
                               quat_det(q) * ONE.matrix, atol=1e-12)
    np.testing.assert_allclose(q.matrix.conj().T, quat_conj(q).matrix, atol=0)


def test_inverse():
    assert_quat_close(quat_inverse(ONE), ONE)
    # i^{-1} = -i, verified through the multiplication oracle
    assert_quat_close(quat_mul(QI, quat_inverse(QI)), ONE)
    assert_quat_close(quat_inverse(QI), -QI)
    rng = np.random.default_rng(17)
    for _ in range(100):
        q = random_quaternion(rng)
        assert_quat_close(quat_mul(q, quat_inverse(q)), ONE, atol=1e-12)
    with pytest.raises(SingularQuaternion):
        quat_inverse(Quaternion(0j, 0j))


def test_inverse_epsilon_configurable():
    tiny = Quaternion.from_components(1e-8, 0, 0, 0)
    quat_inverse(tiny)  # default admits it
    with pytest.raises(SingularQuaternion):
        quat_inverse(tiny, eps=1e-10)


# ---------------------------------------------------------------------------
# 4x4 real representation


def test_real4x4_identity():
    np.testing.assert_array_equal(to_real4x4(ONE), np.eye(4))


def test_real4x4_action_matches_quaternion_product():
    rng = np.random.default_rng(19)
    for _ in range(200):
        q, x = random_quaternion(rng), random_quaternion(rng)
        np.testing.assert_allclose(to_real4x4(q) @ vec4(x), vec4(quat_mul(q, x)),
                                   rtol=1e-12, atol=1e-12)


def test_real4x4_homomorphism():
    rng = np.random.default_rng(23)
    for _ in range(500):
        p, q = random_quaternion(rng), random_quaternion(rng)
        np.testing.assert_allclose(to_real4x4(quat_mul(p, q)),
                                   to_real4x4(p) @ to_real4x4(q),
                                   rtol=1e-12, atol=1e-12)


def test_real4x4_orthogonality_and_norm_scaling():
    rng = np.random.default_rng(29)
    for _ in range(200):
        q = random_quaternion(rng)
        A = to_real4x4(q)
        d = quat_det(q)
        np.testing.assert_allclose(A.T @ A, d * np.eye(4), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(A @ A.T, d * np.eye(4), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(np.linalg.det(A), d ** 2, rtol=1e-10)
        x = rng.standard_normal(4)
        # ||A x||^2 = det(A)^{1/2} ||x||^2
        np.testing.assert_allclose(np.sum((A @ x) ** 2), d * np.sum(x ** 2),
                                   rtol=1e-12)


def test_vec4_roundtrip():
    q = Quaternion.from_components(0.3, -1.2, 0.7, 2.5)
    assert_quat_close(from_vec4(vec4(q)), q)
    np.testing.assert_array_equal(vec4(q), [0.3, 2.5, 0.7, -1.2])


# ---------------------------------------------------------------------------
# rotation-dilation decomposition


def test_decompose_examples():
    rd = rot_dil_decompose(2 * ONE)
    assert (rd.lam1, rd.theta1, rd.lam2, rd.theta2) == pytest.approx((2, 0, 0, 0))
    rd = rot_dil_decompose(QK)  # a3 = 1
    assert (rd.lam1, rd.theta1, rd.lam2, rd.theta2) == pytest.approx((1, np.pi / 2, 0, 0))
    rd = rot_dil_decompose(QJ)  # a2 = 1
    assert (rd.lam1, rd.theta1, rd.lam2, rd.theta2) == pytest.approx((0, 0, 1, 0))


def test_decompose_assemble_roundtrip():
    rng = np.random.default_rng(31)
    for _ in range(300):
        q = random_quaternion(rng)
        rd = rot_dil_decompose(q)
        if min(rd.lam1, rd.lam2) <= 1e-8:
            continue
        err = np.max(np.abs(rot_dil_assemble(rd) - to_real4x4(q)))
        assert err < 1e-12
        assert_quat_close(rd.to_quaternion(), q, atol=1e-12)


def test_decompose_angle_range_and_condition():
    rng = np.random.default_rng(37)
    for _ in range(200):
        q = random_quaternion(rng)
        rd = rot_dil_decompose(q)
        assert 0.0 <= rd.theta1 < 2 * np.pi
        assert 0.0 <= rd.theta2 < 2 * np.pi
        assert rd.lam1 ** 2 + rd.lam2 ** 2 > 0
    with pytest.raises(SingularQuaternion):
        rot_dil_decompose(Quaternion(0j, 0j))


def test_assemble_matches_block_formula():
    rd = RotationDilation(1.3, 0.4, 0.6, 5.1)
    A = rd.matrix()
    q = rd.to_quaternion()
    np.testing.assert_allclose(A, to_real4x4(q), atol=1e-14)
