"""Quaternion algebra in the 2x2 complex matrix representation.

A quaternion q = q0 + q1*i + q2*j + q3*k is stored as the complex pair

    z1 = q0 + i*q3,    z2 = q2 + i*q1,

and identified with the matrix [[z1, -conj(z2)], [z2, conj(z1)]].  The
imaginary units are i = 1j*sigma1, j = -1j*sigma2, k = 1j*sigma3 in terms of
the Pauli matrices, so multiplication is plain 2x2 matrix multiplication.

Vector convention
-----------------
Throughout the package a quaternion maps to R^4 in the order

    vec4(q) = (q0, q3, q2, q1)

NOT (q0, q1, q2, q3).  With this ordering, left multiplication by a
quaternion ``a`` acts on R^4 as the 4x4 matrix ``to_real4x4(a)`` whose 2x2
blocks are rotation-dilation matrices; all lattice axes in the field modules
follow the same order.  ``lam1, theta1`` are the polar coordinates of z1 and
``lam2, theta2`` those of z2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularQuaternion

__all__ = [
    "SIGMA0", "SIGMA1", "SIGMA2", "SIGMA3",
    "Quaternion", "RotationDilation",
    "ONE", "QI", "QJ", "QK",
    "quat_mul", "quat_det", "quat_conj", "quat_inverse",
    "to_real4x4", "rot_dil_decompose", "rot_dil_assemble",
    "vec4", "from_vec4", "rotation2",
]

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class Quaternion:
    """Immutable quaternion stored as the complex pair (z1, z2).

    The 2x2 matrix [[z1, -conj(z2)], [z2, conj(z1)]] is a view computed on
    demand, never stored.
    """

    z1: complex
    z2: complex

    @classmethod
    def from_components(cls, q0: float, q1: float, q2: float, q3: float) -> "Quaternion":
        return cls(complex(q0, q3), complex(q2, q1))

    @property
    def components(self) -> tuple[float, float, float, float]:
        """(q0, q1, q2, q3) real components."""
        return (self.z1.real, self.z2.imag, self.z2.real, self.z1.imag)

    @property
    def matrix(self) -> np.ndarray:
        """The 2x2 complex matrix representation."""
        return np.array([[self.z1, -np.conj(self.z2)],
                         [self.z2, np.conj(self.z1)]])

    def conjugate(self) -> "Quaternion":
        return quat_conj(self)

    def det(self) -> float:
        return quat_det(self)

    def norm(self) -> float:
        return float(np.sqrt(quat_det(self)))

    def inverse(self, eps: float = 1e-300) -> "Quaternion":
        return quat_inverse(self, eps=eps)

    def transpose(self) -> "Quaternion":
        """Matrix transpose, again a quaternion: (z1, z2) -> (z1, -conj(z2))."""
        return Quaternion(self.z1, -np.conj(self.z2))

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        return Quaternion(self.z1 * other, self.z2 * other)

    def __rmul__(self, other):
        # other is a scalar (real); real scalars commute with quaternions
        return Quaternion(other * self.z1, other * self.z2)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.z1 + other.z1, self.z2 + other.z2)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.z1 - other.z1, self.z2 - other.z2)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.z1, -self.z2)

    def isclose(self, other: "Quaternion", atol: float = 1e-12) -> bool:
        return (abs(self.z1 - other.z1) <= atol) and (abs(self.z2 - other.z2) <= atol)


ONE = Quaternion.from_components(1.0, 0.0, 0.0, 0.0)
QI = Quaternion.from_components(0.0, 1.0, 0.0, 0.0)
QJ = Quaternion.from_components(0.0, 0.0, 1.0, 0.0)
QK = Quaternion.from_components(0.0, 0.0, 0.0, 1.0)


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Quaternion product, equal to the 2x2 matrix product of the
    representations."""
    return Quaternion(p.z1 * q.z1 - np.conj(p.z2) * q.z2,
                      p.z2 * q.z1 + np.conj(p.z1) * q.z2)


def quat_det(q: Quaternion) -> float:
    """|z1|^2 + |z2|^2 = q0^2 + q1^2 + q2^2 + q3^2, the determinant of the
    matrix form and the squared norm."""
    z1, z2 = q.z1, q.z2
    return float(z1.real ** 2 + z1.imag ** 2 + z2.real ** 2 + z2.imag ** 2)


def quat_conj(q: Quaternion) -> Quaternion:
    """Quaternionic conjugate (q0, -q1, -q2, -q3); equals the matrix dagger."""
    return Quaternion(np.conj(q.z1), -q.z2)


def quat_inverse(q: Quaternion, eps: float = 1e-300) -> Quaternion:
    """Inverse conj(q)/|q|^2.

    Raises SingularQuaternion when det(q) <= eps; the default eps admits
    every nonzero floating-point quaternion and only rejects the zero
    quaternion (and underflowed ones).
    """
    d = quat_det(q)
    if not d > eps:
        raise SingularQuaternion(f"quaternion determinant {d!r} <= eps {eps!r}")
    return Quaternion(np.conj(q.z1) / d, -q.z2 / d)


def vec4(q: Quaternion) -> np.ndarray:
    """Map a quaternion to R^4 with component order (q0, q3, q2, q1)."""
    q0, q1, q2, q3 = q.components
    return np.array([q0, q3, q2, q1], dtype=float)


def from_vec4(x) -> Quaternion:
    """Inverse of :func:`vec4`: x = (x0, x3, x2, x1) -> quaternion."""
    x = np.asarray(x, dtype=float)
    return Quaternion(complex(x[0], x[1]), complex(x[2], x[3]))


def to_real4x4(q: Quaternion) -> np.ndarray:
    """4x4 real matrix of left multiplication by q on vec4 coordinates.

    Satisfies vec4(q*x) = to_real4x4(q) @ vec4(x) for all x, together with
    A^T A = |q|^2 I and det(A) = |q|^4.
    """
    a0, a1, a2, a3 = q.components
    return np.array([
        [a0, -a3, -a2, -a1],
        [a3,  a0,  a1, -a2],
        [a2, -a1,  a0,  a3],
        [a1,  a2, -a3,  a0],
    ])


def rotation2(theta: float) -> np.ndarray:
    """2x2 rotation matrix R(theta)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class RotationDilation:
    """Polar form of an invertible quaternion: z1 = lam1*exp(i*theta1),
    z2 = lam2*exp(i*theta2), with lam1^2 + lam2^2 > 0 and angles in [0, 2*pi).

    The associated 4x4 matrix is [[lam1 R(t1), -lam2 R(-t2)],
    [lam2 R(t2), lam1 R(-t1)]].
    """

    lam1: float
    theta1: float
    lam2: float
    theta2: float

    def matrix(self) -> np.ndarray:
        out = np.empty((4, 4))
        out[:2, :2] = self.lam1 * rotation2(self.theta1)
        out[:2, 2:] = -self.lam2 * rotation2(-self.theta2)
        out[2:, :2] = self.lam2 * rotation2(self.theta2)
        out[2:, 2:] = self.lam1 * rotation2(-self.theta1)
        return out

    def to_quaternion(self) -> Quaternion:
        return Quaternion(self.lam1 * np.exp(1j * self.theta1),
                          self.lam2 * np.exp(1j * self.theta2))


def _angle_02pi(z: complex) -> float:
    """Two-argument arctangent folded into [0, 2*pi)."""
    th = float(np.angle(z))
    if th < 0.0:
        th += 2.0 * np.pi
    if th >= 2.0 * np.pi:  # guard against rounding at the seam
        th = 0.0
    return th


def rot_dil_decompose(q: Quaternion, eps: float = 1e-300) -> RotationDilation:
    """Polar decomposition (lam1, theta1, lam2, theta2) of an invertible
    quaternion.

    lam_i = |z_i|; theta_i is the phase of z_i in [0, 2*pi), set to 0 by
    convention when lam_i = 0 (the arctangent is undefined there).
    """
    if not quat_det(q) > eps:
        raise SingularQuaternion("cannot decompose the zero quaternion")
    lam1 = abs(q.z1)
    lam2 = abs(q.z2)
    th1 = _angle_02pi(q.z1) if lam1 > 0.0 else 0.0
    th2 = _angle_02pi(q.z2) if lam2 > 0.0 else 0.0
    return RotationDilation(lam1, th1, lam2, th2)


def rot_dil_assemble(rd: RotationDilation) -> np.ndarray:
    """4x4 matrix from polar data; inverse of decompose up to roundoff."""
    return rd.matrix()


# ---------------------------------------------------------------------------
# Batched helpers on (z1, z2) component arrays.  These are used by the group
# and quadrature code where per-object arithmetic would be too slow.

def mul_arrays(p1, p2, q1, q2):
    """Componentwise quaternion product of arrays of (z1, z2) pairs."""
    return (p1 * q1 - np.conj(p2) * q2, p2 * q1 + np.conj(p1) * q2)


def det_arrays(z1, z2):
    return np.abs(z1) ** 2 + np.abs(z2) ** 2


def inverse_arrays(z1, z2):
    d = det_arrays(z1, z2)
    return np.conj(z1) / d, -z2 / d
