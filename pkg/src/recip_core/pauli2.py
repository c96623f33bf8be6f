"""Exact 2x2 complex matrix algebra in the Pauli basis.

A 2x2 matrix M is stored as (v0, v) with M = v0*s0 + v.s, s = (s1, s2, s3) the
Pauli matrices; v is the complex Poincare vector. Raw matrices appear only at
the I/O boundary (``compose`` / ``decompose``)."""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from recip_core.errors import PreconditionError

TWO_PI = 2 * np.pi
unit_tol = 1e-9

SIGMA = np.array([[[0, 1], [1, 0]],
                  [[0, -1j], [1j, 0]],
                  [[1, 0], [0, -1]]], dtype=complex)

def wrap_angle(angle):
    """Map an angle (radians) into [0, 2pi)."""
    angle = float(np.mod(angle, TWO_PI))
    return 0.0 if angle >= TWO_PI else angle

def canonical_axis(n, tol=1e-12):
    """Flip a direction so that its first non-negligible component is positive."""
    n = np.asarray(n, dtype=float)
    for x in n:
        if abs(x) > tol:
            return -n if x < 0 else n
    return n

def _unit(n, tol=unit_tol):
    n = np.asarray(n, dtype=float).reshape(3)
    if abs(np.linalg.norm(n) - 1) > tol:
        raise PreconditionError(f"axis {n} is not a unit vector")
    return n / np.linalg.norm(n)


@dataclass(frozen=True, eq=False)
class PauliForm:
    """A 2x2 complex matrix v0*s0 + v.s."""
    v0: complex
    v: np.ndarray

    __array_ufunc__ = None

    def __post_init__(self):
        v = np.array(self.v, dtype=complex).reshape(3)
        v.setflags(write=False)
        object.__setattr__(self, 'v0', complex(self.v0))
        object.__setattr__(self, 'v', v)

    def __add__(self, other):
        return PauliForm(self.v0 + other.v0, self.v + other.v)

    def __sub__(self, other):
        return PauliForm(self.v0 - other.v0, self.v - other.v)

    def __neg__(self):
        return PauliForm(-self.v0, -self.v)

    def __mul__(self, scalar):
        return PauliForm(scalar * self.v0, scalar * self.v)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return mul(self, other)

    def __repr__(self):
        return f"PauliForm(v0={self.v0!r}, v={self.v.tolist()!r})"

    def norm(self):
        """Frobenius norm of the materialized matrix."""
        return float(np.sqrt(2 * (abs(self.v0)**2 + np.vdot(self.v, self.v).real)))


@dataclass(frozen=True, eq=False)
class AxisAngleUnitary:
    """The unitary exp(i delta) (cos(phi/2) s0 - i sin(phi/2) n.s)."""
    delta: float
    phi: float
    n: np.ndarray

    def __post_init__(self):
        n = _unit(self.n)
        n.setflags(write=False)
        object.__setattr__(self, 'delta', wrap_angle(self.delta))
        object.__setattr__(self, 'phi', wrap_angle(self.phi))
        object.__setattr__(self, 'n', n)

    @classmethod
    def identity(cls):
        return cls(0.0, 0.0, (0., 0., 1.))

    def __repr__(self):
        return f"AxisAngleUnitary(delta={self.delta!r}, phi={self.phi!r}, n={self.n.tolist()!r})"


class AxisRotation(NamedTuple):
    """A proper rotation O_{n,phi} of Poincare (or real) space."""
    n: np.ndarray
    phi: float

    def matrix(self):
        return rotation_matrix(self.n, self.phi)

    def apply(self, x):
        return rotate3(self.n, self.phi, x)


def identity():
    return PauliForm(1, np.zeros(3))

def sigma(j):
    """The Pauli matrix s_j (j = 0..3) as a PauliForm."""
    return identity() if j == 0 else PauliForm(0, np.eye(3)[j - 1])

def decompose(M):
    """Pauli components of a 2x2 matrix.

     :param M: 2x2 array-like of complex entries.

     :return: the PauliForm (v0, v) with compose(decompose(M)) == M."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2): raise ValueError(f"expected a 2x2 matrix, got shape {M.shape}")
    return PauliForm((M[0, 0] + M[1, 1]) / 2,
                     ((M[1, 0] + M[0, 1]) / 2, (M[1, 0] - M[0, 1]) / 2j, (M[0, 0] - M[1, 1]) / 2))

def compose(p):
    """Materialize a PauliForm as a 2x2 complex ndarray."""
    v0, (v1, v2, v3) = p.v0, p.v
    return np.array([[v0 + v3, v1 - 1j*v2], [v1 + 1j*v2, v0 - v3]], dtype=complex)

def transpose_pauli(p):
    """Matrix transposition; geometrically the P13 reflection v2 -> -v2."""
    return PauliForm(p.v0, reflect13(p.v))

def adjoint(p):
    return PauliForm(np.conj(p.v0), np.conj(p.v))

def reflect13(x):
    """Mirror a (Poincare) vector through the s1-s3 plane."""
    return np.asarray(x) * np.array([1, -1, 1])

def mul(a, b):
    """Product of two PauliForms via (a.s)(b.s) = (a.b) s0 + i (a x b).s."""
    return PauliForm(a.v0*b.v0 + np.dot(a.v, b.v),
                     a.v0*b.v + b.v0*a.v + 1j*np.cross(a.v, b.v))

def exp2(M):
    """Closed-form matrix exponential of a PauliForm.

    With N = v.s the traceless part, det N = -(v.v) and
    e^M = e^{v0} (cos z s0 + (sin z / z) N), z = sqrt(det N).
    Both functions of z are even, so the branch of the root is irrelevant;
    below |z| = 1e-4 they are taken from their series. Otherwise e^{v0} is
    folded into e^{v0 +- iz}, which stays finite when e^{v0} underflows
    against a growing cos z.

     :param M: PauliForm.

     :return: PauliForm of exp(M)."""
    z = np.sqrt(complex(-np.dot(M.v, M.v)))
    if abs(z) < 1e-4:
        z2 = z * z
        scale = np.exp(M.v0)
        return PauliForm(scale * (1 - z2/2 + z2*z2/24), scale * (1 - z2/6 + z2*z2/120) * M.v)
    up, down = np.exp(M.v0 + 1j*z), np.exp(M.v0 - 1j*z)
    return PauliForm((up + down) / 2, (up - down) / (2j * z) * M.v)

def conjugate(p, u):
    """U p U^-1 for an AxisAngleUnitary u."""
    U = unitary_matrix(u)
    return mul(mul(U, p), adjoint(U))

def is_unitary(p, tol=1e-9):
    U = compose(p)
    return np.linalg.norm(U @ U.conj().T - np.eye(2)) <= tol

def unitary_matrix(u):
    """The PauliForm exp(i delta)(cos(phi/2) s0 - i sin(phi/2) n.s) of an AxisAngleUnitary."""
    phase = np.exp(1j * u.delta)
    return PauliForm(phase * np.cos(u.phi / 2), -1j * phase * np.sin(u.phi / 2) * u.n)

def rotation_of(u):
    """The SO(3) rotation carried by u: U (x.s) U^-1 = (O_{n,phi} x).s for real x."""
    return AxisRotation(np.array(u.n), u.phi)

def rotate3(n, phi, x):
    """Rotate x about the unit axis n by phi (right-handed).

     :param n: unit 3-vector.
     :param phi: angle in radians.
     :param x: 3-vector (real or complex; the map is linear).

     :return: (n.x) n + [x - (n.x) n] cos(phi) + (n x x) sin(phi)"""
    n = _unit(n)
    x = np.asarray(x)
    along = np.dot(n, x) * n
    return along + (x - along) * np.cos(phi) + np.cross(n, x) * np.sin(phi)

def rotation_matrix(n, phi):
    n = _unit(n)
    cross = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.cos(phi) * np.eye(3) + np.sin(phi) * cross + (1 - np.cos(phi)) * np.outer(n, n)

def axis_angle_of(p, tol=1e-9):
    """Extract (delta, phi, n) from a unitary PauliForm.

    The (n, phi, delta) ~ (-n, 2pi - phi, delta + pi) ambiguity is resolved by
    making the first nonzero axis component positive; phi = 0 reports n = z.

     :param p: unitary PauliForm.
     :param tol: unitarity tolerance.

     :return: AxisAngleUnitary u with unitary_matrix(u) == p."""
    if not is_unitary(p, tol): raise PreconditionError("matrix is not unitary")
    root = np.sqrt(complex(p.v0**2 - np.dot(p.v, p.v)))
    w0, w = p.v0 / root, p.v / root
    s = np.real(1j * w)
    sin_half = np.linalg.norm(s)
    phi = 2 * np.arctan2(sin_half, w0.real)
    delta = np.angle(root)
    if sin_half < 1e-15:
        n = np.array([0., 0., 1.])
        if w0.real < 0: phi, delta = 0.0, delta + np.pi
    else:
        n = s / sin_half
        flipped = canonical_axis(n)
        if not np.array_equal(flipped, n): n, phi, delta = flipped, TWO_PI - phi, delta + np.pi
    return AxisAngleUnitary(delta, phi, n)

def axis_angle_from_rotation(R, tol=1e-9):
    """Lift a 3x3 rotation matrix to SU(2) with delta = 0 and a canonical axis.

     :param R: 3x3 proper orthogonal matrix.
     :param tol: orthogonality tolerance.

     :return: AxisAngleUnitary u with rotation_of(u).matrix() == R."""
    R = np.asarray(R, dtype=float)
    if np.linalg.norm(R @ R.T - np.eye(3)) > tol or np.linalg.det(R) < 0:
        raise PreconditionError("matrix is not a proper rotation")
    a = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    cos_phi = (np.trace(R) - 1) / 2
    if np.linalg.norm(a) < 1e-14 and cos_phi > 0:
        return AxisAngleUnitary.identity()
    if cos_phi < 0:
        # near pi the antisymmetric part is small; read the axis off (R + R^T)/2 = cos I + (1 - cos) n n^T
        B = (R + R.T) / 2 - cos_phi * np.eye(3)
        j = np.argmax(np.diag(B))
        n = B[:, j] / np.linalg.norm(B[:, j])
        if np.dot(a, n) < 0: n = -n
    else:
        n = a / np.linalg.norm(a)
    phi = np.arctan2(np.dot(a, n) / 2, cos_phi)
    flipped = canonical_axis(n)
    if not np.array_equal(flipped, n): n, phi = flipped, TWO_PI - phi
    return AxisAngleUnitary(0.0, phi, n)
