"""Reciprocity analysis of one or several 2x2 potentials.

A family of potentials V = v0 s0 + v.s admits a common reciprocity operator
K = U J (V = U V^T U^-1 for all members) iff every Re v and Im v lies in one
plane of Poincare space. Transposition is the mirror P13 through the s1-s3
plane, so U is the rotation by twice the dihedral angle between the common
plane and the s1-s3 plane, about their line of intersection."""
from typing import NamedTuple, Optional

import numpy as np

from recip_core import pauli2
from recip_core.errors import InconsistencyError, PreconditionError
from recip_core.pauli2 import AxisAngleUnitary, PauliForm

default_tol = 1e-8
drop_tol = 1e-12
floor = 1e-300

SELF_TRANSPOSE = 'self_transpose'
RECIPROCAL = 'reciprocal'
MAGNITUDE_CANDIDATE = 'magnitude_reciprocal_only_candidate'
NONRECIPROCAL = 'nonreciprocal'

Y_AXIS = np.array([0., 1., 0.])


class AntiunitaryOp(NamedTuple):
    """K = U J, J the entrywise complex conjugation."""
    u: AxisAngleUnitary

    @classmethod
    def conjugation(cls):
        return cls(AxisAngleUnitary.identity())


class PlaneReport(NamedTuple):
    exists: bool
    normal: Optional[np.ndarray]
    residual: float
    rank: int
    line: Optional[np.ndarray] = None


class ReciprocityVerdict(NamedTuple):
    classification: str
    unitary: Optional[AxisAngleUnitary]
    symmetrizer: Optional[AxisAngleUnitary]
    residual: float
    plane: Optional[PlaneReport] = None


class Univectorial(NamedTuple):
    v0: complex
    c: complex
    b: np.ndarray


def _tol(tol):
    return default_tol if tol is None else tol

def poincare_pairs(potentials):
    """Collect the real and imaginary Poincare vectors of a potential family.

    Vectors shorter than drop_tol times the longest one are dropped; they carry no plane information.

     :param potentials: iterable of PauliForm.

     :return: list of real 3-vectors."""
    vectors = [part for V in potentials for part in (V.v.real.copy(), V.v.imag.copy())]
    if not vectors: return []
    largest = max(np.linalg.norm(x) for x in vectors)
    return [x for x in vectors if np.linalg.norm(x) > drop_tol * largest]

def common_plane(vectors, tol=None):
    """Fit the plane through the origin that best contains a set of directions.

    The vectors are normalized and stacked; the singular values of the stack are
    the principal values. A plane exists iff the smallest is at most
    tol * (largest + floor).

     :param vectors: iterable of real 3-vectors.
     :param tol: relative principal-value tolerance (default recip.default_tol).

     :return: PlaneReport; normal is None (and line reports the common direction) for rank <= 1 data."""
    tol = _tol(tol)
    vectors = [np.asarray(x, dtype=float) for x in vectors]
    vectors = [x for x in vectors if np.linalg.norm(x) > 0]
    if not vectors: return PlaneReport(True, None, 0.0, 0)
    units = np.array([x / np.linalg.norm(x) for x in vectors])
    _, s, vt = np.linalg.svd(units)
    s = np.concatenate([s, np.zeros(3 - len(s))])
    bound = tol * (s[0] + floor)
    residual = float(np.max(np.abs(units @ vt[2])))
    if s[1] <= bound:
        return PlaneReport(True, None, 0.0, 1, pauli2.canonical_axis(vt[0]))
    if s[2] <= bound:
        return PlaneReport(True, pauli2.canonical_axis(vt[2]), residual, 2)
    return PlaneReport(False, pauli2.canonical_axis(vt[2]), residual, 3)

def check_condition(V, u):
    """Frobenius norm of V - U V^T U^-1."""
    return (V - pauli2.conjugate(pauli2.transpose_pauli(V), u)).norm()

def _verification_bound(potentials, count, tol):
    scale = max([V.norm() for V in potentials] + [floor])
    return (4 * tol * np.sqrt(count + 1) + 1e-12) * scale

def _common_univectorial(potentials, tol):
    forms = [is_univectorial(V, tol) for V in potentials]
    if any(f is None for f in forms): return False
    scales = [f.c for f in forms if abs(f.c) > 0]
    if not scales: return False
    ref = scales[0] / abs(scales[0])
    return all(abs((c / ref).imag) <= tol * abs(c) for c in scales)

def find_reciprocity_unitary(potentials, tol=None):
    """Decide whether a family of potentials shares a reciprocity unitary and construct it.

     :param potentials: sequence of PauliForm.
     :param tol: plane tolerance (default recip.default_tol).

     :return: ReciprocityVerdict with U (V = U V^T U^-1 for every member) and the symmetrizer
              rotating the common plane onto the s1-s3 plane.
     :Parameter example: ``find_reciprocity_unitary([pauli2.sigma(1), pauli2.sigma(3)])``"""
    tol = _tol(tol)
    potentials = list(potentials)
    vectors = poincare_pairs(potentials)
    plane = common_plane(vectors, tol)
    if not plane.exists:
        kind = MAGNITUDE_CANDIDATE if _common_univectorial(potentials, tol) else NONRECIPROCAL
        return ReciprocityVerdict(kind, None, None, plane.residual, plane)
    identity = AxisAngleUnitary.identity()
    self_transpose = lambda: ReciprocityVerdict(SELF_TRANSPOSE, identity, identity,
                                                max((check_condition(V, identity) for V in potentials), default=0.0), plane)
    if plane.rank == 0: return self_transpose()
    if plane.rank == 1:
        d = plane.line
        if abs(d[1]) <= tol: return self_transpose()
        n = d * np.array([1., 0., 1.])
        n = n / np.linalg.norm(n) if np.linalg.norm(n) > tol else np.array([1., 0., 0.])
        w = d - np.dot(d, n) * n
    else:
        n = np.cross(Y_AXIS, plane.normal)
        if np.linalg.norm(n) <= tol: return self_transpose()
        n = n / np.linalg.norm(n)
        w = np.cross(plane.normal, n)
    n = pauli2.canonical_axis(n)
    w = w / np.linalg.norm(w)
    e = np.cross(n, Y_AXIS)
    theta = np.arctan2(np.dot(np.cross(e, w), n), np.dot(e, w))
    unitary = AxisAngleUnitary(0.0, 2 * theta, n)
    symmetrizer = AxisAngleUnitary(0.0, -theta, n)
    residual = max(check_condition(V, unitary) for V in potentials)
    if residual > _verification_bound(potentials, len(vectors), tol):
        raise InconsistencyError(f"constructed unitary fails its own check (residual {residual:.3g})")
    return ReciprocityVerdict(RECIPROCAL, unitary, symmetrizer, residual, plane)

def symmetrize(potentials, verdict):
    """Bring every potential of a reciprocal family to self-transpose form."""
    if verdict.symmetrizer is None: raise PreconditionError(f"a {verdict.classification} family has no symmetrizer")
    return [pauli2.conjugate(V, verdict.symmetrizer) for V in potentials]

def is_phase_self_transpose(V, tol=None):
    """Find the phase d with V12 = exp(i d) V21.

     :param V: PauliForm.
     :param tol: relative tolerance on |V12| = |V21|.

     :return: the phase in [0, 2pi), 0 for (numerically) diagonal V, or None."""
    tol = _tol(tol)
    v12, v21 = V.v[0] - 1j*V.v[1], V.v[0] + 1j*V.v[1]
    scale = max(abs(v12), abs(v21))
    if scale <= tol * max(abs(V.v0), 1.0): return 0.0
    if abs(abs(v12) - abs(v21)) > tol * scale: return None
    return pauli2.wrap_angle(np.angle(v12 / v21))

def is_univectorial(V, tol=None):
    """Test Re v || Im v and split v = c b with b a canonical real unit vector.

     :return: Univectorial(v0, c, b) or None."""
    tol = _tol(tol)
    r, m = V.v.real, V.v.imag
    nr, nm = np.linalg.norm(r), np.linalg.norm(m)
    scale = max(nr, nm)
    if scale <= drop_tol * (abs(V.v0) + scale): return Univectorial(V.v0, 0j, np.array([0., 0., 1.]))
    if np.linalg.norm(np.cross(r, m)) > tol * scale**2: return None
    b = pauli2.canonical_axis(r / nr if nr >= nm else m / nm)
    return Univectorial(V.v0, complex(np.dot(r, b), np.dot(m, b)), b)

def classify_vectorial(V, tol=None):
    """'scalar', 'univectorial' or 'bivectorial'."""
    form = is_univectorial(V, tol)
    if form is None: return 'bivectorial'
    return 'scalar' if form.c == 0 else 'univectorial'

def apply_antiunitary(K, V):
    """K V K^-1 = U V* U^-1."""
    return pauli2.conjugate(pauli2.transpose_pauli(pauli2.adjoint(V)), K.u)

def reciprocity_decompose(V, K):
    """Split V into its K-reciprocal and maximally K-violating parts.

     :param V: PauliForm.
     :param K: AntiunitaryOp whose square commutes with V.

     :return: (Vplus, Vminus), V = Vplus + Vminus, K V+- K^-1 = +-(V+-)^dagger."""
    U = pauli2.compose(pauli2.unitary_matrix(K.u))
    M = pauli2.compose(V)
    K2 = U @ U.conj()
    if np.linalg.norm(K2 @ M - M @ K2) > 1e-10 * max(1.0, np.linalg.norm(M)):
        raise PreconditionError("K^2 does not commute with V")
    W = U @ M.T @ U.conj().T
    return pauli2.decompose((M + W) / 2), pauli2.decompose((M - W) / 2)

def time_reversal_partner(V):
    return PauliForm(V.v0, -V.v)

def time_reversal_operator():
    """K_T = U_T J with U_T = -i s2."""
    return AntiunitaryOp(AxisAngleUnitary(0.0, np.pi, Y_AXIS))

def commute_criterion(V1, V2, tol=None):
    """Whether V1 and V2 commute, from the real form of v1 x v2 = 0."""
    tol = _tol(tol)
    r1, i1, r2, i2 = V1.v.real, V1.v.imag, V2.v.real, V2.v.imag
    scale = max(1.0, np.linalg.norm(V1.v) * np.linalg.norm(V2.v))
    return bool(np.linalg.norm(np.cross(r1, r2) - np.cross(i1, i2)) <= tol * scale and
                np.linalg.norm(np.cross(r1, i2) + np.cross(i1, r2)) <= tol * scale)

def process_fixed_unitary(p_alpha, p_beta, p_alpha_bar, p_beta_bar, tol=1e-9):
    """Solve p_alpha_bar = U p_alpha*, p_beta_bar = U p_beta* for a unitary U.

     :param p_alpha: polarization of the first process state.
     :param p_beta: polarization of the second state, linearly independent of p_alpha.
     :param p_alpha_bar: required polarization of the barred first state.
     :param p_beta_bar: required polarization of the barred second state.

     :return: AxisAngleUnitary, or None if the unique solution is not unitary."""
    A = np.column_stack([np.conj(p_alpha), np.conj(p_beta)]).astype(complex)
    if abs(np.linalg.det(A)) <= tol * np.linalg.norm(A)**2:
        raise PreconditionError("process polarizations are linearly dependent")
    U = pauli2.decompose(np.column_stack([p_alpha_bar, p_beta_bar]) @ np.linalg.inv(A))
    if not pauli2.is_unitary(U, tol): return None
    return pauli2.axis_angle_of(U, tol)

def phase_transform(V, delta_a, delta_b):
    """Conjugate V by diag(exp(i delta_a), exp(i delta_b)).

    V12 picks up exp(-i(delta_b - delta_a)) and V21 the inverse phase; a phase
    self-transpose V with phase d becomes self-transpose for delta_b - delta_a = d/2."""
    U = np.diag([np.exp(1j * delta_a), np.exp(1j * delta_b)])
    return pauli2.decompose(U @ pauli2.compose(V) @ U.conj().T)

def optical_potential(n_index, k):
    """V = 2 k^2 (s0 - n) from a 2x2 index of refraction."""
    return (pauli2.identity() - n_index) * (2 * k**2)

def refractive_index(f, density, k):
    """n = s0 + (2 pi N / k^2) f from the coherent forward-scattering amplitude per scatterer."""
    return pauli2.identity() + f * (2 * np.pi * density / k**2)
