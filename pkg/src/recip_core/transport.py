"""Plane-wave processes, forward transmission through layer stacks and Born amplitudes.

Units: k in nm^-1, thicknesses in nm, potentials in k^2 units, so that
d V / (2k) is dimensionless. A layer of width d with constant potential V
transmits T_f = exp(i (k d s0 - (d / 2k) V)); Im V < 0 attenuates."""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from recip_core import pauli2
from recip_core.errors import PreconditionError
from recip_core.pauli2 import AxisAngleUnitary, AxisRotation, PauliForm
from recip_core.recip import AntiunitaryOp

elastic_tol = 1e-9

Z_AXIS = np.array([0., 0., 1.])
X_AXIS = np.array([1., 0., 0.])

def _polarization(p):
    p = np.array(p, dtype=complex).reshape(2)
    norm = np.linalg.norm(p)
    if norm == 0: raise PreconditionError("polarization has zero norm")
    return p / norm

def _check_elastic(k_in, k_out):
    k = max(np.linalg.norm(k_in), np.linalg.norm(k_out))
    if abs(np.linalg.norm(k_in) - np.linalg.norm(k_out)) > elastic_tol * max(k, 1.0):
        raise PreconditionError(f"inelastic process: |k_in| = {np.linalg.norm(k_in)}, |k_out| = {np.linalg.norm(k_out)}")


@dataclass(frozen=True, eq=False)
class Process:
    """An elastic transition between plane waves |k_in, p_in> -> |k_out, p_out>."""
    k_in: np.ndarray
    p_in: np.ndarray
    k_out: np.ndarray
    p_out: np.ndarray

    def __post_init__(self):
        for name in ('k_in', 'k_out'):
            object.__setattr__(self, name, np.array(getattr(self, name), dtype=float).reshape(3))
        for name in ('p_in', 'p_out'):
            object.__setattr__(self, name, _polarization(getattr(self, name)))
        _check_elastic(self.k_in, self.k_out)

    @classmethod
    def forward(cls, k, p_in, p_out, direction=Z_AXIS):
        k_vec = k * np.asarray(direction, dtype=float)
        return cls(k_vec, p_in, k_vec, p_out)

    def is_forward(self, tol=elastic_tol):
        return np.linalg.norm(self.k_out - self.k_in) <= tol * max(np.linalg.norm(self.k_in), 1.0)


class Layer(NamedTuple):
    potential: PauliForm
    thickness: float


def reciprocal_process(proc, K):
    """The barred process beta_bar -> alpha_bar of proc under K = U J.

     :param proc: Process alpha -> beta.
     :param K: AntiunitaryOp.

     :return: Process with k_in = -k_out, p_in = U p_out*, k_out = -k_in, p_out = U p_in*."""
    U = pauli2.compose(pauli2.unitary_matrix(K.u))
    return Process(-proc.k_out, U @ proc.p_out.conj(), -proc.k_in, U @ proc.p_in.conj())

def reversal_rotation(k_in, k_out, tol=elastic_tol):
    """The rotation by pi that carries -k_in into k_out.

    The axis is the momentum-transfer direction; in forward scattering any axis
    orthogonal to k works and k_in x z (x if k_in || z) is taken.

     :return: AxisRotation (n_R, pi) with a canonical axis."""
    k_in, k_out = np.asarray(k_in, dtype=float), np.asarray(k_out, dtype=float)
    _check_elastic(k_in, k_out)
    k = max(np.linalg.norm(k_in), 1.0)
    q = k_out - k_in
    if np.linalg.norm(q) > tol * k:
        n = q / np.linalg.norm(q)
    else:
        n = np.cross(k_in, Z_AXIS)
        n = n / np.linalg.norm(n) if np.linalg.norm(n) > tol * k else X_AXIS.copy()
    return AxisRotation(pauli2.canonical_axis(n), np.pi)

def _declared_rotation(proc, axis, tol=elastic_tol):
    axis = np.asarray(axis, dtype=float)
    axis = pauli2.canonical_axis(axis / np.linalg.norm(axis))
    q = proc.k_out - proc.k_in
    k = max(np.linalg.norm(proc.k_in), 1.0)
    if proc.is_forward(tol):
        if abs(np.dot(axis, proc.k_in)) > tol * k:
            raise PreconditionError("forward reversal axis must be orthogonal to k")
    elif np.linalg.norm(np.cross(axis, q)) > tol * np.linalg.norm(q):
        raise PreconditionError("reversal axis must be along the momentum transfer")
    return AxisRotation(axis, np.pi)

def rotated_reciprocal_process(proc, U, axis=None):
    """Reciprocity combined with a rotation by pi, so that source and detector stay in place.

    The sample is rotated instead (V -> R V R^-1, R the returned rotation); the
    polarizations become p_in' = U_R U p_out*, p_out' = U_R U p_in* with
    U_R = (0, pi, n_R).

     :param proc: Process.
     :param U: AxisAngleUnitary of the reciprocity operator K = U J.
     :param axis: optional declared rotation axis (forward case: any direction orthogonal to k).

     :return: (Process, AxisRotation)"""
    rotation = reversal_rotation(proc.k_in, proc.k_out) if axis is None else _declared_rotation(proc, axis)
    U_R = pauli2.unitary_matrix(AxisAngleUnitary(0.0, np.pi, rotation.n))
    M = pauli2.compose(pauli2.mul(U_R, pauli2.unitary_matrix(U)))
    return Process(proc.k_in, M @ proc.p_out.conj(), proc.k_out, M @ proc.p_in.conj()), rotation

def forward_transmission(V, d, k):
    """Transmission matrix of a homogeneous layer crossed perpendicularly.

     :param V: PauliForm potential of the layer.
     :param d: thickness (nm), > 0.
     :param k: vacuum wave number (nm^-1), > 0.

     :return: PauliForm exp(i (k d s0 - (d/2k) V))."""
    if d <= 0: raise PreconditionError(f"layer thickness must be positive, got {d}")
    if k <= 0: raise PreconditionError(f"wave number must be positive, got {k}")
    g = -1j * d / (2 * k)
    return pauli2.exp2(PauliForm(1j * k * d + g * V.v0, g * V.v))

def chain_transmission(stack, k):
    """T = T_n ... T_1 for a stack whose first layer is crossed first."""
    stack = list(stack)
    if not stack: raise PreconditionError("empty layer stack")
    T = pauli2.identity()
    for layer in stack:
        T = pauli2.mul(forward_transmission(layer.potential, layer.thickness, k), T)
    return T

def reversed_stack(stack, rotation):
    """The stack as seen after the sample is rotated by pi about rotation.n: order reversed, potentials conjugated by U_R."""
    U_R = AxisAngleUnitary(0.0, np.pi, rotation.n)
    return [Layer(pauli2.conjugate(layer.potential, U_R), layer.thickness) for layer in reversed(list(stack))]

def transmission_amplitude(proc, T):
    """(p_out, T p_in)."""
    return complex(np.vdot(proc.p_out, pauli2.compose(T) @ proc.p_in))

def born_amplitude(regions, proc):
    """First Born amplitude (p_out, [sum_l vol_l V_l] p_in) in forward geometry.

     :param regions: iterable of (PauliForm, volume) pairs.
     :param proc: forward Process.

     :return: complex amplitude."""
    if not proc.is_forward(): raise PreconditionError("born_amplitude needs forward geometry; use born_amplitude_slabs")
    total = PauliForm(0, np.zeros(3))
    for V, volume in regions:
        total = total + V * volume
    return transmission_amplitude(proc, total)

def _slab_integral(q, z, d):
    if abs(q * d) < 1e-8:
        return d * np.exp(1j * q * z) * (1 + 0.5j * q * d - (q * d)**2 / 6)
    return np.exp(1j * q * z) * (np.exp(1j * q * d) - 1) / (1j * q)

def born_amplitude_slabs(stack, proc, area=1.0):
    """First Born amplitude for slabs stacked along z (first slab starting at z = 0).

    Lateral translation invariance leaves only momentum transfer along z.

     :param stack: iterable of Layer.
     :param proc: Process with k_in - k_out parallel to z.
     :param area: lateral area of the slabs.

     :return: complex amplitude; equals born_amplitude with volumes area*d when forward."""
    q = proc.k_in - proc.k_out
    if np.hypot(q[0], q[1]) > elastic_tol * max(np.linalg.norm(proc.k_in), 1.0):
        raise PreconditionError("lateral momentum transfer is not supported for slabs")
    amplitude, z = 0j, 0.0
    for layer in stack:
        amplitude += area * _slab_integral(q[2], z, layer.thickness) * transmission_amplitude(proc, layer.potential)
        z += layer.thickness
    return amplitude

def born_violation(regions_minus, proc):
    """Born estimate 2 (p_out, [sum_l vol_l V-_l] p_in) of <beta|T|alpha> - <alpha_bar|T|beta_bar>."""
    return 2 * born_amplitude(regions_minus, proc)
