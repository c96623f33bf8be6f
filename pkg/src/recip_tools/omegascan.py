"""Rotation-combined reciprocity for laterally structured samples.

An omega scan is symmetric about the specular position when turning the sample
by pi about its normal m, followed by reciprocity with K = U J, maps the sample
onto itself. Region by region, with r' the partner of r under the turn:

    v0(r') = v0(r)
    O_{m,pi} v(r') = O_U P13 v(r)      (real and imaginary parts)
"""
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from recip_core import pauli2
from recip_core.errors import GeometryError
from recip_core.pauli2 import AxisAngleUnitary, PauliForm

default_tol = 1e-8


class Region(NamedTuple):
    label: str
    centroid: np.ndarray
    potential: PauliForm


@dataclass(frozen=True, eq=False)
class LateralSample:
    regions: tuple
    normal: np.ndarray = (0., 0., 1.)

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=float)
        object.__setattr__(self, 'normal', normal / np.linalg.norm(normal))
        regions = tuple(Region(r[0], np.asarray(r[1], dtype=float).reshape(3), r[2]) for r in self.regions)
        if not regions: raise GeometryError("a lateral sample needs at least one region")
        object.__setattr__(self, 'regions', regions)

    def turn(self):
        """Matrix of the pi rotation about the sample normal."""
        return pauli2.rotation_matrix(self.normal, np.pi)

    def scale(self):
        sizes = [abs(r.potential.v0) for r in self.regions] + [np.linalg.norm(r.potential.v) for r in self.regions]
        return max(sizes + [1.0])


class SymmetryReport(NamedTuple):
    passed: bool
    residual: float
    scalar_residual: float
    vector_residual: float


class NormMismatch(NamedTuple):
    """Length certificate: paired regions whose Poincare vectors differ in length."""
    region: str
    partner: str
    part: str
    norms: tuple


def pair_regions(sample, tol=default_tol):
    """Partner of every region under the pi rotation about the normal.

     :param sample: LateralSample.
     :param tol: relative centroid tolerance.

     :return: tuple of partner indices."""
    turn = sample.turn()
    centroids = np.array([r.centroid for r in sample.regions]).reshape(-1, 3)
    size = max([np.linalg.norm(c) for c in centroids] + [1.0])
    partners = []
    for region in sample.regions:
        gaps = np.linalg.norm(centroids - turn @ region.centroid, axis=1)
        j = int(np.argmin(gaps))
        if gaps[j] > tol * size:
            raise GeometryError(f"region {region.label!r} has no partner under the pi rotation about {sample.normal.tolist()}")
        partners.append(j)
    return tuple(partners)

def _residuals(sample, rotation, partners):
    turn = sample.turn()
    scalar, vector = 0.0, 0.0
    for r, j in zip(sample.regions, partners):
        mate = sample.regions[j].potential
        scalar = max(scalar, abs(mate.v0 - r.potential.v0))
        for part in (np.real, np.imag):
            gap = turn @ part(mate.v) - rotation @ pauli2.reflect13(part(r.potential.v))
            vector = max(vector, float(np.linalg.norm(gap)))
    return scalar, vector

def check_symmetry(sample, U, tol=default_tol):
    """Evaluate the omega-scan conditions for a given reciprocity unitary.

     :param sample: LateralSample.
     :param U: AxisAngleUnitary.
     :param tol: relative tolerance.

     :return: SymmetryReport with the largest scalar and vector residuals."""
    partners = pair_regions(sample, tol)
    scalar, vector = _residuals(sample, pauli2.rotation_of(U).matrix(), partners)
    residual = max(scalar, vector)
    return SymmetryReport(residual <= tol * sample.scale(), residual, scalar, vector)

def norm_mismatch(sample, tol=default_tol):
    """Find paired regions with unequal |Re v| or |Im v|; no rotation can map one onto the other.

     :return: NormMismatch or None."""
    partners = pair_regions(sample, tol)
    bound = tol * sample.scale()
    for r, j in zip(sample.regions, partners):
        mate = sample.regions[j]
        for name, part in (('real', np.real), ('imag', np.imag)):
            norms = (float(np.linalg.norm(part(r.potential.v))), float(np.linalg.norm(part(mate.potential.v))))
            if abs(norms[0] - norms[1]) > bound:
                return NormMismatch(r.label, mate.label, name, norms)
    return None

def _fit_rotation(sources, targets):
    # proper orthogonal R minimizing sum |R a - b|^2
    H = np.asarray(sources).T @ np.asarray(targets)
    left, s, right_t = np.linalg.svd(H)
    rank = int(np.sum(s > 1e-12 * s[0])) if s[0] > 0 else 0
    if rank == 0: return np.eye(3)
    if rank == 1:
        warnings.warn("rotation is not fixed by the sample; completing it arbitrarily")
    flip = np.sign(np.linalg.det(right_t.T @ left.T)) or 1.0
    return right_t.T @ np.diag([1., 1., flip]) @ left.T

def find_symmetry_unitary(sample, tol=default_tol):
    """Search for a unitary U satisfying the omega-scan conditions.

     :param sample: LateralSample.
     :param tol: relative tolerance.

     :return: AxisAngleUnitary (delta = 0, canonical axis) or None."""
    partners = pair_regions(sample, tol)
    turn = sample.turn()
    bound = tol * sample.scale()
    if any(abs(sample.regions[j].potential.v0 - r.potential.v0) > bound for r, j in zip(sample.regions, partners)):
        return None
    if norm_mismatch(sample, tol) is not None: return None
    sources, targets = [], []
    for r, j in zip(sample.regions, partners):
        mate = sample.regions[j].potential
        for part in (np.real, np.imag):
            sources.append(pauli2.reflect13(part(r.potential.v)))
            targets.append(turn @ part(mate.v))
    R = _fit_rotation(sources, targets)
    U = pauli2.axis_angle_from_rotation(R, tol=1e-6)
    if not check_symmetry(sample, U, tol).passed: return None
    return U

def omega_scan_polarizations(U, n_R, p_alpha, p_beta):
    """Polarizations whose omega-scan intensities must agree: p1 = U_R U p_beta*, p2 = U_R U p_alpha*.

     :param U: AxisAngleUnitary of the reciprocity operator.
     :param n_R: axis of the reversal rotation.
     :param p_alpha: incoming polarization.
     :param p_beta: outgoing polarization.

     :return: (p1, p2)"""
    U_R = pauli2.unitary_matrix(AxisAngleUnitary(0.0, np.pi, n_R))
    M = pauli2.compose(pauli2.mul(U_R, pauli2.unitary_matrix(U)))
    return M @ np.conj(np.asarray(p_beta, dtype=complex)), M @ np.conj(np.asarray(p_alpha, dtype=complex))
