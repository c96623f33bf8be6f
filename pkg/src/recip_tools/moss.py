"""Mossbauer 57Fe foils: hyperfine line model, energy dependent foil potentials
and normal versus reversed transmission spectra."""
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
import yaml
from joblib import Parallel, delayed

from recip_core import pauli2, transport
from recip_core.errors import PreconditionError
from recip_core.pauli2 import AxisAngleUnitary, PauliForm
from recip_core.transport import Layer, Process

default_grid_points = 512
default_wave_number = 73.0
grid_span = 1.5
line_table = Path(__file__).parent / 'data' / 'fe57_lines.yml'

POLARIZATIONS = {
    'x': (1, 0), 'sigma': (1, 0),
    'y': (0, 1), 'pi': (0, 1),
    'plus': (1 / np.sqrt(2), 1j / np.sqrt(2)),
    'minus': (1 / np.sqrt(2), -1j / np.sqrt(2)),
}

SPECTRUM_COLUMNS = ['intensity_normal', 'intensity_reversed', 're_amp_normal', 'im_amp_normal', 're_amp_reversed', 'im_amp_reversed']


@dataclass(frozen=True)
class HyperfineLine:
    E0: float
    Gamma: float
    weight: float
    dm: int

    def __post_init__(self):
        if self.dm not in (-1, 0, 1): raise PreconditionError(f"dm must be -1, 0 or +1, got {self.dm}")
        if not self.Gamma > 0: raise PreconditionError(f"line width must be positive, got {self.Gamma}")
        if not self.weight >= 0: raise PreconditionError(f"line weight must be nonnegative, got {self.weight}")


@dataclass(frozen=True, eq=False)
class Foil:
    """A magnetized absorber foil.

     thickness in nm, theta and phi (direction of the hyperfine field) in radians.
     strength scales every line weight; frame is a 3x3 rotation applied to the
     line b-vectors (identity unless the foil was turned by reversed_scenario)."""
    thickness: float
    theta: float
    phi: float
    lines: tuple
    v0_electronic: complex = 0j
    strength: float = 1.0
    frame: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        if not self.thickness > 0: raise PreconditionError(f"foil thickness must be positive, got {self.thickness}")
        if not 0 <= self.theta <= np.pi + 1e-12: raise PreconditionError(f"theta must lie in [0, pi], got {self.theta}")
        object.__setattr__(self, 'phi', pauli2.wrap_angle(self.phi))
        object.__setattr__(self, 'lines', tuple(self.lines))
        object.__setattr__(self, 'v0_electronic', complex(self.v0_electronic))
        object.__setattr__(self, 'frame', np.array(self.frame, dtype=float).reshape(3, 3))


@dataclass(frozen=True, eq=False)
class Scenario:
    """A forward transmission experiment along z through a stack of foils."""
    foils: tuple
    polarization_in: np.ndarray
    polarization_out: np.ndarray
    wave_number: float = default_wave_number
    grid: np.ndarray = None
    reversal_axis: np.ndarray = field(default_factory=lambda: np.array([1., 0., 0.]))
    unitary: AxisAngleUnitary = field(default_factory=AxisAngleUnitary.identity)

    def __post_init__(self):
        object.__setattr__(self, 'foils', tuple(self.foils))
        if not self.wave_number > 0: raise PreconditionError(f"wave number must be positive, got {self.wave_number}")
        grid = default_grid([l for f in self.foils for l in f.lines]) if self.grid is None else np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or len(grid) == 0 or np.any(np.diff(grid) <= 0):
            raise PreconditionError("energy grid must be nonempty and strictly increasing")
        object.__setattr__(self, 'grid', grid)
        object.__setattr__(self, 'reversal_axis', np.asarray(self.reversal_axis, dtype=float))
        proc = self.process()
        object.__setattr__(self, 'polarization_in', proc.p_in)
        object.__setattr__(self, 'polarization_out', proc.p_out)

    def process(self):
        return Process.forward(self.wave_number, self.polarization_in, self.polarization_out)

    def stack(self, E):
        return [Layer(foil_potential(foil, E), foil.thickness) for foil in self.foils]


def line_b_vector(dm, theta, phi):
    """Poincare direction of one hyperfine transition for a field at polar angles (theta, phi), z along the beam.

     :param dm: change of magnetic quantum number, -1, 0 or +1.
     :param theta: polar angle of the field (radians).
     :param phi: azimuth of the field (radians).

     :return: real 3-vector b."""
    s2 = np.sin(theta)**2
    if dm == 0:
        return np.array([s2 * np.sin(2*phi), 0., -2 * s2 * np.cos(2*phi)])
    if dm in (-1, 1):
        return np.array([-0.5 * s2 * np.sin(2*phi), -2 * dm * np.cos(theta), s2 * np.cos(2*phi)])
    raise PreconditionError(f"dm must be -1, 0 or +1, got {dm}")

def line_scalar_weight(dm, theta):
    """s0 coefficient of one transition: 1 + cos^2 theta for dm = +-1, 2 sin^2 theta for dm = 0."""
    return 2 * np.sin(theta)**2 if dm == 0 else 1 + np.cos(theta)**2

def lorentzian(E, line):
    """weight / ((E - E0)/(Gamma/2) + i); -i weight on resonance."""
    return line.weight / ((E - line.E0) / (line.Gamma / 2) + 1j)

def foil_potential(foil, E):
    """Optical potential of a foil at energy E.

     :param foil: Foil.
     :param E: energy (same units as the line positions).

     :return: PauliForm v0_electronic s0 + sum_l strength c_l(E) (a_l s0 + (frame b_l).s)"""
    v0, v = foil.v0_electronic, np.zeros(3, dtype=complex)
    for line in foil.lines:
        c = foil.strength * lorentzian(E, line)
        v0 += c * line_scalar_weight(line.dm, foil.theta)
        v = v + c * (foil.frame @ line_b_vector(line.dm, foil.theta, foil.phi))
    return PauliForm(v0, v)

def default_lines():
    """The shipped 57Fe sextet.

     :return: tuple of HyperfineLine."""
    with open(line_table) as f:
        table = yaml.safe_load(f)
    return tuple(HyperfineLine(float(l['E0']), float(l['Gamma']), float(l['weight']), int(l['dm'])) for l in table['lines'])

def default_grid(lines=None, points=default_grid_points):
    """points energies spanning 1.5 times the outermost line position on either side."""
    lines = default_lines() if not lines else lines
    span = grid_span * max(max(abs(line.E0) for line in lines), max(line.Gamma for line in lines))
    return np.linspace(-span, span, points)

def foil_with_optical_thickness(thickness_um, theta_deg, phi_deg, tau, k=default_wave_number, lines=None, v0_electronic=0j):
    """Build a foil whose strongest line reaches the optical thickness tau = d |c_peak| / (2k).

     :param thickness_um: foil thickness in micrometres.
     :param theta_deg: polar angle of the field in degrees.
     :param phi_deg: azimuth of the field in degrees.
     :param tau: dimensionless optical thickness.
     :param k: wave number (nm^-1).

     :return: Foil"""
    lines = default_lines() if lines is None else tuple(lines)
    d = thickness_um * 1e3
    peak = max([line.weight for line in lines] + [0.0])
    strength = 2 * k * tau / (d * peak) if peak > 0 else 0.0
    return Foil(d, np.radians(theta_deg), np.radians(phi_deg), lines, v0_electronic, strength)

def _amplitude(scenario, E):
    proc = scenario.process()
    T = transport.chain_transmission(scenario.stack(E), scenario.wave_number) if scenario.foils else pauli2.identity()
    return transport.transmission_amplitude(proc, T)

def reversed_scenario(scenario):
    """The source-detector exchanged experiment realized by turning the sample by pi.

    Foil order is reversed, every foil frame is turned about the reversal axis and
    the polarizations become p_in' = U_R U p_out*, p_out' = U_R U p_in*.

     :param scenario: Scenario.

     :return: Scenario with the same unitary and reversal axis."""
    proc = scenario.process()
    barred, rotation = transport.rotated_reciprocal_process(proc, scenario.unitary, axis=scenario.reversal_axis)
    turn = rotation.matrix()
    foils = [Foil(f.thickness, f.theta, f.phi, f.lines, f.v0_electronic, f.strength, turn @ f.frame) for f in reversed(scenario.foils)]
    return Scenario(foils, barred.p_in, barred.p_out, scenario.wave_number, scenario.grid, scenario.reversal_axis, scenario.unitary)

def spectrum(scenario, threads=1):
    """Normal and reversed transmission over the energy grid.

     :param scenario: Scenario.
     :param threads: number of worker threads; the result does not depend on it.

     :return: pandas dataframe indexed by energy with intensity and amplitude columns."""
    barred = reversed_scenario(scenario)
    evaluate = lambda E: (_amplitude(scenario, E), _amplitude(barred, E))
    pairs = Parallel(n_jobs=threads, prefer="threads")(delayed(evaluate)(E) for E in scenario.grid)
    normal = np.array([p[0] for p in pairs], dtype=complex)
    reverse = np.array([p[1] for p in pairs], dtype=complex)
    df = pd.DataFrame({
        'intensity_normal': np.abs(normal)**2, 'intensity_reversed': np.abs(reverse)**2,
        're_amp_normal': normal.real, 'im_amp_normal': normal.imag,
        're_amp_reversed': reverse.real, 'im_amp_reversed': reverse.imag,
    }, index=pd.Index(scenario.grid, name='energy'))
    return df[SPECTRUM_COLUMNS]

def relative_deviation(spectrum_df):
    """max |I_normal - I_reversed| relative to the largest intensity of either trace."""
    normal, reverse = spectrum_df['intensity_normal'], spectrum_df['intensity_reversed']
    scale = max(normal.max(), reverse.max())
    if scale <= 0: return 0.0
    return float((normal - reverse).abs().max() / scale)

def resonant_contrast(spectrum_df, column='intensity_normal'):
    """Depth of the deepest dip relative to the largest intensity."""
    I = spectrum_df[column]
    return float((I.max() - I.min()) / I.max())

def field_reversal_scenario(orientation, polarization, thickness_um=4.0, tau=1.0, unitary=None):
    """Single foil with the hyperfine field along the beam.

     :param orientation: 'parallel' (field along +z) or 'antiparallel'.
     :param polarization: preset name used for both legs.
     :param unitary: AxisAngleUnitary of the reversal (identity by default).

     :return: Scenario"""
    angles = {'parallel': (0.0, 0.0), 'antiparallel': (180.0, 0.0)}
    if orientation not in angles: raise PreconditionError(f"unknown field orientation {orientation!r}")
    foil = foil_with_optical_thickness(thickness_um, *angles[orientation], tau)
    p = POLARIZATIONS[polarization]
    return Scenario((foil,), p, p, unitary=AxisAngleUnitary.identity() if unitary is None else unitary)

def two_foil_scenario(phi1_deg=90.0, tau=1.0, thickness_um=4.0, polarization='sigma'):
    """Two foils with in-plane fields, (90 deg, phi1) followed by (135 deg, 0 deg).

    For phi1 = 90 deg every b-vector lies in the s2-s3 plane and the reciprocity
    unitary is the pi rotation about s3, which the scenario uses for the reversal.

     :return: Scenario"""
    foils = (foil_with_optical_thickness(thickness_um, 90.0, phi1_deg, tau),
             foil_with_optical_thickness(thickness_um, 135.0, 0.0, tau))
    p = POLARIZATIONS[polarization]
    return Scenario(foils, p, p, unitary=AxisAngleUnitary(0.0, np.pi, (0., 0., 1.)))
