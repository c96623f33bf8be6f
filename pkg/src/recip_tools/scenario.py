"""Scenario files: strict JSON parsing into a canonical frozen record and
construction of the objects the analyses run on.

Angles are in degrees and foil thicknesses in micrometres at this boundary;
complex numbers are written as [re, im] pairs."""
import json
import warnings

import frozendict
import numpy as np

from recip_core.pauli2 import AxisAngleUnitary, PauliForm
from recip_tools import moss
from recip_tools.omegascan import LateralSample, Region

version = 1
modes = ('spectrum', 'analyze', 'omegascan')

TOP_KEYS = {'version', 'mode', 'wave_number', 'polarization_in', 'polarization_out', 'grid',
            'reversal_axis', 'unitary', 'foils', 'potentials', 'sample'}
FOIL_KEYS = {'thickness_um', 'theta_deg', 'phi_deg', 'lines', 'v0_electronic', 'optical_thickness', 'strength'}
LINE_KEYS = {'E0', 'Gamma', 'weight', 'dm'}
GRID_KEYS = {'points', 'min', 'max'}
UNITARY_KEYS = {'delta_deg', 'phi_deg', 'axis'}
POTENTIAL_KEYS = {'v0', 'v'}
SAMPLE_KEYS = {'normal', 'regions'}
REGION_KEYS = {'label', 'centroid', 'v0', 'v'}


class ScenarioError(ValueError):
    """A scenario file that does not follow the schema; path locates the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _no_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen: raise ScenarioError('', f"duplicate key {key!r}")
        seen[key] = value
    return seen

def _mapping(value, path, allowed, required=()):
    if not isinstance(value, dict): raise ScenarioError(path, "expected an object")
    unknown = sorted(set(value) - allowed)
    if unknown: raise ScenarioError(_join(path, unknown[0]), "unknown key")
    for key in required:
        if key not in value: raise ScenarioError(_join(path, key), "missing required key")
    return value

def _join(path, key):
    return f"{path}.{key}" if path else key

def _real(value, path, positive=False, lower=None, upper=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)): raise ScenarioError(path, "expected a number")
    value = float(value)
    if not np.isfinite(value): raise ScenarioError(path, "must be finite")
    if positive and value <= 0: raise ScenarioError(path, "must be positive")
    if lower is not None and value < lower: raise ScenarioError(path, f"must be at least {lower}")
    if upper is not None and value > upper: raise ScenarioError(path, f"must be at most {upper}")
    return value

def _complex(value, path):
    if isinstance(value, list) and len(value) == 2:
        return [_real(value[0], f"{path}[0]"), _real(value[1], f"{path}[1]")]
    return [_real(value, path), 0.0]

def _vector(value, path, length=3, kind=_real):
    if not isinstance(value, list) or len(value) != length: raise ScenarioError(path, f"expected a list of {length} entries")
    return [kind(x, f"{path}[{i}]") for i, x in enumerate(value)]

def _direction(value, path):
    vector = _vector(value, path)
    if np.linalg.norm(vector) == 0: raise ScenarioError(path, "direction has zero length")
    return vector

def _polarization(value, path):
    if isinstance(value, str):
        if value not in moss.POLARIZATIONS: raise ScenarioError(path, f"unknown polarization preset {value!r}")
        return value
    pair = _vector(value, path, 2, _complex)
    if np.hypot(*pair[0]) == 0 and np.hypot(*pair[1]) == 0: raise ScenarioError(path, "polarization has zero norm")
    return pair

def _lines(value, path):
    if value == 'fe57': return value
    if not isinstance(value, list): raise ScenarioError(path, "expected 'fe57' or a list of lines")
    lines = []
    for i, line in enumerate(value):
        where = f"{path}[{i}]"
        _mapping(line, where, LINE_KEYS, sorted(LINE_KEYS))
        dm = line['dm']
        if isinstance(dm, bool) or dm not in (-1, 0, 1): raise ScenarioError(f"{where}.dm", "must be -1, 0 or 1")
        lines.append({'E0': _real(line['E0'], f"{where}.E0"), 'Gamma': _real(line['Gamma'], f"{where}.Gamma", positive=True),
                      'weight': _real(line['weight'], f"{where}.weight", lower=0.0), 'dm': int(dm)})
    return lines

def _foil(value, path):
    _mapping(value, path, FOIL_KEYS, ('thickness_um', 'theta_deg'))
    if 'optical_thickness' in value and 'strength' in value:
        raise ScenarioError(path, "give either optical_thickness or strength, not both")
    foil = {'thickness_um': _real(value['thickness_um'], f"{path}.thickness_um", positive=True),
            'theta_deg': _real(value['theta_deg'], f"{path}.theta_deg", lower=0.0, upper=180.0),
            'phi_deg': _real(value.get('phi_deg', 0.0), f"{path}.phi_deg"),
            'lines': _lines(value.get('lines', 'fe57'), f"{path}.lines"),
            'v0_electronic': _complex(value.get('v0_electronic', [0.0, 0.0]), f"{path}.v0_electronic")}
    if 'optical_thickness' in value:
        foil['optical_thickness'] = _real(value['optical_thickness'], f"{path}.optical_thickness", lower=0.0)
    else:
        foil['strength'] = _real(value.get('strength', 1.0), f"{path}.strength", lower=0.0)
    return foil

def _potential(value, path, keys, required):
    _mapping(value, path, keys, required)
    return {'v0': _complex(value.get('v0', [0.0, 0.0]), f"{path}.v0"),
            'v': _vector(value.get('v', [0.0, 0.0, 0.0]), f"{path}.v", kind=_complex)}

def _list(value, path):
    if not isinstance(value, list): raise ScenarioError(path, "expected a list")
    return value

def _grid(value, path):
    _mapping(value, path, GRID_KEYS)
    points = value.get('points', moss.default_grid_points)
    if isinstance(points, bool) or not isinstance(points, int) or points < 1:
        raise ScenarioError(f"{path}.points", "must be a positive integer")
    grid = {'points': points}
    if ('min' in value) != ('max' in value): raise ScenarioError(path, "give both min and max or neither")
    if 'min' in value:
        grid['min'], grid['max'] = _real(value['min'], f"{path}.min"), _real(value['max'], f"{path}.max")
        if grid['min'] >= grid['max'] and points > 1: raise ScenarioError(path, "min must be below max")
    return grid

def _validate(data):
    _mapping(data, '', TOP_KEYS, ('mode',))
    if data.get('version', version) != version: raise ScenarioError('version', f"unsupported version {data['version']!r}")
    mode = data['mode']
    if mode not in modes: raise ScenarioError('mode', f"must be one of {', '.join(modes)}")
    record = {'version': version, 'mode': mode,
              'wave_number': _real(data.get('wave_number', moss.default_wave_number), 'wave_number', positive=True),
              'polarization_in': _polarization(data.get('polarization_in', 'x'), 'polarization_in'),
              'polarization_out': _polarization(data.get('polarization_out', 'x'), 'polarization_out'),
              'grid': _grid(data.get('grid', {}), 'grid'),
              'reversal_axis': _direction(data.get('reversal_axis', [1.0, 0.0, 0.0]), 'reversal_axis')}
    unitary = _mapping(data.get('unitary', {}), 'unitary', UNITARY_KEYS)
    record['unitary'] = {'delta_deg': _real(unitary.get('delta_deg', 0.0), 'unitary.delta_deg'),
                         'phi_deg': _real(unitary.get('phi_deg', 0.0), 'unitary.phi_deg'),
                         'axis': _direction(unitary.get('axis', [0.0, 0.0, 1.0]), 'unitary.axis')}
    if 'foils' in data:
        record['foils'] = [_foil(f, f"foils[{i}]") for i, f in enumerate(_list(data['foils'], 'foils'))]
    if 'potentials' in data:
        record['potentials'] = [_potential(p, f"potentials[{i}]", POTENTIAL_KEYS, ('v',))
                                for i, p in enumerate(_list(data['potentials'], 'potentials'))]
    if 'sample' in data:
        sample = _mapping(data['sample'], 'sample', SAMPLE_KEYS, ('regions',))
        regions = []
        for i, r in enumerate(_list(sample['regions'], 'sample.regions')):
            where = f"sample.regions[{i}]"
            region = _potential(r, where, REGION_KEYS, ('label', 'centroid'))
            if not isinstance(r['label'], str): raise ScenarioError(f"{where}.label", "expected a string")
            region.update(label=r['label'], centroid=_vector(r['centroid'], f"{where}.centroid"))
            regions.append(region)
        if not regions: raise ScenarioError('sample.regions', "expected at least one region")
        record['sample'] = {'normal': _direction(sample.get('normal', [0.0, 0.0, 1.0]), 'sample.normal'), 'regions': regions}
    if mode == 'spectrum' and 'foils' not in record: raise ScenarioError('foils', "spectrum mode needs a foil list")
    if mode == 'analyze' and ('foils' in record) == ('potentials' in record):
        raise ScenarioError('', "analyze mode needs exactly one of foils or potentials")
    if mode == 'omegascan' and 'sample' not in record: raise ScenarioError('sample', "omegascan mode needs a sample")
    if mode == 'omegascan' and 'reversal_axis' not in data:
        # specular position: the reversal turns the sample about its normal
        record['reversal_axis'] = record['sample']['normal']
    return record

def parse_scenario(text):
    """Parse and validate a scenario file.

     :param text: JSON text.

     :return: the canonical record, a deep-frozen mapping with every default filled in.
     :raises ScenarioError: on malformed JSON (with line and column) or schema violations (with the field path)."""
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"line {e.lineno}, column {e.colno}", e.msg) from None
    return frozendict.deepfreeze(_validate(data))

def _thaw(value):
    if isinstance(value, frozendict.frozendict): return {k: _thaw(v) for k, v in value.items()}
    if isinstance(value, (tuple, list)): return [_thaw(v) for v in value]
    return value

def dump_scenario(record):
    """Canonical JSON text of a record (sorted keys, two-space indentation)."""
    return json.dumps(_thaw(record), sort_keys=True, indent=2) + '\n'

def load_scenario(path):
    with open(path, encoding='utf-8') as f:
        return parse_scenario(f.read())

def _c(pair):
    return complex(pair[0], pair[1])

def _pauli(entry):
    return PauliForm(_c(entry['v0']), [_c(x) for x in entry['v']])

def build_polarization(value):
    if isinstance(value, str): return np.array(moss.POLARIZATIONS[value], dtype=complex)
    p = np.array([_c(x) for x in value])
    if abs(np.linalg.norm(p) - 1) > 1e-9: warnings.warn(f"polarization {p.tolist()} renormalized to unit length")
    return p / np.linalg.norm(p)

def _unit_vector(value):
    return np.asarray(value, dtype=float) / np.linalg.norm(value)

def build_reversal_axis(record):
    return _unit_vector(record['reversal_axis'])

def build_unitary(record):
    u = record['unitary']
    return AxisAngleUnitary(np.radians(u['delta_deg']), np.radians(u['phi_deg']), _unit_vector(u['axis']))

def build_lines(entry):
    if entry == 'fe57': return moss.default_lines()
    return tuple(moss.HyperfineLine(l['E0'], l['Gamma'], l['weight'], l['dm']) for l in entry)

def build_foils(record):
    foils = []
    for entry in record['foils']:
        lines = build_lines(entry['lines'])
        if 'optical_thickness' in entry:
            foils.append(moss.foil_with_optical_thickness(entry['thickness_um'], entry['theta_deg'], entry['phi_deg'],
                                                          entry['optical_thickness'], record['wave_number'], lines, _c(entry['v0_electronic'])))
        else:
            foils.append(moss.Foil(entry['thickness_um'] * 1e3, np.radians(entry['theta_deg']), np.radians(entry['phi_deg']),
                                   lines, _c(entry['v0_electronic']), entry['strength']))
    return foils

def build_grid(record, foils, points=None):
    """Energy grid of a record; points overrides the point count."""
    grid = record['grid']
    points = grid['points'] if points is None else points
    if 'min' in grid: return np.linspace(grid['min'], grid['max'], points)
    return moss.default_grid([l for f in foils for l in f.lines], points)

def build_scenario(record, points=None):
    """The moss.Scenario described by a spectrum record."""
    foils = build_foils(record)
    return moss.Scenario(foils, build_polarization(record['polarization_in']), build_polarization(record['polarization_out']), record['wave_number'],
                         build_grid(record, foils, points), build_reversal_axis(record), build_unitary(record))

def build_potentials(record, points=None):
    """Potentials an analysis runs on: raw entries, or every foil potential at every grid energy."""
    if 'potentials' in record: return [_pauli(p) for p in record['potentials']]
    foils = build_foils(record)
    return [moss.foil_potential(foil, E) for foil in foils for E in build_grid(record, foils, points)]

def build_sample(record):
    sample = record['sample']
    regions = [Region(r['label'], r['centroid'], _pauli(r)) for r in sample['regions']]
    return LateralSample(regions, _unit_vector(sample['normal']))
