import json

import numpy as np
import pytest

from recip_core import recip
from recip_tools import cli, moss, scenario
from recip_tools.scenario import ScenarioError

SHIPPED = sorted(cli.scenario_dir.glob('*.json'))


def minimal(**extra):
    data = {'mode': 'spectrum', 'foils': [{'thickness_um': 4, 'theta_deg': 0}]}
    data.update(extra)
    return json.dumps(data)

def error_path(text):
    with pytest.raises(ScenarioError) as info:
        scenario.parse_scenario(text)
    return info.value.path


def test_defaults_are_filled_in():
    record = scenario.parse_scenario(minimal())
    assert record['version'] == 1
    assert record['wave_number'] == moss.default_wave_number
    assert record['polarization_in'] == 'x' and record['polarization_out'] == 'x'
    assert record['grid'] == {'points': 512}
    assert record['reversal_axis'] == (1.0, 0.0, 0.0)
    assert record['unitary'] == {'delta_deg': 0.0, 'phi_deg': 0.0, 'axis': (0.0, 0.0, 1.0)}
    foil = record['foils'][0]
    assert foil['phi_deg'] == 0.0 and foil['lines'] == 'fe57' and foil['strength'] == 1.0
    assert foil['v0_electronic'] == (0.0, 0.0)

def test_record_is_frozen():
    record = scenario.parse_scenario(minimal())
    with pytest.raises(TypeError):
        record['mode'] = 'analyze'

@pytest.mark.parametrize("text, path", [
    (json.dumps({'mode': 'spectrum', 'foils': [{'thickness_um': 4, 'theta_deg': 0, 'x': 1}]}), 'foils[0].x'),
    (json.dumps({'mode': 'spectrum', 'foils': [{'theta_deg': 0}]}), 'foils[0].thickness_um'),
    (json.dumps({'mode': 'spectrum', 'foils': [{'thickness_um': -1, 'theta_deg': 0}]}), 'foils[0].thickness_um'),
    (json.dumps({'mode': 'spectrum', 'foils': [{'thickness_um': 1, 'theta_deg': 200}]}), 'foils[0].theta_deg'),
    (minimal(polarization_in='diagonal'), 'polarization_in'),
    (minimal(polarization_out=[[0, 0], [0, 0]]), 'polarization_out'),
    (minimal(grid={'points': 0}), 'grid.points'),
    (minimal(reversal_axis=[0, 0, 0]), 'reversal_axis'),
    (minimal(unitary={'axis': [1, 0]}), 'unitary.axis'),
    (minimal(version=2), 'version'),
    (minimal(mode='draw'), 'mode'),
    (minimal(colour='red'), 'colour'),
    (json.dumps({'mode': 'omegascan', 'sample': {'regions': []}}), 'sample.regions'),
    (json.dumps({'mode': 'spectrum', 'foils': [{'thickness_um': 4, 'theta_deg': 0, 'lines': [{'E0': 0, 'Gamma': 1, 'weight': 1, 'dm': 2}]}]}),
     'foils[0].lines[0].dm'),
])
def test_schema_violations_name_the_field(text, path):
    assert error_path(text) == path

def test_duplicate_keys_are_rejected():
    with pytest.raises(ScenarioError, match='duplicate key'):
        scenario.parse_scenario('{"mode": "spectrum", "mode": "analyze", "foils": []}')

def test_malformed_json_reports_position():
    path = error_path('{\n  "mode": "spectrum",\n  "foils": [\n}')
    assert path.startswith('line 4, column 1')

def test_strength_and_optical_thickness_exclude_each_other():
    text = json.dumps({'mode': 'spectrum', 'foils': [{'thickness_um': 4, 'theta_deg': 0, 'strength': 1, 'optical_thickness': 1}]})
    assert error_path(text) == 'foils[0]'

def test_mode_requirements():
    assert error_path(json.dumps({'mode': 'spectrum'})) == 'foils'
    assert error_path(json.dumps({'mode': 'omegascan'})) == 'sample'
    both = {'mode': 'analyze', 'foils': [], 'potentials': []}
    with pytest.raises(ScenarioError, match='exactly one'):
        scenario.parse_scenario(json.dumps(both))
    with pytest.raises(ScenarioError, match='exactly one'):
        scenario.parse_scenario(json.dumps({'mode': 'analyze'}))

def test_grid_needs_both_bounds():
    assert error_path(minimal(grid={'min': -1})) == 'grid'
    assert error_path(minimal(grid={'points': 4, 'min': 1, 'max': -1})) == 'grid'

@pytest.mark.parametrize("path", SHIPPED, ids=lambda p: p.stem)
def test_shipped_scenarios_round_trip(path):
    record = scenario.load_scenario(path)
    assert scenario.parse_scenario(scenario.dump_scenario(record)) == record

def test_dump_is_canonical():
    text = scenario.dump_scenario(scenario.parse_scenario(minimal()))
    assert text.endswith('}\n')
    assert text.index('"foils"') < text.index('"grid"') < text.index('"mode"')
    assert text.startswith('{\n  "')

def test_build_scenario_from_shipped_file():
    record = scenario.load_scenario(cli.scenario_dir / 'two_foil_coplanar.json')
    s = scenario.build_scenario(record, points=64)
    assert len(s.grid) == 64 and len(s.foils) == 2
    np.testing.assert_allclose(s.unitary.n, [0, 0, 1])
    assert s.unitary.phi == pytest.approx(np.pi)
    expected = moss.two_foil_scenario()
    for built, canned in zip(s.foils, expected.foils):
        assert built.strength == pytest.approx(canned.strength)
        assert built.theta == pytest.approx(canned.theta)
        assert built.phi == pytest.approx(canned.phi)

def test_build_scenario_uses_explicit_grid():
    record = scenario.load_scenario(cli.scenario_dir / 'empty.json')
    s = scenario.build_scenario(record)
    np.testing.assert_allclose(s.grid, np.linspace(-8, 8, 16))
    assert s.foils == ()

def test_custom_lines_and_strength():
    text = json.dumps({'mode': 'spectrum', 'wave_number': 10, 'foils': [
        {'thickness_um': 0.5, 'theta_deg': 90, 'phi_deg': 30, 'strength': 2.5, 'v0_electronic': [0.1, -0.2],
         'lines': [{'E0': 1, 'Gamma': 0.5, 'weight': 2, 'dm': 0}]}]})
    foil = scenario.build_foils(scenario.parse_scenario(text))[0]
    assert foil.thickness == pytest.approx(500.0)
    assert foil.strength == 2.5
    assert foil.v0_electronic == 0.1 - 0.2j
    assert foil.lines == (moss.HyperfineLine(1.0, 0.5, 2.0, 0),)

def test_polarization_renormalization_warns():
    with pytest.warns(UserWarning):
        p = scenario.build_polarization(((3.0, 0.0), (0.0, 4.0)))
    np.testing.assert_allclose(p, [0.6, 0.8j])
    np.testing.assert_allclose(scenario.build_polarization('minus'), np.array([1, -1j]) / np.sqrt(2))

def test_build_potentials():
    record = scenario.load_scenario(cli.scenario_dir / 'noncommuting_pair.json')
    potentials = scenario.build_potentials(record)
    assert len(potentials) == 2
    assert potentials[1].v[2] == 1 + 0.5j
    assert recip.find_reciprocity_unitary(potentials).classification == recip.SELF_TRANSPOSE
    foils = scenario.load_scenario(cli.scenario_dir / 'parallel_plus.json')
    assert len(scenario.build_potentials(foils, points=8)) == 8

def test_build_sample():
    sample = scenario.build_sample(scenario.load_scenario(cli.scenario_dir / 'twodomain_equal.json'))
    assert [r.label for r in sample.regions] == ['left', 'right']
    np.testing.assert_allclose(sample.normal, [0, 0, 1])
    assert sample.regions[1].potential.v[1] == 0.3 - 0.1j

def test_omegascan_reversal_axis_defaults_to_sample_normal():
    sample = {'normal': [1, 1, 0], 'regions': [{'label': 'a', 'centroid': [0, 0, 0], 'v': [[1, 0], [0, 0], [0, 0]]}]}
    record = scenario.parse_scenario(json.dumps({'mode': 'omegascan', 'sample': sample}))
    assert record['reversal_axis'] == record['sample']['normal'] == (1.0, 1.0, 0.0)
    np.testing.assert_allclose(scenario.build_reversal_axis(record), np.array([1, 1, 0]) / np.sqrt(2))
    declared = scenario.parse_scenario(json.dumps({'mode': 'omegascan', 'sample': sample, 'reversal_axis': [0, 1, 0]}))
    assert declared['reversal_axis'] == (0.0, 1.0, 0.0)
    assert scenario.parse_scenario(scenario.dump_scenario(record)) == record
