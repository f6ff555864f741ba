import json

import pytest

from config import load_config, load_experiment, parse_config, si_grids
from errors import ConfigurationError
from scheme import MHZ, UM, US, preset_two_photon


def _doc(**overrides):
    doc = {'experiment': 'rabi', 'scheme': 'three_photon_rb87'}
    doc.update(overrides)
    return json.dumps(doc)


def test_load_config_reads_environment(monkeypatch):
    monkeypatch.setenv('LADDER_SIM_NODES', '48')
    monkeypatch.setenv('LADDER_SIM_THREADS', '3')
    settings = load_config()
    assert settings['LADDER_SIM_NODES'] == 48
    assert settings['LADDER_SIM_THREADS'] == 3
    assert 'LADDER_SIM_OUTPUT_DIR' in settings


def test_preset_name_expands_to_scheme():
    config = parse_config(_doc())
    assert config.scheme.n_levels == 4
    assert config.grids['t_end_us'] == 1.0 and config.grids['n_points'] == 1001
    assert config.cloud is None


def test_grids_convert_to_si():
    config = parse_config(_doc(experiment='spectrum', scheme='two_photon_rb87',
                               grids={'swept_transition': 1, 'detuning_step_mhz': 0.5}))
    grids = si_grids(config)
    assert grids['detuning_min'] == pytest.approx(-30 * MHZ)
    assert grids['detuning_step'] == pytest.approx(0.5 * MHZ)
    assert grids['t_int'] == pytest.approx(0.125 * US)
    assert grids['swept_transition'] == 1
    assert grids['r'] == 0.0


def test_effective_positions_convert_to_metres():
    config = parse_config(_doc(experiment='effective', waist_um=2.0, grids={'r_um_values': [0, 1.5]}))
    assert si_grids(config)['r_values'] == pytest.approx([0.0, 1.5 * UM])


def test_waist_focuses_scheme():
    config = parse_config(_doc(waist_um=2.0))
    assert [t.waist / UM for t in config.scheme.transitions] == pytest.approx([2.0, 2 ** 0.5, 2.0])


def test_inline_scheme_in_config_units():
    config = parse_config(json.dumps({
        'experiment': 'rabi',
        'scheme': {
            'levels': [{'label': 'g'}, {'label': 'e', 'lifetime_us': 0.0262}],
            'transitions': [{'rabi_mhz': 10.0, 'detuning_mhz': -2.0}],
        },
    }))
    assert config.scheme.transitions[0].peak_rabi == pytest.approx(10 * MHZ)
    assert config.scheme.transitions[0].detuning == pytest.approx(-2 * MHZ)
    assert config.scheme.levels[1].lifetime == pytest.approx(0.0262 * US)


def test_missing_experiment():
    with pytest.raises(ConfigurationError, match=r"\$\.experiment: missing"):
        parse_config(json.dumps({'scheme': 'three_photon_rb87'}))


def test_unknown_experiment():
    with pytest.raises(ConfigurationError, match='expected one of'):
        parse_config(_doc(experiment='ramsey'))


def test_unknown_field_names_its_path():
    with pytest.raises(ConfigurationError, match=r"\$\.grids\.t_stop_us"):
        parse_config(_doc(grids={'t_stop_us': 1.0}))


def test_malformed_json_reports_position():
    with pytest.raises(ConfigurationError, match='line 2, column'):
        parse_config('{"experiment": "rabi",\n "scheme" "three_photon_rb87"}')


@pytest.mark.parametrize("overrides, fragment", [
    ({'waist_um': 0}, r'\$\.waist_um'),
    ({'waist_um': -1.0}, r'\$\.waist_um'),
    ({'grids': {'n_points': 0}}, r'n_points'),
    ({'grids': {'n_points': 10.5}}, r'expected an integer'),
    ({'grids': {'average': 'yes'}}, r'true or false'),
    ({'grids': {'average': True}}, r'\$\.cloud'),
    ({'experiment': 'coverage', 'grids': {'xi_values': [1.0]}}, r'\$\.cloud'),
    ({'experiment': 'coverage', 'cloud': {'radius_um': 1.0}}, r'xi_values'),
    ({'experiment': 'effective', 'grids': {'r_um_values': [-1.0]}}, r'non-negative'),
    ({'cloud': {'radius_um': 0.0}}, r'\$\.cloud'),
])
def test_invalid_documents(overrides, fragment):
    with pytest.raises(ConfigurationError, match=fragment):
        parse_config(_doc(**overrides))


def test_negative_lifetime_is_rejected():
    doc = {
        'experiment': 'rabi',
        'scheme': {
            'levels': [{'label': 'g'}, {'label': 'e', 'lifetime_us': -1.0}],
            'transitions': [{'rabi_mhz': 10.0}],
        },
    }
    with pytest.raises(ConfigurationError, match=r"levels\[1\]\.lifetime_us"):
        parse_config(json.dumps(doc))


def test_spectrum_range_must_be_ordered():
    with pytest.raises(ConfigurationError, match='detuning_max_mhz'):
        parse_config(_doc(experiment='spectrum', grids={'detuning_min_mhz': 5.0, 'detuning_max_mhz': -5.0}))


def test_resolved_document_round_trips():
    config = parse_config(_doc(experiment='coverage', scheme='two_photon_rb87', cloud={'radius_um': 1.0},
                               grids={'xi_values': [1, 2, 5]}, output_path='out'))
    doc = config.to_dict()
    again = parse_config(json.dumps(doc))
    assert again.to_dict() == doc
    assert again.scheme == preset_two_photon()
    assert again.output_path == 'out'


def test_load_experiment(tmp_path):
    path = tmp_path / 'exp.json'
    path.write_text(_doc(experiment='effective'), encoding='utf-8')
    assert load_experiment(str(path)).experiment == 'effective'
    with pytest.raises(ConfigurationError, match='Cannot read'):
        load_experiment(str(tmp_path / 'missing.json'))
