import json

import pytest

from cli_runner import build_parser, list_presets, main
from scheme import PRESETS, preset_three_photon, scheme_to_config, with_rabi


def _write(tmp_path, doc, name='experiment.json'):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if isinstance(doc, dict) else doc, encoding='utf-8')
    return str(path)


def _error(capsys):
    line = capsys.readouterr().err.strip().splitlines()[-1]
    return json.loads(line)


def test_list_presets_is_sorted():
    lines = list_presets().splitlines()
    names = [line.split(':')[0] for line in lines]
    assert names == sorted(PRESETS)
    assert 'three_photon_rb87' in names and 'two_photon_rb87_bare' in names


def test_presets_command(capsys):
    assert main(['presets']) == 0
    assert 'two_photon_rb87' in capsys.readouterr().out


def test_parser_rejects_unknown_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args(['ramsey'])


def test_effective_command_writes_outputs(tmp_path, capsys):
    path = _write(tmp_path, {'experiment': 'effective', 'scheme': 'three_photon_rb87'})
    out = tmp_path / 'out'
    assert main(['effective', '--config', path, '--out', str(out), '--log-level', 'WARNING']) == 0
    assert (out / 'effective.json').exists() and (out / 'run_manifest.json').exists()
    assert 'effective.json' in capsys.readouterr().out


def test_missing_config_is_a_configuration_error(capsys):
    assert main(['rabi', '--log-level', 'WARNING']) == 2
    assert _error(capsys)['error'] == 'ConfigurationError'


def test_malformed_config(tmp_path, capsys):
    path = _write(tmp_path, '{"experiment": "rabi",')
    assert main(['rabi', '--config', path, '--log-level', 'WARNING']) == 2
    assert 'line 1' in _error(capsys)['message']


def test_command_must_match_document(tmp_path, capsys):
    path = _write(tmp_path, {'experiment': 'rabi', 'scheme': 'three_photon_rb87'})
    assert main(['spectrum', '--config', path, '--log-level', 'WARNING']) == 2
    assert _error(capsys)['message'].startswith('$.experiment')


@pytest.mark.parametrize("flags", [['--nodes', '4'], ['--threads', '0']])
def test_bad_quadrature_flags(tmp_path, capsys, flags):
    path = _write(tmp_path, {'experiment': 'rabi', 'scheme': 'three_photon_rb87'})
    assert main(['rabi', '--config', path, '--log-level', 'WARNING'] + flags) == 2


def test_unresolved_shift_exits_with_validity_code(tmp_path, capsys):
    path = _write(tmp_path, {
        'experiment': 'spectrum', 'scheme': 'three_photon_rb87',
        'grids': {'detuning_min_mhz': 5.0, 'detuning_max_mhz': 30.0, 'detuning_step_mhz': 0.5},
    })
    code = main(['spectrum', '--config', path, '--out', str(tmp_path / 'out'), '--log-level', 'WARNING'])
    assert code == 4
    assert _error(capsys)['error'] == 'ShiftUnresolvedError'


def test_degenerate_dynamics_exits_with_numerical_code(tmp_path, capsys):
    scheme = scheme_to_config(with_rabi(preset_three_photon(), 0, 0.0))
    path = _write(tmp_path, {
        'experiment': 'coverage', 'scheme': scheme,
        'cloud': {'radius_um': 1.0}, 'grids': {'xi_values': [2.0]},
    })
    code = main(['coverage', '--config', path, '--out', str(tmp_path / 'out'), '--log-level', 'WARNING'])
    assert code == 3
    assert _error(capsys)['error'] == 'DegenerateDynamicsError'
