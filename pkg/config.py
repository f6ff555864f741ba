import json
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from errors import ConfigurationError
from scheme import (MHZ, UM, US, AtomCloud, LadderScheme, check_keys, config_number, config_value,
                    focus, scheme_from_config, scheme_to_config)

EXPERIMENTS = ('spectrum', 'rabi', 'coverage', 'crosstalk', 'effective')

_DOCUMENT_KEYS = {'experiment', 'scheme', 'waist_um', 'cloud', 'grids', 'output_path'}
_CLOUD_KEYS = {'radius_um', 'center_offset_um'}

# grid key -> default (None means required or taken from settings)
_GRID_DEFAULTS: Dict[str, Dict[str, Any]] = {
    'rabi': {'t_end_us': 1.0, 'n_points': 1001, 'r_um': 0.0, 'average': False, 'n_nodes': None},
    'spectrum': {
        'swept_transition': None,
        'detuning_min_mhz': -30.0,
        'detuning_max_mhz': 30.0,
        'detuning_step_mhz': 0.2,
        't_int_us': 0.125,
        'r_um': 0.0,
    },
    'coverage': {'xi_values': None, 'n_nodes': None},
    'crosstalk': {'t_end_us': None, 'n_nodes': None, 'n_azimuth': None},
    'effective': {'r_um_values': [0.0]},
}
_INTEGER_KEYS = {'n_points', 'n_nodes', 'n_azimuth', 'swept_transition'}
_REQUIRED_GRIDS = {'coverage': ('xi_values',)}
_NEEDS_CLOUD = {'coverage', 'crosstalk'}


def load_config():
    load_dotenv()
    return {
        'LADDER_SIM_OUTPUT_DIR': os.getenv('LADDER_SIM_OUTPUT_DIR', './ladder_out'),
        'LADDER_SIM_NODES': int(os.getenv('LADDER_SIM_NODES', '2048')),
        'LADDER_SIM_NEIGHBOR_NODES': int(os.getenv('LADDER_SIM_NEIGHBOR_NODES', '32')),
        'LADDER_SIM_AZIMUTH': int(os.getenv('LADDER_SIM_AZIMUTH', '16')),
        'LADDER_SIM_THREADS': int(os.getenv('LADDER_SIM_THREADS', '1')),
        'LADDER_SIM_LOG_LEVEL': os.getenv('LADDER_SIM_LOG_LEVEL', 'INFO'),
    }


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    scheme: LadderScheme
    cloud: Optional[AtomCloud]
    grids: Dict[str, Any]
    output_path: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Resolved document in config units; parse_config(json.dumps(...)) rebuilds this config."""
        doc: Dict[str, Any] = {
            'experiment': self.experiment,
            'scheme': scheme_to_config(self.scheme),
            'grids': {k: v for k, v in sorted(self.grids.items()) if v is not None},
        }
        if self.cloud is not None:
            doc['cloud'] = {
                'radius_um': config_value(self.cloud.radius, UM),
                'center_offset_um': config_value(self.cloud.center_offset, UM),
            }
        if self.output_path is not None:
            doc['output_path'] = self.output_path
        return doc


def _grid_value(key: str, value: Any, path: str) -> Any:
    if key == 'average':
        if not isinstance(value, bool):
            raise ConfigurationError(f"{path}: expected true or false")
        return value
    if key.endswith('_values'):
        if not isinstance(value, list) or not value:
            raise ConfigurationError(f"{path}: expected a non-empty array")
        return [config_number(v, f'{path}[{i}]') for i, v in enumerate(value)]
    number = config_number(value, path)
    if key in _INTEGER_KEYS:
        if number != int(number):
            raise ConfigurationError(f"{path}: expected an integer")
        return int(number)
    return number


def _parse_grids(experiment: str, doc: Any) -> Dict[str, Any]:
    defaults = _GRID_DEFAULTS[experiment]
    doc = {} if doc is None else doc
    check_keys(doc, set(defaults), '$.grids', required=_REQUIRED_GRIDS.get(experiment, ()))
    grids = {}
    for key, default in defaults.items():
        value = doc.get(key, default)
        grids[key] = None if value is None else _grid_value(key, value, f'$.grids.{key}')
    for key in ('n_points', 'n_nodes', 'n_azimuth', 't_end_us', 't_int_us', 'detuning_step_mhz'):
        if grids.get(key) is not None and grids[key] <= 0:
            raise ConfigurationError(f"$.grids.{key}: must be positive")
    if experiment == 'spectrum' and grids['detuning_max_mhz'] <= grids['detuning_min_mhz']:
        raise ConfigurationError("$.grids.detuning_max_mhz: must exceed detuning_min_mhz")
    for key in ('xi_values', 'r_um_values'):
        values = grids.get(key)
        if values is not None and any(v < 0 for v in values):
            raise ConfigurationError(f"$.grids.{key}: values must be non-negative")
    return grids


def _parse_cloud(doc: Any) -> AtomCloud:
    check_keys(doc, _CLOUD_KEYS, '$.cloud', required=('radius_um',))
    radius = config_number(doc['radius_um'], '$.cloud.radius_um') * UM
    offset = config_number(doc.get('center_offset_um', 0.0), '$.cloud.center_offset_um') * UM
    try:
        return AtomCloud(radius, offset)
    except ConfigurationError as exc:
        raise ConfigurationError(f"$.cloud: {exc}") from None


def parse_config(document: str) -> ExperimentConfig:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"Malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    check_keys(doc, _DOCUMENT_KEYS, '$', required=('experiment', 'scheme'))
    experiment = doc['experiment']
    if experiment not in EXPERIMENTS:
        raise ConfigurationError(f"$.experiment: expected one of {list(EXPERIMENTS)}, got {experiment!r}")
    scheme = scheme_from_config(doc['scheme'])
    waist = None
    if doc.get('waist_um') is not None:
        waist = config_number(doc['waist_um'], '$.waist_um') * UM
        if not waist > 0:
            raise ConfigurationError("$.waist_um: waist must be positive")
        scheme = focus(scheme, waist)
    cloud = _parse_cloud(doc['cloud']) if doc.get('cloud') is not None else None
    if experiment in _NEEDS_CLOUD and cloud is None:
        raise ConfigurationError(f"$.cloud: required by the '{experiment}' experiment")
    output_path = doc.get('output_path')
    if output_path is not None and not isinstance(output_path, str):
        raise ConfigurationError("$.output_path: expected a string")
    grids = _parse_grids(experiment, doc.get('grids'))
    if grids.get('average') and cloud is None:
        raise ConfigurationError("$.cloud: required when grids.average is true")
    return ExperimentConfig(
        experiment=experiment,
        scheme=scheme,
        cloud=cloud,
        grids=grids,
        output_path=output_path,
    )


def load_experiment(path: str) -> ExperimentConfig:
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            return parse_config(handle.read())
    except OSError as exc:
        raise ConfigurationError(f"Cannot read config '{path}': {exc.strerror}") from None


def _si_name(key: str) -> str:
    for suffix in ('_us', '_mhz', '_um'):
        if key.endswith(suffix):
            return key[:-len(suffix)]
    return 'r_values' if key == 'r_um_values' else key


def si_grids(config: ExperimentConfig) -> Dict[str, Any]:
    """Grid values converted to SI (s, m, rad/s); counts and flags unchanged."""
    scale = {'_us': US, '_mhz': MHZ, '_um': UM, 'r_um_values': UM}
    converted: Dict[str, Any] = {}
    for key, value in config.grids.items():
        factor = next((f for suffix, f in scale.items() if key.endswith(suffix)), None)
        if value is not None and factor is not None:
            value = [v * factor for v in value] if isinstance(value, list) else value * factor
        converted[_si_name(key)] = value
    return converted
