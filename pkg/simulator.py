import logging
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

import numpy as np

from config import ExperimentConfig, si_grids
from effective import adiabatic_eliminate, first_peak_height, two_photon_effective, validity_report
from errors import UnsupportedSchemeError
from propagator import rabi_trace
from result_store import ResultStore
from scheme import MHZ, UM, US, fingerprint
from spatial import (DEFAULT_NEIGHBOR_NODES, DEFAULT_NODES, averaged_trace, coverage_sweep, crosstalk,
                     crosstalk_effective, detuning_grid, spectrum)

__version__ = '0.1.0'

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'run_manifest.json'


class LadderSimulator:
    def __init__(self, settings: Dict[str, Any], n_nodes: Optional[int] = None, threads: Optional[int] = None):
        self.default_nodes = int(settings.get('LADDER_SIM_NODES', DEFAULT_NODES))
        self.neighbor_nodes = int(settings.get('LADDER_SIM_NEIGHBOR_NODES', DEFAULT_NEIGHBOR_NODES))
        self.n_azimuth = int(settings.get('LADDER_SIM_AZIMUTH', 16))
        self.default_output_dir = settings.get('LADDER_SIM_OUTPUT_DIR', './ladder_out')
        self.nodes_override = n_nodes
        self.threads = threads or int(settings.get('LADDER_SIM_THREADS', 1))

    def _nodes(self, config: ExperimentConfig) -> int:
        default = self.neighbor_nodes if config.experiment == 'crosstalk' else self.default_nodes
        return self.nodes_override or config.grids.get('n_nodes') or default

    @staticmethod
    def _radial_rule(config: ExperimentConfig) -> str:
        if config.experiment == 'crosstalk':
            return 'gauss-laguerre x azimuthal trapezoid'
        return 'gauss-legendre, beam-matched'

    def _azimuth(self, config: ExperimentConfig) -> int:
        return config.grids.get('n_azimuth') or self.n_azimuth

    def output_dir(self, config: ExperimentConfig, override: Optional[str] = None) -> str:
        return override or config.output_path or self.default_output_dir

    def run(self, config: ExperimentConfig, output_dir: Optional[str] = None) -> Dict[str, Any]:
        runners = {
            'rabi': self.run_rabi,
            'spectrum': self.run_spectrum,
            'coverage': self.run_coverage,
            'crosstalk': self.run_crosstalk,
            'effective': self.run_effective,
        }
        store = ResultStore(self.output_dir(config, output_dir))
        logger.info("Running '%s' for scheme %s (%s)", config.experiment, config.scheme.name,
                    fingerprint(config.scheme))
        summary = runners[config.experiment](config, store)
        store.write_json(MANIFEST_NAME, self.manifest(config, store, summary))
        logger.info("Finished '%s': %d files in %s", config.experiment, len(store.written), store.output_dir)
        return {
            'experiment': config.experiment,
            'output_dir': store.output_dir,
            'files': [entry['file'] for entry in store.written],
            'summary': summary,
        }

    def resolved_config(self, config: ExperimentConfig) -> Dict[str, Any]:
        doc = config.to_dict()
        if 'n_nodes' in config.grids:
            doc['grids']['n_nodes'] = self._nodes(config)
        if 'n_azimuth' in config.grids:
            doc['grids']['n_azimuth'] = self._azimuth(config)
        return doc

    def manifest(self, config: ExperimentConfig, store: ResultStore, summary: Dict[str, Any]) -> Dict[str, Any]:
        return {
            'version': __version__,
            'experiment': config.experiment,
            'config': self.resolved_config(config),
            'scheme_fingerprint': fingerprint(config.scheme),
            'quadrature': {
                'radial_rule': self._radial_rule(config),
                'radial_nodes': self._nodes(config),
                'azimuthal_nodes': self._azimuth(config),
                'threads': self.threads,
            },
            'files': list(store.written),
            'summary': summary,
            'created_at': datetime.now(timezone.utc).isoformat(timespec='seconds'),
        }

    def run_rabi(self, config: ExperimentConfig, store: ResultStore) -> Dict[str, Any]:
        grids = si_grids(config)
        if grids['average']:
            trajectory = averaged_trace(config.scheme, config.cloud, grids['t_end'], grids['n_points'],
                                        self._nodes(config), self.threads)
        else:
            trajectory = rabi_trace(config.scheme, grids['r'], grids['t_end'], grids['n_points'])
        store.write_text('rabi.csv', trajectory.to_csv(fingerprint(config.scheme)))
        rydberg = trajectory.populations[:, -1]
        k = int(np.argmax(rydberg))
        return {
            'peak_population': float(rydberg[k]),
            'peak_time_us': float(trajectory.times[k] / US),
            'final_norm': float(trajectory.norm[-1]),
            'fallback': trajectory.fallback,
        }

    def run_spectrum(self, config: ExperimentConfig, store: ResultStore) -> Dict[str, Any]:
        grids = si_grids(config)
        swept = grids['swept_transition']
        if swept is None:
            swept = len(config.scheme.transitions) - 1
        grid = detuning_grid(grids['detuning_min'], grids['detuning_max'], grids['detuning_step'])
        result = spectrum(config.scheme, swept, grid, grids['t_int'], grids['r'], self.threads)
        store.write_text('spectrum.csv', result.to_csv(fingerprint(config.scheme)))
        return result.summary()

    def run_coverage(self, config: ExperimentConfig, store: ResultStore) -> Dict[str, Any]:
        grids = si_grids(config)
        result = coverage_sweep(config.scheme, config.cloud.radius, grids['xi_values'],
                                self._nodes(config), self.threads)
        store.write_text('coverage.csv', result.to_csv(fingerprint(config.scheme)))
        return {
            'points': len(result.xi_values),
            'cloud_radius_um': config.cloud.radius / UM,
            'a1_numeric': list(result.a1_numeric),
            'a1_effective': list(result.a1_effective),
        }

    def run_crosstalk(self, config: ExperimentConfig, store: ResultStore) -> Dict[str, Any]:
        grids = si_grids(config)
        kwargs = {'t_end': grids['t_end'], 'n_nodes': self._nodes(config), 'n_azimuth': self._azimuth(config)}
        result = crosstalk(config.scheme, config.cloud, threads=self.threads, **kwargs)
        report = result.to_dict()
        if config.scheme.n_levels == 4:
            report['effective_model_value'] = crosstalk_effective(config.scheme, config.cloud, **kwargs)
        store.write_json('crosstalk.json', report)
        return {'max_rydberg_population': result.value}

    def run_effective(self, config: ExperimentConfig, store: ResultStore) -> Dict[str, Any]:
        grids = si_grids(config)
        scheme = config.scheme
        entries: List[Dict[str, Any]] = []
        for r in grids['r_values']:
            if scheme.n_levels == 4:
                entries.append(self._three_photon_entry(config, r))
            elif scheme.n_levels == 3:
                o1, o2 = (float(x) for x in scheme.rabi_at(r))
                rates = scheme.decay_rates
                eff = two_photon_effective(o1, o2, scheme.transitions[0].detuning, rates[1], rates[2])
                entries.append({
                    'r_um': r / UM,
                    'reduced_rabi_mhz': eff.reduced_rabi / MHZ,
                    'light_shift_mhz': eff.light_shift / MHZ,
                    'far_detuned': eff.far_detuned,
                    'decay_total_per_s': eff.decay_total,
                })
            else:
                raise UnsupportedSchemeError("The effective-model report covers three- and four-level ladders")
        store.write_json('effective.json', {'scheme': scheme.name, 'positions': entries})
        return {'positions': len(entries)}

    @staticmethod
    def _three_photon_entry(config: ExperimentConfig, r: float) -> Dict[str, Any]:
        eff = adiabatic_eliminate(config.scheme, r)
        entry = {
            'r_um': r / UM,
            'reduced_rabi_mhz': eff.reduced_rabi / MHZ,
            'dressed_rabi_mhz': eff.dressed_rabi / MHZ,
            'generalized_rabi_mhz': eff.generalized_rabi / MHZ,
            'three_photon_detuning_mhz': eff.three_photon_detuning / MHZ,
            'gamma1_per_s': eff.gamma1,
            'gamma4_per_s': eff.gamma4,
            'gamma_bar_per_s': eff.gamma_bar,
            'decay_total_per_s': eff.decay_total,
            'first_peak_height': None,
            'first_peak_height_linearized': None,
            'validity': validity_report(config.scheme, r).to_dict(),
        }
        if eff.reduced_rabi > 0 and eff.three_photon_detuning == 0:
            entry['first_peak_height'] = first_peak_height(eff)
            entry['first_peak_height_linearized'] = first_peak_height(eff, linearized=True)
        return entry
