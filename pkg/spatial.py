"""Transverse beam profiles averaged over atom clouds.

Radial averages over a coaxial cloud of a focused scheme use a Gauss-Legendre rule
matched to the narrowest beam: in v = exp(-r^2 / w_min^2) the fastest Rabi frequency
is linear, so the dressed-state ripple it drives is a plain e^{i A v} and converges
like a polynomial. The cloud density e^{-2 r^2 / a^2} becomes the weight
kappa v^(kappa - 1) with kappa = 2 w_min^2 / a^2. When that weight is too narrow for
the node count (clouds far smaller than the beam) or singular (kappa <= 1), the rule
is taken in the enclosed cloud fraction u = 1 - e^{-2 r^2 / a^2} instead.

A displaced neighbour cloud breaks azimuthal symmetry and is sampled on a polar
grid (Gauss-Laguerre radius x uniform azimuth) around its own centre.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit
from scipy.special import roots_legendre
from tqdm import tqdm

from effective import (ValidityReport, adiabatic_eliminate, local_two_level, nominal_rabi,
                       two_level_population, validity_report)
from errors import (ConfigurationError, DegenerateDynamicsError, NumericalError,
                    ShiftUnresolvedError, UnsupportedSchemeError, ValidityError)
from propagator import AmplitudeTrajectory, build_hamiltonian, propagate
from result_store import render_csv, render_table
from scheme import MHZ, UM, US, AtomCloud, LadderScheme, focus, with_detuning

logger = logging.getLogger(__name__)

DEFAULT_NODES = 2048
DEFAULT_NEIGHBOR_NODES = 32
DEFAULT_AZIMUTH = 16
MIN_NODES = 8
ANALYTIC_XI_LIMIT = 1.05
COARSE_POINTS = 801
FINE_POINTS = 201
# Legendre nodes that must fall inside the 1/kappa-wide bulk of the beam-matched weight
BULK_NODES = 16


@dataclass(frozen=True)
class RadialQuadrature:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class CoverageSweepResult:
    xi_values: Tuple[float, ...]
    a1_numeric: Tuple[float, ...]
    a1_effective: Tuple[float, ...]
    a1_analytic: Tuple[Optional[float], ...]

    def to_csv(self, scheme_fingerprint: str = '') -> str:
        rows = zip(self.xi_values, self.a1_numeric, self.a1_effective, self.a1_analytic)
        return render_csv(['xi', 'a1_numeric', 'a1_effective', 'a1_analytic'], rows,
                          [f'scheme={scheme_fingerprint}'])


@dataclass(frozen=True)
class CrosstalkResult:
    value: float
    peak_time: float
    spacing: float
    cloud_radius: float
    t_end: float
    n_nodes: int
    n_azimuth: int
    validity: Optional[ValidityReport] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'max_rydberg_population': self.value,
            'peak_time_us': self.peak_time / US,
            'spacing_um': self.spacing / UM,
            'cloud_radius_um': self.cloud_radius / UM,
            't_end_us': self.t_end / US,
            'grid': {
                'radial_nodes': self.n_nodes,
                'azimuthal_nodes': self.n_azimuth,
                'total_nodes': self.n_nodes * self.n_azimuth,
                'rule': 'gauss-laguerre x azimuthal trapezoid',
            },
            'validity_at_neighbor_center': None if self.validity is None else self.validity.to_dict(),
        }


@dataclass(frozen=True)
class SpectrumResult:
    detunings: np.ndarray
    populations: np.ndarray
    swept_transition: int
    base_total_detuning: float
    peak_center: Optional[float] = None
    peak_height: Optional[float] = None
    fwhm: Optional[float] = None

    @property
    def total_detunings(self) -> np.ndarray:
        return self.base_total_detuning + self.detunings

    def to_csv(self, scheme_fingerprint: str = '') -> str:
        rows = np.column_stack([self.total_detunings / MHZ, self.populations])
        comments = [f'scheme={scheme_fingerprint}', f'swept_transition={self.swept_transition}']
        return render_table(['detuning_mhz', 'n_final'], rows, comments)

    def summary(self) -> Dict[str, Any]:
        def in_mhz(x):
            return None if x is None else x / MHZ
        return {
            'swept_transition': self.swept_transition,
            'peak_center_mhz': in_mhz(self.peak_center),
            'peak_height': self.peak_height,
            'fwhm_mhz': in_mhz(self.fwhm),
        }


# --- cloud geometry ---------------------------------------------------------

def _require_coaxial(cloud: AtomCloud) -> None:
    if not cloud.coaxial:
        raise ConfigurationError("Radial averaging needs a cloud centred on the beam axis (center_offset = 0)")


def _check_nodes(n_nodes: int) -> None:
    if n_nodes < MIN_NODES:
        raise ConfigurationError(f"n_nodes must be at least {MIN_NODES}, got {n_nodes}")


@lru_cache(maxsize=8)
def _legendre_unit(n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(n_nodes)
    x, w = (x + 1) / 2, w / 2
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def radial_quadrature(cloud: AtomCloud, n_nodes: int = DEFAULT_NODES,
                      waist: Optional[float] = None) -> RadialQuadrature:
    """Radial rule for the cloud density, ascending in r; ``waist`` matches it to the narrowest beam."""
    _check_nodes(n_nodes)
    if waist is None:
        s, w = np.polynomial.laguerre.laggauss(n_nodes)
        return RadialQuadrature(nodes=cloud.radius * np.sqrt(s / 2), weights=w / w.sum())
    x, w = _legendre_unit(n_nodes)
    kappa = 2 * (waist / cloud.radius) ** 2
    if 1 < kappa <= (n_nodes / (math.pi * BULK_NODES / 2)) ** 2:
        v = x[::-1]
        radii = waist * np.sqrt(-np.log(v))
        weights = w[::-1] * np.exp((kappa - 1) * np.log(v))
    else:
        radii = cloud.radius * np.sqrt(-np.log1p(-x) / 2)
        weights = np.array(w)
    return RadialQuadrature(nodes=radii, weights=weights / weights.sum())


def atom_density(r: float, cloud: AtomCloud) -> float:
    _require_coaxial(cloud)
    a = cloud.radius
    return 2 / (math.pi * a ** 2) * math.exp(-2 * r ** 2 / a ** 2)


def estimate_atom_spot(w0: float, T: float, U0: float) -> float:
    """Thermal spot size a ~ w0 sqrt(T / U0) of an atom in a dipole trap of depth U0."""
    if not (w0 > 0 and T > 0 and U0 > 0):
        raise ConfigurationError("w0, T and U0 must all be positive")
    return w0 * math.sqrt(T / U0)


def _uses_uniform_waists(scheme: LadderScheme) -> bool:
    if scheme.n_levels != 4 or not scheme.is_focused:
        return False
    w1, w2, w3 = (t.waist for t in scheme.transitions)
    return math.isclose(w1, w3, rel_tol=1e-9) and math.isclose(w2, w1 / math.sqrt(2), rel_tol=1e-9)


def gamma_profile(scheme: LadderScheme, r: float) -> float:
    """Position-dependent decay constant of the reduced model."""
    if scheme.n_levels != 4:
        raise UnsupportedSchemeError("The decay profile is defined for four-level ladders")
    rates = scheme.decay_rates
    if _uses_uniform_waists(scheme):
        o1, o2, o3 = (t.peak_rabi for t in scheme.transitions)
        w = scheme.transitions[0].waist
        gamma_bar = 0.5 * (rates[1] + rates[2])
        return gamma_bar * (o1 ** 2 + o3 ** 2) / o2 ** 2 * math.exp(2 * r ** 2 / w ** 2) + rates[3]
    try:
        return adiabatic_eliminate(scheme, r).decay_total
    except NumericalError:
        o1, _, o3 = scheme.rabi_at(r)
        return rates[3] if o1 == 0 and o3 == 0 else math.inf


# --- node evaluation --------------------------------------------------------

def _map_ordered(fn: Callable, items: Sequence, threads: int = 1, desc: Optional[str] = None) -> Iterator:
    """fn over items, yielded in item order whatever the thread count."""
    items = list(items)
    show = desc is not None and logger.isEnabledFor(logging.INFO)
    if threads <= 1:
        yield from (fn(item) for item in tqdm(items, desc=desc, disable=not show, leave=False))
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from tqdm(pool.map(fn, items), total=len(items), desc=desc, disable=not show, leave=False)


def _averaged_populations(scheme: LadderScheme, radii: np.ndarray, weights: np.ndarray,
                          times: np.ndarray, threads: int = 1) -> Tuple[np.ndarray, bool]:
    def node(r):
        trajectory = propagate(build_hamiltonian(scheme, float(r)), None, times)
        return trajectory.populations, trajectory.fallback

    logger.debug("Averaging %d node trajectories over %d times", len(radii), len(times))
    total = np.zeros((len(times), scheme.n_levels))
    fallback = False
    # accumulation runs in node order, so the sum is the same for any thread count
    for weight, (populations, used_fallback) in zip(weights, _map_ordered(node, radii, threads)):
        total += weight * populations
        fallback = fallback or used_fallback
    return total, fallback


def _cloud_nodes(scheme: LadderScheme, cloud: AtomCloud, n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    _require_coaxial(cloud)
    _check_nodes(n_nodes)
    if not scheme.is_focused:
        # unfocused beams act as plane waves; every atom sees the axis values
        return np.zeros(1), np.ones(1)
    waist = min(t.waist for t in scheme.transitions)
    quadrature = radial_quadrature(cloud, n_nodes, waist)
    return quadrature.nodes, quadrature.weights


def _reduced_models(scheme: LadderScheme, radii: np.ndarray,
                    track_light_shift: bool = True) -> List[Optional[Tuple[float, float, float]]]:
    models = []
    for r in radii:
        try:
            models.append(local_two_level(scheme, float(r), track_light_shift))
        except NumericalError:
            # no middle coupling left: nothing reaches the Rydberg level
            models.append(None)
    return models


def _reduced_average(models: Sequence, weights: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate(times):
        rows = [np.zeros_like(times) if m is None else two_level_population(*m, times) for m in models]
        return weights @ np.stack(rows)
    return evaluate


def _parabolic_peak(x: np.ndarray, y: np.ndarray, k: int) -> Tuple[float, float]:
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    curvature = y0 - 2 * y1 + y2
    if curvature >= 0:
        return float(x[k]), float(y1)
    step = x[k + 1] - x[k]
    shift = 0.5 * (y0 - y2) / curvature
    return float(x[k] + shift * step), float(y1 - 0.25 * (y0 - y2) * shift)


def _maximum(evaluate: Callable[[np.ndarray], np.ndarray], horizon: float) -> Tuple[float, float, bool]:
    """Global maximum of evaluate(t) on [0, horizon]; the flag marks a maximum at the window edge."""
    coarse = np.linspace(0.0, horizon, COARSE_POINTS)
    values = evaluate(coarse)
    k = int(np.argmax(values))
    if k == 0 or k == len(coarse) - 1:
        return float(coarse[k]), float(values[k]), True
    fine = np.linspace(coarse[k - 1], coarse[k + 1], FINE_POINTS)
    fine_values = evaluate(fine)
    j = int(np.argmax(fine_values))
    if 0 < j < len(fine) - 1:
        t, height = _parabolic_peak(fine, fine_values, j)
        return t, max(height, float(fine_values[j])), False
    return float(fine[j]), float(fine_values[j]), False


def _horizon(scheme: LadderScheme) -> float:
    omega = nominal_rabi(scheme, 0.0)
    if omega == 0:
        raise DegenerateDynamicsError("Rabi frequency is zero; no oscillation to follow")
    return 2 * math.pi / omega


def _first_peak(evaluate: Callable[[np.ndarray], np.ndarray], horizon: float) -> Tuple[float, float]:
    t, height, at_edge = _maximum(evaluate, horizon)
    if at_edge:
        raise DegenerateDynamicsError(f"No local maximum of the Rydberg population in (0, {horizon:.3e} s]")
    return t, height


# --- averaged dynamics ------------------------------------------------------

def averaged_population(scheme: LadderScheme, cloud: AtomCloud, times: Sequence[float],
                        n_nodes: int = DEFAULT_NODES, threads: int = 1) -> np.ndarray:
    radii, weights = _cloud_nodes(scheme, cloud, n_nodes)
    populations, _ = _averaged_populations(scheme, radii, weights, np.asarray(times, dtype=float), threads)
    return populations[:, -1]


def averaged_trace(scheme: LadderScheme, cloud: AtomCloud, t_end: float, n_points: int,
                   n_nodes: int = DEFAULT_NODES, threads: int = 1) -> AmplitudeTrajectory:
    if not t_end > 0 or n_points < 2:
        raise ConfigurationError("averaged_trace needs t_end > 0 and at least two points")
    radii, weights = _cloud_nodes(scheme, cloud, n_nodes)
    times = np.linspace(0.0, t_end, n_points)
    populations, fallback = _averaged_populations(scheme, radii, weights, times, threads)
    return AmplitudeTrajectory(times=times, populations=populations, fallback=fallback)


def averaged_first_peak(scheme: LadderScheme, cloud: AtomCloud, n_nodes: int = DEFAULT_NODES,
                        threads: int = 1) -> Tuple[float, float]:
    """(time, height) of the first maximum of the cloud-averaged Rydberg population."""
    radii, weights = _cloud_nodes(scheme, cloud, n_nodes)
    horizon = _horizon(scheme)

    def evaluate(times):
        return _averaged_populations(scheme, radii, weights, times, threads)[0][:, -1]

    t, height = _first_peak(evaluate, horizon)
    logger.debug("First averaged peak %.6f at t=%.4e s", height, t)
    return t, height


def averaged_a1_numeric(scheme: LadderScheme, cloud: AtomCloud, n_nodes: int = DEFAULT_NODES,
                        threads: int = 1) -> float:
    return averaged_first_peak(scheme, cloud, n_nodes, threads)[1]


def averaged_a1_effective(scheme: LadderScheme, cloud: AtomCloud, n_nodes: int = DEFAULT_NODES,
                          track_light_shift: bool = True) -> float:
    """First peak of the cloud-averaged reduced two-level population.

    Each atom follows the reduced model at its own position. Unlike the full
    ladder it starts in the slow dressed state, so the sudden-switch admixture of
    the fast dressed states does not lower the peak.
    """
    radii, weights = _cloud_nodes(scheme, cloud, n_nodes)
    horizon = _horizon(scheme)
    evaluate = _reduced_average(_reduced_models(scheme, radii, track_light_shift), weights)
    return _first_peak(evaluate, horizon)[1]


def averaged_a1_analytic(scheme: LadderScheme, cloud: AtomCloud) -> float:
    """First-order A1 of a Gaussian cloud under uniform-Rabi waists w = xi a."""
    _require_coaxial(cloud)
    eff = adiabatic_eliminate(scheme, 0.0)
    rydberg_rate = scheme.decay_rates[-1]
    prefactor = math.pi / (2 * eff.reduced_rabi)
    if not scheme.is_focused:
        return 1 - prefactor * eff.decay_total
    if not _uses_uniform_waists(scheme):
        raise ValidityError("The closed-form A1 needs uniform-Rabi waists (w1 = w3 = sqrt(2) w2)")
    xi = scheme.transitions[0].waist / cloud.radius
    if xi <= ANALYTIC_XI_LIMIT:
        raise ValidityError(
            f"Coverage w/a = {xi:.3f} is at or below {ANALYTIC_XI_LIMIT}; use averaged_a1_numeric instead"
        )
    return 1 - prefactor * (eff.decay_total * xi ** 2 - rydberg_rate) / (xi ** 2 - 1)


def averaged_a1_envelope(scheme: LadderScheme, cloud: AtomCloud, n_nodes: int = 64) -> float:
    """Cloud average of the exact local first-peak envelope exp(-pi Gamma(r) / 2 Omega)."""
    _require_coaxial(cloud)
    radii, weights = (np.zeros(1), np.ones(1)) if not scheme.is_focused else _laguerre_nodes(cloud, n_nodes)
    omega = adiabatic_eliminate(scheme, 0.0).reduced_rabi
    if omega == 0:
        raise DegenerateDynamicsError("Reduced Rabi frequency is zero; there is no first maximum")
    envelope = np.array([math.exp(-math.pi * gamma_profile(scheme, float(r)) / (2 * omega)) for r in radii])
    return float(weights @ envelope)


def _laguerre_nodes(cloud: AtomCloud, n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    quadrature = radial_quadrature(cloud, n_nodes)
    return quadrature.nodes, quadrature.weights


def fit_rabi_oscillation(times: np.ndarray, population: np.ndarray, omega_guess: float) -> Dict[str, float]:
    """Least-squares fit of A (1 - cos(omega t)) exp(-g t) / 2; smooths the fast dressed-state ripple."""
    def model(t, amplitude, omega, decay):
        return 0.5 * amplitude * (1 - np.cos(omega * t)) * np.exp(-decay * t)

    params, _ = curve_fit(model, times, population, p0=(1.0, omega_guess, 0.0), maxfev=20000)
    amplitude, omega, decay = (float(p) for p in params)
    return {'amplitude': amplitude, 'omega': abs(omega), 'decay': decay}


def coverage_sweep(scheme: LadderScheme, a: float, xi_values: Sequence[float],
                   n_nodes: int = DEFAULT_NODES, threads: int = 1) -> CoverageSweepResult:
    xi_values = [float(x) for x in xi_values]
    if not xi_values:
        raise ConfigurationError("xi_values must not be empty")
    if any(x <= 0 for x in xi_values) or any(b <= c for c, b in zip(xi_values, xi_values[1:])):
        raise ConfigurationError("xi_values must be positive and strictly ascending")
    cloud = AtomCloud(a)
    numeric, effective, analytic = [], [], []
    for xi in tqdm(xi_values, desc='coverage', disable=not logger.isEnabledFor(logging.INFO), leave=False):
        focused = focus(scheme, xi * a)
        numeric.append(averaged_a1_numeric(focused, cloud, n_nodes, threads))
        effective.append(averaged_a1_effective(focused, cloud, n_nodes))
        value = None
        if focused.n_levels == 4 and xi > ANALYTIC_XI_LIMIT:
            value = averaged_a1_analytic(focused, cloud)
        analytic.append(value)
        logger.info("w/a = %.3g: A1 numeric %.5f, reduced model %.5f, analytic %s", xi, numeric[-1],
                    effective[-1], 'n/a' if value is None else f'{value:.5f}')
    return CoverageSweepResult(tuple(xi_values), tuple(numeric), tuple(effective), tuple(analytic))


# --- neighbour crosstalk ----------------------------------------------------

def _neighbor_nodes(neighbor: AtomCloud, n_nodes: int, n_azimuth: int) -> Tuple[np.ndarray, np.ndarray]:
    _check_nodes(n_nodes)
    if n_azimuth < 1:
        raise ConfigurationError(f"n_azimuth must be positive, got {n_azimuth}")
    s, w = np.polynomial.laguerre.laggauss(n_nodes)
    rho = neighbor.radius * np.sqrt(s / 2)
    phi = 2 * math.pi * np.arange(n_azimuth) / n_azimuth
    x = neighbor.center_offset + rho[:, None] * np.cos(phi)[None, :]
    y = rho[:, None] * np.sin(phi)[None, :]
    weights = np.repeat(w / w.sum(), n_azimuth) / n_azimuth
    return np.hypot(x, y).ravel(), weights


def _crosstalk_inputs(scheme, neighbor, t_end, n_nodes, n_azimuth):
    if not scheme.is_focused:
        raise ConfigurationError("Crosstalk needs focused beams; set the beam waists")
    horizon = _horizon(scheme) if t_end is None else float(t_end)
    if not horizon > 0:
        raise ConfigurationError(f"t_end must be positive, got {horizon}")
    radii, weights = _neighbor_nodes(neighbor, n_nodes, n_azimuth)
    return horizon, radii, weights


def crosstalk(scheme: LadderScheme, neighbor: AtomCloud, t_end: Optional[float] = None,
              n_nodes: int = DEFAULT_NEIGHBOR_NODES, n_azimuth: int = DEFAULT_AZIMUTH,
              threads: int = 1) -> CrosstalkResult:
    """Time-maximal Rydberg population of a displaced neighbour cloud under the full ladder dynamics."""
    horizon, radii, weights = _crosstalk_inputs(scheme, neighbor, t_end, n_nodes, n_azimuth)
    logger.info("Crosstalk at d=%.3g um over %d nodes", neighbor.center_offset / UM, len(radii))

    def evaluate(times):
        return _averaged_populations(scheme, radii, weights, times, threads)[0][:, -1]

    peak_time, value, _ = _maximum(evaluate, horizon)
    validity = None
    if scheme.n_levels == 4:
        validity = validity_report(scheme, neighbor.center_offset)
        if not validity.elimination_valid:
            logger.debug("Adiabatic elimination invalid at the neighbour centre; full propagator used")
    return CrosstalkResult(
        value=value,
        peak_time=peak_time,
        spacing=neighbor.center_offset,
        cloud_radius=neighbor.radius,
        t_end=horizon,
        n_nodes=n_nodes,
        n_azimuth=n_azimuth,
        validity=validity,
    )


def crosstalk_effective(scheme: LadderScheme, neighbor: AtomCloud, t_end: Optional[float] = None,
                        n_nodes: int = DEFAULT_NEIGHBOR_NODES, n_azimuth: int = DEFAULT_AZIMUTH) -> float:
    """Same neighbour average as ``crosstalk`` with the reduced two-level model at every node."""
    horizon, radii, weights = _crosstalk_inputs(scheme, neighbor, t_end, n_nodes, n_azimuth)
    return _maximum(_reduced_average(_reduced_models(scheme, radii), weights), horizon)[1]


def minimum_spacing(scheme: LadderScheme, radius: float, spacings: Sequence[float], threshold: float,
                    **kwargs) -> Optional[float]:
    """Smallest spacing in ``spacings`` whose neighbour crosstalk falls below ``threshold``."""
    for d in sorted(float(s) for s in spacings):
        result = crosstalk(scheme, AtomCloud(radius, d), **kwargs)
        logger.info("d=%.3g um: crosstalk %.3e", d / UM, result.value)
        if result.value < threshold:
            return d
    return None


# --- spectra ----------------------------------------------------------------

def _half_crossing(x: np.ndarray, y: np.ndarray, k: int, half: float, step: int) -> Optional[float]:
    j = k
    while 0 <= j + step < len(y):
        if y[j + step] < half:
            x0, x1, y0, y1 = x[j], x[j + step], y[j], y[j + step]
            return float(x0 + (half - y0) * (x1 - x0) / (y1 - y0))
        j += step
    return None


def spectrum(scheme: LadderScheme, swept_transition: int, detuning_grid: Sequence[float], t_int: float,
             r: float = 0.0, threads: int = 1) -> SpectrumResult:
    """Final Rydberg population versus detuning offset of one transition.

    ``detuning_grid`` holds offsets added to the swept transition's detuning. The
    reported peak centre is the total multi-photon detuning at the maximum, so a
    light shift reads off directly.
    """
    grid = np.asarray(detuning_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3 or not np.all(np.isfinite(grid)):
        raise ConfigurationError("detuning grid needs at least three finite points")
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError("detuning grid must be strictly ascending")
    if not t_int > 0:
        raise ConfigurationError(f"t_int must be positive, got {t_int}")
    if not 0 <= swept_transition < len(scheme.transitions):
        raise ConfigurationError(
            f"swept_transition {swept_transition} is out of range for {len(scheme.transitions)} transitions"
        )
    base = scheme.transitions[swept_transition].detuning

    def point(offset):
        detuned = with_detuning(scheme, swept_transition, base + offset)
        return propagate(build_hamiltonian(detuned, r), None, [t_int]).populations[-1, -1]

    populations = np.array(list(_map_ordered(point, grid, threads, desc='spectrum')))
    result = SpectrumResult(grid, populations, swept_transition, scheme.total_detuning)
    if np.max(populations) <= 1e-12:
        logger.info("Spectrum is flat; no peak to locate")
        return result
    k = int(np.argmax(populations))
    if k == 0 or k == len(grid) - 1:
        raise ShiftUnresolvedError(
            f"Spectrum maximum sits at the grid edge ({(scheme.total_detuning + grid[k]) / MHZ:.3f} MHz); "
            "widen the detuning range"
        )
    offset, height = _parabolic_peak(grid, populations, k)
    left = _half_crossing(grid, populations, k, height / 2, -1)
    right = _half_crossing(grid, populations, k, height / 2, +1)
    fwhm = None if left is None or right is None else right - left
    center = scheme.total_detuning + offset
    logger.info("Spectrum peak at %.4f MHz, height %.5f", center / MHZ, height)
    return SpectrumResult(grid, populations, swept_transition, scheme.total_detuning, center, height, fwhm)


def detuning_grid(minimum: float, maximum: float, step: float) -> np.ndarray:
    if not step > 0 or not maximum > minimum:
        raise ConfigurationError("detuning range needs max > min and a positive step")
    n = int(round((maximum - minimum) / step)) + 1
    return np.linspace(minimum, maximum, n)
