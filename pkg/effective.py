"""Reduced two-level descriptions of resonant three-photon and far-detuned two-photon ladders."""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Tuple, Union

import numpy as np

from errors import (ConfigurationError, DegenerateDynamicsError, NumericalError,
                    UnsupportedSchemeError, ValidityError)
from scheme import LadderScheme, with_detuning

logger = logging.getLogger(__name__)

VALIDITY_LIMIT = 0.1
FAR_DETUNING_FACTOR = 10.0


@dataclass(frozen=True)
class EffectiveTwoLevel:
    """Ground and Rydberg states coupled through the eliminated intermediate pair."""

    reduced_rabi: float
    three_photon_detuning: float
    gamma1: float
    gamma4: float
    gamma_bar: float
    decay_total: float
    local_rabi: Tuple[float, float, float]

    @property
    def generalized_rabi(self) -> float:
        return math.hypot(self.reduced_rabi, self.three_photon_detuning)

    @property
    def dressed_rabi(self) -> float:
        # slow frequency of the lossless resonant ladder; reduced_rabi is its Omega2 >> Omega1,3 limit
        o1, o2, o3 = self.local_rabi
        scale = math.sqrt(o1 ** 2 + o2 ** 2 + o3 ** 2)
        return 0.0 if scale == 0 else o1 * o3 / scale


@dataclass(frozen=True)
class TwoPhotonEffective:
    reduced_rabi: float
    light_shift: float
    far_detuned: bool
    decay_total: float = 0.0


@dataclass(frozen=True)
class ValidityReport:
    rabi_ratio_1: float
    rabi_ratio_3: float
    gamma1_ratio: float
    gamma4_ratio: float
    detuning_ratio: float
    limit: float = VALIDITY_LIMIT

    @property
    def elimination_valid(self) -> bool:
        ratios = (self.rabi_ratio_1, self.rabi_ratio_3, self.gamma1_ratio, self.gamma4_ratio, self.detuning_ratio)
        return all(x < self.limit for x in ratios)

    def to_dict(self) -> Dict[str, Any]:
        payload = {k: (v if math.isfinite(v) else 'inf') for k, v in asdict(self).items()}
        payload['elimination_valid'] = self.elimination_valid
        return payload


def _require_levels(scheme: LadderScheme, n_levels: int, operation: str) -> None:
    if scheme.n_levels != n_levels:
        raise UnsupportedSchemeError(f"{operation} needs a {n_levels}-level ladder, got {scheme.n_levels} levels")


def _ratio(numerator: float, denominator: float) -> float:
    if numerator == 0:
        return 0.0
    if denominator == 0:
        return math.inf
    return numerator / denominator


def adiabatic_eliminate(scheme: LadderScheme, r: float = 0.0) -> EffectiveTwoLevel:
    _require_levels(scheme, 4, "Adiabatic elimination")
    o1, o2, o3 = (float(x) for x in scheme.rabi_at(r))
    if o2 == 0:
        raise NumericalError(f"Omega2(r={r:.3e} m) is zero; the intermediate pair cannot be eliminated")
    rates = scheme.decay_rates
    gamma_bar = 0.5 * (rates[1] + rates[2])
    admix1 = (o1 / o2) ** 2
    admix3 = (o3 / o2) ** 2
    return EffectiveTwoLevel(
        reduced_rabi=o1 * o3 / o2,
        three_photon_detuning=scheme.total_detuning,
        gamma1=gamma_bar * admix1,
        gamma4=gamma_bar * admix3 + rates[3],
        gamma_bar=gamma_bar,
        decay_total=gamma_bar * (admix1 + admix3) + rates[3],
        local_rabi=(o1, o2, o3),
    )


def two_level_population(rabi: float, detuning: float, decay_total: float,
                         t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Upper-state population of a driven two-level atom with decay averaged over both dressed states."""
    t = np.asarray(t, dtype=float)
    omega_bar = math.hypot(rabi, detuning)
    if omega_bar == 0:
        result = np.zeros_like(t)
    else:
        contrast = rabi ** 2 / (2 * omega_bar ** 2)
        result = contrast * (1 - np.cos(omega_bar * t)) * np.exp(-0.5 * decay_total * t)
    return float(result) if result.ndim == 0 else result


def analytic_population(eff: EffectiveTwoLevel, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Rydberg population of the reduced three-photon model."""
    return two_level_population(eff.reduced_rabi, eff.three_photon_detuning, eff.decay_total, t)


def first_peak_height(eff: EffectiveTwoLevel, linearized: bool = False) -> float:
    """Height of the first resonant maximum, exp(-pi Gamma / 2 Omega) or its 1 - pi Gamma / 2 Omega form."""
    if eff.reduced_rabi == 0:
        raise DegenerateDynamicsError("Reduced Rabi frequency is zero; there is no first maximum")
    if eff.three_photon_detuning != 0:
        raise ValidityError("first_peak_height assumes three-photon resonance")
    if eff.reduced_rabi < 10 * eff.decay_total:
        logger.warning(
            "Omega/Gamma = %.2f is below 10; the first-peak estimate loses accuracy",
            eff.reduced_rabi / eff.decay_total,
        )
    exponent = math.pi * eff.decay_total / (2 * eff.reduced_rabi)
    return 1 - exponent if linearized else math.exp(-exponent)


def _two_photon(omega1: float, omega2: float, delta1: float, intermediate_rate: float = 0.0,
                rydberg_rate: float = 0.0) -> TwoPhotonEffective:
    if delta1 == 0:
        raise NumericalError("delta1 is zero; the two-photon reduction needs a detuned intermediate level")
    # off-resonant scattering through the intermediate admixtures (Omega_j / 2 delta1)^2
    scattering = intermediate_rate * (omega1 ** 2 + omega2 ** 2) / (4 * delta1 ** 2)
    return TwoPhotonEffective(
        reduced_rabi=omega1 * omega2 / (2 * abs(delta1)),
        light_shift=(omega2 ** 2 - omega1 ** 2) / (4 * delta1),
        far_detuned=abs(delta1) > FAR_DETUNING_FACTOR * max(omega1, omega2),
        decay_total=scattering + rydberg_rate,
    )


def two_photon_effective(omega1: float, omega2: float, delta1: float, intermediate_rate: float = 0.0,
                         rydberg_rate: float = 0.0) -> TwoPhotonEffective:
    eff = _two_photon(omega1, omega2, delta1, intermediate_rate, rydberg_rate)
    if not eff.far_detuned:
        logger.warning(
            "|delta1| = %.3e rad/s is not far above max(Omega1, Omega2) = %.3e rad/s; "
            "the two-photon reduction is approximate",
            abs(delta1), max(omega1, omega2),
        )
    return eff


def validity_report(scheme: LadderScheme, r: float = 0.0) -> ValidityReport:
    _require_levels(scheme, 4, "The validity report")
    o1, o2, o3 = (float(x) for x in scheme.rabi_at(r))
    rates = scheme.decay_rates
    gamma_bar = 0.5 * (rates[1] + rates[2])
    omega = _ratio(o1 * o3, o2)
    admix1 = gamma_bar * _ratio(o1, o2) ** 2
    admix3 = gamma_bar * _ratio(o3, o2) ** 2
    return ValidityReport(
        rabi_ratio_1=_ratio(o1, o2),
        rabi_ratio_3=_ratio(o3, o2),
        gamma1_ratio=_ratio(admix1, omega),
        gamma4_ratio=_ratio(admix3, omega),
        detuning_ratio=_ratio(abs(scheme.total_detuning), o2),
    )


def nominal_rabi(scheme: LadderScheme, r: float = 0.0) -> float:
    """Rabi frequency of the slow ground-Rydberg oscillation at r."""
    if scheme.n_levels == 4:
        return adiabatic_eliminate(scheme, r).reduced_rabi
    if scheme.n_levels == 3:
        o1, o2 = (float(x) for x in scheme.rabi_at(r))
        return _two_photon(o1, o2, scheme.transitions[0].detuning).reduced_rabi
    if scheme.n_levels == 2:
        return float(scheme.rabi_at(r)[0])
    raise UnsupportedSchemeError(f"No reduced Rabi frequency for a {scheme.n_levels}-level ladder")


def light_shift(scheme: LadderScheme, r: float = 0.0) -> float:
    if scheme.n_levels == 3:
        o1, o2 = (float(x) for x in scheme.rabi_at(r))
        return _two_photon(o1, o2, scheme.transitions[0].detuning).light_shift
    if scheme.n_levels in (2, 4):
        # the outer shifts of the resonant three-photon ladder cancel pairwise
        return 0.0
    raise UnsupportedSchemeError(f"No light shift defined for a {scheme.n_levels}-level ladder")


def compensate_light_shift(scheme: LadderScheme) -> LadderScheme:
    """Tune the last step so the two-photon line sits on its light-shifted centre at r = 0."""
    if scheme.n_levels != 3:
        return scheme
    delta1 = scheme.transitions[0].detuning
    if delta1 == 0:
        raise ConfigurationError("Light-shift compensation needs a detuned intermediate level")
    return with_detuning(scheme, 1, -delta1 + light_shift(scheme))


def local_two_level(scheme: LadderScheme, r: float = 0.0,
                    track_light_shift: bool = True) -> Tuple[float, float, float]:
    """(Rabi frequency, detuning, decay constant) of the reduced model seen by an atom at r.

    For the two-photon ladder the detuning is counted from the light-shifted line.
    With ``track_light_shift`` every atom keeps its own light-shifted resonance and
    only the mis-tuning at the beam centre remains; otherwise the shift varies with
    the local intensity.
    """
    rates = scheme.decay_rates
    if scheme.n_levels == 4:
        eff = adiabatic_eliminate(scheme, r)
        return eff.reduced_rabi, eff.three_photon_detuning, eff.decay_total
    if scheme.n_levels == 3:
        delta1 = scheme.transitions[0].detuning
        o1, o2 = (float(x) for x in scheme.rabi_at(r))
        eff = _two_photon(o1, o2, delta1, rates[1], rates[2])
        shift = light_shift(scheme, 0.0) if track_light_shift else eff.light_shift
        return eff.reduced_rabi, scheme.total_detuning - shift, eff.decay_total
    if scheme.n_levels == 2:
        return float(scheme.rabi_at(r)[0]), scheme.total_detuning, float(rates[0] + rates[1])
    raise UnsupportedSchemeError(f"No reduced two-level model for a {scheme.n_levels}-level ladder")
