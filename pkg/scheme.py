"""Excitation-ladder descriptions: levels, laser transitions, atom clouds and presets.

All quantities are SI internally (rad/s, s, m). The JSON config format uses
ordinary frequencies in MHz (nu = Omega / 2pi), lifetimes in microseconds and
lengths in micrometres; conversion happens only in this module.

Detuning convention: the upward coupling of transition j carries the phase
exp(+i delta_j t), so in the rotating frame level j sits at
-(delta_1 + ... + delta_{j-1}).
"""
import hashlib
import json
import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigurationError, UnsupportedSchemeError

logger = logging.getLogger(__name__)

MHZ = 2 * np.pi * 1e6
US = 1e-6
UM = 1e-6


def mhz(nu: float) -> float:
    return nu * MHZ


def to_mhz(omega: float) -> float:
    return omega / MHZ


def us(value: float) -> float:
    return value * US


def um(value: float) -> float:
    return value * UM


def config_value(value: float, unit: float) -> float:
    """value / unit as the float that converts back to exactly ``value``."""
    scaled = value / unit
    candidates = [scaled]
    for direction in (math.inf, -math.inf):
        step = scaled
        for _ in range(2):
            step = float(np.nextafter(step, direction))
            candidates.append(step)
    for candidate in candidates:
        if candidate * unit == value:
            return candidate
    return scaled


def on_unit_grid(value: float, unit: float) -> float:
    """A value of the form x * unit near ``value``; such values serialize exactly in config units."""
    return config_value(value, unit) * unit


@dataclass(frozen=True)
class Level:
    label: str
    lifetime: float = math.inf

    def __post_init__(self):
        if not self.lifetime > 0:
            raise ConfigurationError(f"Level '{self.label}': lifetime must be positive, got {self.lifetime}")

    @property
    def decay_rate(self) -> float:
        return 0.0 if math.isinf(self.lifetime) else 1.0 / self.lifetime


@dataclass(frozen=True)
class Transition:
    peak_rabi: float
    detuning: float = 0.0
    waist: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.peak_rabi) and self.peak_rabi >= 0):
            raise ConfigurationError(f"peak_rabi must be finite and non-negative, got {self.peak_rabi}")
        if not math.isfinite(self.detuning):
            raise ConfigurationError(f"detuning must be finite, got {self.detuning}")
        if self.waist is not None and not (math.isfinite(self.waist) and self.waist > 0):
            raise ConfigurationError(f"waist must be positive, got {self.waist}")

    def rabi_at(self, r: float) -> float:
        """Local Rabi frequency of a Gaussian beam, Omega_j exp(-r^2/w_j^2)."""
        if r == 0:
            return self.peak_rabi
        if self.waist is None:
            raise ConfigurationError(f"Beam waist is unset; cannot evaluate the Rabi frequency at r={r:.3e} m")
        return self.peak_rabi * math.exp(-(r / self.waist) ** 2)


@dataclass(frozen=True)
class LadderScheme:
    levels: Tuple[Level, ...]
    transitions: Tuple[Transition, ...]
    name: str = 'custom'

    def __post_init__(self):
        object.__setattr__(self, 'levels', tuple(self.levels))
        object.__setattr__(self, 'transitions', tuple(self.transitions))
        if len(self.levels) < 2:
            raise ConfigurationError("A ladder needs at least two levels")
        if len(self.transitions) != len(self.levels) - 1:
            raise ConfigurationError(
                f"A ladder of {len(self.levels)} levels needs {len(self.levels) - 1} transitions, "
                f"got {len(self.transitions)}"
            )

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def is_focused(self) -> bool:
        return all(t.waist is not None for t in self.transitions)

    @property
    def decay_rates(self) -> np.ndarray:
        return np.array([level.decay_rate for level in self.levels])

    @property
    def detunings(self) -> np.ndarray:
        return np.array([t.detuning for t in self.transitions])

    @property
    def total_detuning(self) -> float:
        return float(sum(t.detuning for t in self.transitions))

    def rabi_at(self, r: float) -> np.ndarray:
        return np.array([t.rabi_at(r) for t in self.transitions])


@dataclass(frozen=True)
class AtomCloud:
    radius: float
    center_offset: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ConfigurationError(f"cloud radius must be positive, got {self.radius}")
        if not (math.isfinite(self.center_offset) and self.center_offset >= 0):
            raise ConfigurationError(f"cloud center_offset must be non-negative, got {self.center_offset}")

    @property
    def coaxial(self) -> bool:
        return self.center_offset == 0


def preset_three_photon() -> LadderScheme:
    """5s1/2 -> 5p3/2 -> 6s1/2 -> 70p3/2 in 87Rb with a strong second step."""
    return LadderScheme(
        levels=(
            Level('5s1/2'),
            Level('5p3/2', us(0.0262)),
            Level('6s1/2', us(0.045)),
            Level('70p3/2', us(190.0)),
        ),
        transitions=(
            Transition(mhz(126.5)),
            Transition(mhz(4000.0)),
            Transition(mhz(126.5)),
        ),
        name='three_photon_rb87',
    )


def preset_two_photon(compensate_light_shift: bool = True) -> LadderScheme:
    """5s1/2 -> 6p3/2 -> 70s1/2 in 87Rb, far detuned from the intermediate level.

    With ``compensate_light_shift`` the second laser is tuned onto the
    light-shifted two-photon line at the beam centre, delta_2 = -delta_1 + Delta(0).
    Otherwise delta_2 = -delta_1 (bare resonance).
    """
    rabi1, rabi2, delta1 = 160.0, 50.0, 1000.0
    delta2 = -delta1
    if compensate_light_shift:
        delta2 += (rabi2 ** 2 - rabi1 ** 2) / (4 * delta1)
    return LadderScheme(
        levels=(
            Level('5s1/2'),
            Level('6p3/2', us(0.120)),
            Level('70s1/2', us(152.0)),
        ),
        transitions=(
            Transition(mhz(rabi1), mhz(delta1)),
            Transition(mhz(rabi2), mhz(delta2)),
        ),
        name='two_photon_rb87' if compensate_light_shift else 'two_photon_rb87_bare',
    )


PRESETS = {
    'three_photon_rb87': (
        preset_three_photon,
        "5s-5p-6s-70p, Omega1=Omega3=2pi*126.5 MHz, Omega2=2pi*4 GHz, resonant (three-photon Rabi/A1 runs)",
    ),
    'two_photon_rb87': (
        preset_two_photon,
        "5s-6p-70s, Omega1=2pi*160 MHz, Omega2=2pi*50 MHz, delta1=2pi*1 GHz, light shift compensated at r=0 "
        "(two-photon Rabi/A1 runs)",
    ),
    'two_photon_rb87_bare': (
        lambda: preset_two_photon(compensate_light_shift=False),
        "5s-6p-70s as above with delta2=-delta1 (two-photon light-shift spectra)",
    ),
}


def get_preset(name: str) -> LadderScheme:
    try:
        factory, _ = PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"Unknown preset '{name}'; choose one of {sorted(PRESETS)}") from None
    return factory()


def waists_for_uniform_rabi(w: float, scheme: Optional[LadderScheme] = None) -> Tuple[float, float, float]:
    """Waists w1 = w3 = sqrt(2) w2 = w, which make Omega1(r) Omega3(r) / Omega2(r) constant."""
    if scheme is not None and len(scheme.transitions) != 3:
        raise UnsupportedSchemeError(
            f"Uniform three-photon Rabi waists need a three-step ladder, got {len(scheme.transitions)} steps"
        )
    if not w > 0:
        raise ConfigurationError(f"waist must be positive, got {w}")
    w = on_unit_grid(w, UM)
    return w, on_unit_grid(w / math.sqrt(2), UM), w


def with_waists(scheme: LadderScheme, waists: Sequence[Optional[float]]) -> LadderScheme:
    if len(waists) != len(scheme.transitions):
        raise ConfigurationError(f"Expected {len(scheme.transitions)} waists, got {len(waists)}")
    transitions = tuple(replace(t, waist=w) for t, w in zip(scheme.transitions, waists))
    return replace(scheme, transitions=transitions)


def focus(scheme: LadderScheme, w: float) -> LadderScheme:
    """Focus every beam: uniform-Rabi waists for a three-step ladder, a common waist otherwise."""
    if len(scheme.transitions) == 3:
        return with_waists(scheme, waists_for_uniform_rabi(w, scheme))
    if not w > 0:
        raise ConfigurationError(f"waist must be positive, got {w}")
    return with_waists(scheme, [on_unit_grid(w, UM)] * len(scheme.transitions))


def with_detuning(scheme: LadderScheme, index: int, detuning: float) -> LadderScheme:
    transitions = list(scheme.transitions)
    transitions[index] = replace(transitions[index], detuning=detuning)
    return replace(scheme, transitions=tuple(transitions))


def with_rabi(scheme: LadderScheme, index: int, peak_rabi: float) -> LadderScheme:
    transitions = list(scheme.transitions)
    transitions[index] = replace(transitions[index], peak_rabi=peak_rabi)
    return replace(scheme, transitions=tuple(transitions))


def with_lifetime(scheme: LadderScheme, index: int, lifetime: float) -> LadderScheme:
    levels = list(scheme.levels)
    levels[index] = replace(levels[index], lifetime=lifetime)
    return replace(scheme, levels=tuple(levels))


def with_imbalance(scheme: LadderScheme, ratio: float) -> LadderScheme:
    """Set Omega_first : Omega_last = ratio while keeping their product fixed.

    For three steps this keeps the three-photon Rabi frequency Omega1 Omega3 / Omega2;
    for two steps the two-photon one, Omega1 Omega2 / (2 delta1).
    """
    if len(scheme.transitions) not in (2, 3):
        raise UnsupportedSchemeError("Rabi imbalance is defined for two- and three-step ladders only")
    if not ratio > 0:
        raise ConfigurationError(f"imbalance ratio must be positive, got {ratio}")
    first, last = scheme.transitions[0].peak_rabi, scheme.transitions[-1].peak_rabi
    product = first * last
    scheme = with_rabi(scheme, 0, on_unit_grid(math.sqrt(product * ratio), MHZ))
    return with_rabi(scheme, len(scheme.transitions) - 1, on_unit_grid(math.sqrt(product / ratio), MHZ))


# --- config codec -----------------------------------------------------------

_LEVEL_KEYS = {'label', 'lifetime_us'}
_TRANSITION_KEYS = {'rabi_mhz', 'detuning_mhz', 'waist_um'}
_SCHEME_KEYS = {'name', 'levels', 'transitions'}


def check_keys(doc: Any, allowed: set, path: str, required: Sequence[str] = ()) -> None:
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: expected an object, got {type(doc).__name__}")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigurationError(f"{path}.{unknown[0]}: unknown field")
    for key in required:
        if key not in doc:
            raise ConfigurationError(f"{path}.{key}: missing required field")


def config_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{path}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigurationError(f"{path}: must be finite")
    return value


def _field(builder, path: str, *args):
    try:
        return builder(*args)
    except ConfigurationError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None


def scheme_to_config(scheme: LadderScheme) -> Dict[str, Any]:
    levels = []
    for level in scheme.levels:
        lifetime = 'inf' if math.isinf(level.lifetime) else config_value(level.lifetime, US)
        levels.append({'label': level.label, 'lifetime_us': lifetime})
    transitions = []
    for t in scheme.transitions:
        entry = {'rabi_mhz': config_value(t.peak_rabi, MHZ), 'detuning_mhz': config_value(t.detuning, MHZ)}
        if t.waist is not None:
            entry['waist_um'] = config_value(t.waist, UM)
        transitions.append(entry)
    return {'name': scheme.name, 'levels': levels, 'transitions': transitions}


def scheme_from_config(doc: Any, path: str = '$.scheme') -> LadderScheme:
    if isinstance(doc, str):
        return get_preset(doc)
    check_keys(doc, _SCHEME_KEYS, path, required=('levels', 'transitions'))
    if not isinstance(doc['levels'], list) or not isinstance(doc['transitions'], list):
        raise ConfigurationError(f"{path}: 'levels' and 'transitions' must be arrays")
    levels: List[Level] = []
    for i, entry in enumerate(doc['levels']):
        at = f'{path}.levels[{i}]'
        check_keys(entry, _LEVEL_KEYS, at, required=('label',))
        raw = entry.get('lifetime_us', 'inf')
        if raw == 'inf':
            lifetime = math.inf
        else:
            lifetime = us(config_number(raw, f'{at}.lifetime_us'))
        levels.append(_field(Level, f'{at}.lifetime_us', str(entry['label']), lifetime))
    transitions: List[Transition] = []
    for i, entry in enumerate(doc['transitions']):
        at = f'{path}.transitions[{i}]'
        check_keys(entry, _TRANSITION_KEYS, at, required=('rabi_mhz',))
        rabi = mhz(config_number(entry['rabi_mhz'], f'{at}.rabi_mhz'))
        detuning = mhz(config_number(entry.get('detuning_mhz', 0.0), f'{at}.detuning_mhz'))
        waist = entry.get('waist_um')
        if waist is not None:
            waist = um(config_number(waist, f'{at}.waist_um'))
        transitions.append(_field(Transition, at, rabi, detuning, waist))
    return _field(LadderScheme, path, tuple(levels), tuple(transitions), str(doc.get('name', 'custom')))


def fingerprint(scheme: LadderScheme) -> str:
    payload = json.dumps(scheme_to_config(scheme), sort_keys=True)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:12]
