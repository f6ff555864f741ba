import json
import math

import pytest

from errors import ConfigurationError, UnsupportedSchemeError
from scheme import (MHZ, UM, US, AtomCloud, LadderScheme, Level, Transition, config_value, fingerprint, focus,
                    get_preset, mhz, on_unit_grid, preset_three_photon, preset_two_photon, scheme_from_config,
                    scheme_to_config, um, us, waists_for_uniform_rabi, with_imbalance, with_lifetime)
from spatial import averaged_a1_analytic


def test_three_photon_preset_values():
    scheme = preset_three_photon()
    assert scheme.n_levels == 4
    rabi = [t.peak_rabi / MHZ for t in scheme.transitions]
    assert rabi == pytest.approx([126.5, 4000.0, 126.5])
    assert scheme.levels[3].lifetime == pytest.approx(190 * US)
    assert rabi[0] * rabi[2] / rabi[1] == pytest.approx(4.0006, abs=1e-4)
    assert not scheme.is_focused


def test_two_photon_preset_values():
    scheme = preset_two_photon()
    o1, o2 = (t.peak_rabi for t in scheme.transitions)
    delta1 = scheme.transitions[0].detuning
    assert scheme.levels[2].lifetime == pytest.approx(152 * US)
    assert o1 * o2 / (2 * delta1) / MHZ == pytest.approx(4.0)
    assert scheme.total_detuning / MHZ == pytest.approx(-5.775)


def test_bare_two_photon_preset_is_on_unshifted_resonance():
    scheme = preset_two_photon(compensate_light_shift=False)
    assert scheme.name == 'two_photon_rb87_bare'
    assert scheme.total_detuning == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("w, expected", [(1.0, (1.0, 0.7071, 1.0)), (2.0, (2.0, 1.4142, 2.0))])
def test_waists_for_uniform_rabi(w, expected):
    waists = waists_for_uniform_rabi(um(w))
    assert [x / UM for x in waists] == pytest.approx(expected, abs=1e-4)


def test_waists_for_uniform_rabi_rejects_two_step_ladder():
    with pytest.raises(UnsupportedSchemeError):
        waists_for_uniform_rabi(um(1.0), preset_two_photon())


def test_uniform_waists_keep_three_photon_rabi_constant():
    scheme = focus(preset_three_photon(), um(2.0))
    products = []
    for r in (0.0, um(0.5), um(1.0), um(3.0)):
        o1, o2, o3 = scheme.rabi_at(r)
        products.append(o1 * o3 / o2)
    assert products == pytest.approx([products[0]] * 4, rel=1e-12)


def test_focus_two_step_ladder_uses_equal_waists():
    scheme = focus(preset_two_photon(), um(3.0))
    assert [t.waist for t in scheme.transitions] == [um(3.0), um(3.0)]


def test_rabi_at_needs_waist_off_axis():
    transition = Transition(mhz(10.0))
    assert transition.rabi_at(0.0) == mhz(10.0)
    with pytest.raises(ConfigurationError):
        transition.rabi_at(um(1.0))


def test_rabi_at_waist_is_one_over_e():
    transition = Transition(mhz(10.0), waist=um(2.0))
    assert transition.rabi_at(um(2.0)) == pytest.approx(mhz(10.0) / math.e)


@pytest.mark.parametrize("builder", [
    lambda: Level('x', lifetime=-1.0),
    lambda: Level('x', lifetime=0.0),
    lambda: Transition(mhz(1.0), waist=0.0),
    lambda: Transition(-1.0),
    lambda: AtomCloud(0.0),
    lambda: LadderScheme((Level('a'), Level('b')), ()),
])
def test_invalid_physics_values_are_rejected(builder):
    with pytest.raises(ConfigurationError):
        builder()


def test_with_imbalance_keeps_outer_product():
    base = preset_three_photon()
    scheme = with_imbalance(base, 4.0)
    o1, _, o3 = (t.peak_rabi for t in scheme.transitions)
    assert o1 / o3 == pytest.approx(4.0)
    assert o1 * o3 == pytest.approx(base.transitions[0].peak_rabi * base.transitions[2].peak_rabi)


def test_scheme_config_round_trip():
    scheme = with_lifetime(focus(preset_three_photon(), um(2.0)), 2, 50 * US)
    doc = scheme_to_config(scheme)
    assert doc['levels'][0]['lifetime_us'] == 'inf'
    assert doc['transitions'][1]['waist_um'] == pytest.approx(math.sqrt(2))
    again = scheme_from_config(doc)
    assert scheme_to_config(again) == doc
    assert fingerprint(again) == fingerprint(scheme)


def test_preset_configs_round_trip_exactly():
    for name in ('three_photon_rb87', 'two_photon_rb87', 'two_photon_rb87_bare'):
        scheme = get_preset(name)
        assert scheme_from_config(scheme_to_config(scheme)) == scheme


@pytest.mark.parametrize("w", [2.0, 1.7, 0.3, 13.0])
def test_focused_scheme_round_trips_exactly(w):
    scheme = focus(preset_three_photon(), um(w))
    again = scheme_from_config(json.loads(json.dumps(scheme_to_config(scheme))))
    assert again == scheme
    assert [t.waist for t in again.transitions] == [t.waist for t in scheme.transitions]


def test_derived_values_round_trip_exactly():
    scheme = with_imbalance(with_lifetime(preset_two_photon(), 1, us(0.095)), 3.0)
    assert scheme_from_config(scheme_to_config(scheme)) == scheme


@pytest.mark.parametrize("value, unit", [
    (math.sqrt(2) * UM, UM),
    (mhz(126.5), MHZ),
    (0.0262 * US, US),
])
def test_config_value_converts_back(value, unit):
    assert config_value(value, unit) * unit == value


def test_uniform_waists_survive_round_trip():
    cloud = AtomCloud(um(1.0))
    scheme = focus(preset_three_photon(), um(2.0))
    again = scheme_from_config(scheme_to_config(scheme))
    assert averaged_a1_analytic(again, cloud) == averaged_a1_analytic(scheme, cloud)


def test_scheme_from_config_names_unknown_field():
    doc = scheme_to_config(preset_three_photon())
    doc['transitions'][1]['rabi_ghz'] = 4.0
    with pytest.raises(ConfigurationError, match=r"transitions\[1\]\.rabi_ghz"):
        scheme_from_config(doc)


def test_unknown_preset():
    with pytest.raises(ConfigurationError, match="Unknown preset"):
        get_preset('four_photon')


@pytest.mark.parametrize("w", [3.0, 0.5, 2.0 / 3.0])
def test_unit_grid_snapping_is_idempotent(w):
    snapped = on_unit_grid(um(w) * 1.0000000001, UM)
    assert on_unit_grid(snapped, UM) == snapped
    assert on_unit_grid(um(w), UM) == um(w)
