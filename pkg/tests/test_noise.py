import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from octabound.channels import IDENTITY, PauliOp, choi_psd_check, compose, depolarizing, mix_with, pauli_channel
from octabound.noise import (
    CONTROL_INPUT,
    KNILL_MAX_GAMMA,
    InjectionVariant,
    LocationNoise,
    dephasing_two_hit_model,
    epg_location_noise,
    epg_split,
    general_gate_resource,
    general_state_resource,
    independent_depolarizing,
    knill_location_noise,
    phase_gate_resource,
    phase_state_resource,
    simultaneous_depolarizing,
    totally_dephasing,
)
from octabound.shifting import effective_map

STATE, GATE = InjectionVariant.STATE, InjectionVariant.GATE
PI4 = math.pi / 4


def test_variant_locations():
    assert STATE.locations == {1, 2, 3, 4, 5, 6, CONTROL_INPUT}
    assert GATE.locations == STATE.locations | {7}
    assert (STATE.exponent, GATE.exponent) == (1, 2)
    assert InjectionVariant.parse(" Gate ") is GATE
    with pytest.raises(ValueError):
        InjectionVariant.parse("both")


def test_resources():
    r = phase_state_resource(PI4)
    assert np.allclose(r.bloch.as_array(), (1 / math.sqrt(2), 1 / math.sqrt(2), 0))
    g = phase_gate_resource(PI4)
    assert np.allclose(g.rotation @ (1, 0, 0), r.bloch.as_array())
    v = np.array([0.3, -0.4, 0.5])
    v /= np.linalg.norm(v)
    gg = general_gate_resource(v)
    assert np.allclose(gg.rotation @ (1, 0, 0), v)
    assert np.allclose(general_gate_resource(unitary=gg.unitary).bloch.as_array(), v)
    with pytest.raises(ValueError):
        general_state_resource((0.5, 0, 0))


@pytest.mark.parametrize("variant", [STATE, GATE])
def test_knill_zero_is_noiseless(variant):
    noise = knill_location_noise(0.0, variant)
    assert all(ch.allclose(IDENTITY) for ch in noise.single.values())
    assert noise.pair[(PauliOp.I, PauliOp.I)] == 1.0


def test_knill_pair_values():
    noise = knill_location_noise(0.15, STATE)
    others = [p for k, p in noise.pair.items() if k != (PauliOp.I, PauliOp.I)]
    assert len(others) == 15 and all(p == pytest.approx(0.01) for p in others)
    assert 4 not in noise.single
    with pytest.raises(ValueError):
        knill_location_noise(KNILL_MAX_GAMMA + 1e-9, STATE)


@given(st.floats(0, KNILL_MAX_GAMMA), st.sampled_from([STATE, GATE]))
def test_knill_cptp_and_affine(gamma, variant):
    noise = knill_location_noise(gamma, variant)
    assert noise.is_cptp()
    lo, hi = knill_location_noise(0.0, variant), knill_location_noise(KNILL_MAX_GAMMA, variant)
    w = gamma / KNILL_MAX_GAMMA
    for loc, ch in noise.single.items():
        mix = (1 - w) * lo.single[loc].M + w * hi.single[loc].M
        assert np.allclose(ch.M, mix, atol=1e-14)
    for key, p in noise.pair.items():
        assert p == pytest.approx((1 - w) * lo.pair[key] + w * hi.pair[key], abs=1e-15)


@pytest.mark.parametrize("variant, res", [(STATE, phase_state_resource(PI4)), (GATE, phase_gate_resource(PI4))])
def test_epg_zero_and_cptp(variant, res):
    assert all(ch.allclose(IDENTITY) for ch in epg_location_noise(0.0, variant, res).single.values())
    for p in (0.01, 0.1, 0.5, 1.0):
        assert epg_location_noise(p, variant, res, general=True).is_cptp()
    with pytest.raises(ValueError):
        epg_location_noise(1.2, variant, res)


def test_epg_variant_mismatch():
    with pytest.raises(ValueError):
        epg_location_noise(0.1, GATE, phase_state_resource(PI4))


def test_epg_general_flag_changes_location_4():
    res = phase_state_resource(PI4)
    p = 0.07
    assert epg_location_noise(p, STATE, res).single[4].allclose(mix_with(pauli_channel(PauliOp.Z), p))
    assert epg_location_noise(p, STATE, res, general=True).single[4].allclose(mix_with(pauli_channel(PauliOp.Y), p))


@pytest.mark.parametrize("p", [0.02, 0.05, 0.11])
def test_epg_scalar_prefactors(p):
    s = effective_map(epg_location_noise(p, STATE, phase_state_resource(0.4)), STATE, phase_state_resource(0.4))
    assert s.scalar_prefactor == pytest.approx((1 - p) * (1 - 2 * p) - p, abs=1e-14)
    g = effective_map(epg_location_noise(p, GATE, phase_gate_resource(0.4)), GATE, phase_gate_resource(0.4))
    assert g.scalar_prefactor == pytest.approx((1 - p) * (1 - 4 * p + 2 * p * p) - p, abs=1e-14)


def test_location_noise_validation():
    with pytest.raises(ValueError):
        LocationNoise(STATE, {7: IDENTITY})
    with pytest.raises(ValueError):
        LocationNoise(STATE, {2: IDENTITY})
    with pytest.raises(ValueError):
        LocationNoise(STATE, pair={(PauliOp.I, PauliOp.I): 0.9})


def test_standalone_models():
    t = 0.3
    assert independent_depolarizing(t).allclose(mix_with(depolarizing(), t))
    sim = simultaneous_depolarizing(t, 2)
    assert len(sim) == 16 and math.fsum(sim.values()) == pytest.approx(1.0, abs=1e-15)
    assert all(v == pytest.approx(t / 15) for k, v in sim.items() if k != (PauliOp.I, PauliOp.I))
    assert totally_dephasing(0.159).allclose(mix_with(pauli_channel(PauliOp.Z), 0.0795))
    p = 0.1
    assert dephasing_two_hit_model(p).M[0, 0] == pytest.approx((1 - 2 * p) ** 2)
    assert all(choi_psd_check(ch) for ch in (independent_depolarizing(t), totally_dephasing(0.4), dephasing_two_hit_model(p)))
    with pytest.raises(ValueError):
        simultaneous_depolarizing(0.1, 0)


def test_epg_split_examples():
    assert epg_split(0) == 0
    assert epg_split(0.75) == pytest.approx(0.5)


@given(st.floats(0, 1))
def test_epg_split_inverse(p):
    t = epg_split(p)
    assert t * t + 2 * t * (1 - t) == pytest.approx(p, abs=1e-14)
