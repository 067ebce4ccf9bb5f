import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from octabound.channels import IDENTITY, AffineChannel, PauliOp, conjugate, orthogonal_flip, pauli_channel
from octabound.checks import random_map_checks, shift_identity_checks
from octabound.noise import (
    InjectionVariant,
    LocationNoise,
    general_gate_resource,
    knill_location_noise,
    phase_gate_resource,
    phase_state_resource,
)
from octabound.oracle import (
    Gate,
    MultiQubitState,
    build_injection_circuit,
    kraus_operators,
    oracle_threshold,
    run_circuit,
    simulate_channel,
)
from octabound.scan import family
from octabound.shifting import effective_map

STATE, GATE = InjectionVariant.STATE, InjectionVariant.GATE
PI4 = math.pi / 4
R = 1 / math.sqrt(2)


def oracle(variant, res, noise, **kw):
    return simulate_channel(build_injection_circuit(variant, res, noise, **kw))


@pytest.mark.parametrize("res", [phase_state_resource(PI4), phase_gate_resource(PI4), general_gate_resource((0.6, 0, 0.8))])
def test_ideal_teleportation_is_identity(res):
    v = res.variant
    assert oracle(v, res, LocationNoise(v)).max_deviation(IDENTITY) <= 1e-12


@pytest.mark.parametrize("res", [phase_state_resource(PI4), phase_gate_resource(PI4)])
def test_physical_run_outputs_resource(res):
    v = res.variant
    out = oracle(v, res, LocationNoise(v), physical=True).c
    assert np.allclose(out, (R, R, 0), atol=1e-12)


def test_y_at_six_is_x_at_one():
    res = phase_state_resource(0.4)
    lhs = oracle(STATE, res, LocationNoise(STATE, {6: pauli_channel(PauliOp.Y)}))
    rhs = oracle(STATE, res, LocationNoise(STATE, {1: pauli_channel(PauliOp.X)}))
    assert lhs.max_deviation(rhs) <= 1e-12
    assert lhs.max_deviation(pauli_channel(PauliOp.X)) <= 1e-12


def test_z_at_four():
    res = phase_state_resource(0.4)
    ch = oracle(STATE, res, LocationNoise(STATE, {4: pauli_channel(PauliOp.Z)}))
    assert ch.max_deviation(pauli_channel(PauliOp.Z)) <= 1e-12


@pytest.mark.parametrize("P", [PauliOp.X, PauliOp.Y, PauliOp.Z])
def test_bell_projector_identity(P):
    res = phase_state_resource(1.0)
    at4 = oracle(STATE, res, LocationNoise(STATE, {4: pauli_channel(P)}))
    at1 = oracle(STATE, res, LocationNoise(STATE, {1: pauli_channel(P)}))
    assert at4.max_deviation(at1) <= 1e-12


def test_all_shift_identities():
    results = shift_identity_checks()
    assert len(results) == 18
    assert all(r.passed for r in results), [r for r in results if not r.passed]


def test_location_seven_flip_is_z_for_phase_gates():
    res = phase_gate_resource(0.9)
    flip = orthogonal_flip(0.2)
    lhs = oracle(GATE, res, LocationNoise(GATE, {7: flip}))
    # the flip of |+> commutes through a phase gate like a Z error on its image
    assert lhs(res.bloch) == pytest.approx(conjugate(flip, res.rotation)(res.bloch))
    z_like = oracle(GATE, res, LocationNoise(GATE, {1: conjugate(flip, res.rotation)}))
    assert lhs.max_deviation(z_like) <= 1e-12


def test_engine_agreement_random():
    results = random_map_checks(20, seed=11)
    assert all(r.passed for r in results)
    assert max(r.residual for r in results) <= 1e-10


def test_knill_gamma_point_one():
    res = phase_state_resource(0.5)
    noise = knill_location_noise(0.1, STATE)
    assert oracle(STATE, res, noise).max_deviation(effective_map(noise, STATE, res).channel) <= 1e-10


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 0.9), st.sampled_from([STATE, GATE]), st.floats(0, 2 * math.pi))
def test_trace_preserved(gamma, variant, theta):
    res = phase_state_resource(theta) if variant is STATE else phase_gate_resource(theta)
    circ = build_injection_circuit(variant, res, knill_location_noise(gamma, variant))
    for b in ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)):
        st_ = run_circuit(circ, b)
        assert abs(np.trace(st_.rho) - 1) <= 1e-12
        st_.check()


def test_oracle_thresholds():
    knill = family("knill", "state")
    r = oracle_threshold(knill.noise, STATE, phase_state_resource(PI4), knill.s_max, monotone_samples=10)
    assert r.strength == pytest.approx(0.136861, abs=1e-4)
    epg = family("epg", "gate")
    g = oracle_threshold(epg.noise, GATE, phase_gate_resource(PI4), epg.s_max, monotone_samples=10)
    assert g.strength == pytest.approx(0.0300339, abs=1e-5)
    stab = oracle_threshold(knill.noise, STATE, (0, 0, 1), knill.s_max)
    assert stab.stabilizer and stab.strength == 0.0


def test_kraus_reconstructs_channel():
    ops = kraus_operators(orthogonal_flip(0.4))
    assert np.allclose(sum(K.conj().T @ K for K in ops), np.eye(2))
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    out = sum(K @ rho @ K.conj().T for K in ops)
    b = np.array([0.4, 0.2, 0.4])
    assert np.allclose([np.trace(out @ P).real for P in (PauliOp.X.matrix, PauliOp.Y.matrix, PauliOp.Z.matrix)], orthogonal_flip(0.4)(b))
    with pytest.raises(ValueError):
        kraus_operators(AffineChannel(np.diag([1.0, 1.0, -1.0]), np.zeros(3)))


def test_state_validation():
    with pytest.raises(ValueError):
        MultiQubitState(np.eye(128) / 128, list("abcdefg"))
    with pytest.raises(ValueError):
        Gate(np.ones((4, 4)), ("A", "B"))
    with pytest.raises(ValueError):
        build_injection_circuit(STATE, phase_gate_resource(0.1), LocationNoise(STATE))


@settings(max_examples=20, deadline=None)
@given(
    st.sampled_from(["knill", "epg"]),
    st.sampled_from(["state", "gate"]),
    st.sampled_from(["phase", "general"]),
    st.floats(0.0, 1.0),
    st.tuples(*(st.floats(-1, 1),) * 3).filter(lambda v: np.linalg.norm(v) > 0.1),
)
def test_engine_equals_oracle_property(model, variant, kind, frac, direction):
    from octabound.noise import resource_for_variant

    fam = family(model, variant, kind)
    v = np.array(direction) / np.linalg.norm(direction)
    if kind == "phase":
        theta = math.atan2(v[1], v[0])
        res = phase_gate_resource(theta) if variant == "gate" else phase_state_resource(theta)
    else:
        res = resource_for_variant(fam.variant, v)
    s = frac * fam.s_max
    noise = fam.noise(s, res)
    assert fam.effective(s, res).channel.max_deviation(oracle(fam.variant, res, noise)) <= 1e-10
