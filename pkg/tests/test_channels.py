import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from octabound.channels import (
    IDENTITY,
    AffineChannel,
    PauliOp,
    apply,
    choi_psd_check,
    compose,
    conjugate,
    depolarizing,
    mix_with,
    opposite_noise,
    orthogonal_flip,
    pauli_channel,
    pauli_mixture,
    pauli_probabilities,
    unitary_channel,
)
from octabound.qubit import BlochVector

R = 1 / math.sqrt(2)
X, Y, Z = (pauli_channel(P) for P in (PauliOp.X, PauliOp.Y, PauliOp.Z))
probs = st.floats(0.0, 1.0)


def random_unit(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_unitary(rng):
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    Q, _ = np.linalg.qr(A)
    return Q


def test_pauli_channel_examples():
    assert np.allclose(Z((R, R, 0)), (-R, -R, 0))
    assert np.allclose(X((0, 0, 1)), (0, 0, -1))
    s = 1 / math.sqrt(3)
    assert np.allclose(Y((s, s, s)), (-s, s, -s))


def test_pauli_products():
    assert compose(X, Z).allclose(Y) and compose(Z, X).allclose(Y)
    for P in PauliOp:
        for Q in PauliOp:
            assert compose(pauli_channel(P), pauli_channel(Q)).allclose(pauli_channel(P.then(Q)))


def test_mix_with_examples():
    p = 0.13
    assert np.allclose(mix_with(Z, p).M, np.diag([1 - 2 * p, 1 - 2 * p, 1]))
    assert mix_with(depolarizing(), 0.3).allclose(AffineChannel(0.7 * np.eye(3), np.zeros(3)))
    assert mix_with(X, 0).allclose(IDENTITY)
    with pytest.raises(ValueError):
        mix_with(Z, 1.5)


def test_opposite_noise_examples():
    s = np.array([R, R, 0])
    t = 0.2
    assert np.allclose(opposite_noise(s, t)(s), (1 - 2 * t) * s)
    assert np.allclose(opposite_noise((1, 0, 0), 0.5)((1, 0, 0)), 0)
    twice = compose(opposite_noise(s, t), opposite_noise(s, t))
    assert np.allclose(twice(s), ((1 - t) * (1 - 2 * t) - t) * s)
    with pytest.raises(ValueError):
        opposite_noise((0.5, 0, 0), 0.1)


def test_depolarizing_examples():
    D = depolarizing()
    assert np.allclose(D((1, 0, 0)), 0)
    assert compose(D, D).allclose(D)
    U = unitary_channel(random_unitary(np.random.default_rng(1)))
    assert compose(D, U).allclose(compose(U, D))


def test_compose_and_apply_examples():
    p = 0.1
    assert compose(mix_with(Z, p), mix_with(Z, p)).M[0, 0] == pytest.approx((1 - 2 * p) ** 2)
    A = opposite_noise((0, 1, 0), 0.3)
    assert compose(IDENTITY, A).allclose(A)
    assert apply(IDENTITY, BlochVector(0.1, 0.2, 0.3)) == BlochVector(0.1, 0.2, 0.3)
    assert np.allclose(apply(mix_with(Z, 0.25), (1, 0, 0)).as_array(), (0.5, 0, 0))


def test_choi_examples():
    assert all(choi_psd_check(mix_with(Z, p)) for p in np.linspace(0, 1, 11))
    assert all(choi_psd_check(opposite_noise((0.6, 0, 0.8), t)) for t in np.linspace(0, 1, 11))
    transpose = AffineChannel(np.diag([1.0, 1.0, -1.0]), np.zeros(3))
    assert not choi_psd_check(transpose)


def test_orthogonal_flip_cp_range():
    assert choi_psd_check(orthogonal_flip(2 / 3))
    with pytest.raises(ValueError):
        orthogonal_flip(0.7)


def test_pauli_probabilities_round_trip():
    dist = {PauliOp.I: 0.55, PauliOp.X: 0.2, PauliOp.Y: 0.15, PauliOp.Z: 0.1}
    back = pauli_probabilities(pauli_mixture(dist))
    assert all(back[P] == pytest.approx(dist[P], abs=1e-15) for P in PauliOp)
    with pytest.raises(ValueError):
        pauli_probabilities(opposite_noise((1, 0, 0), 0.1))


@settings(max_examples=40)
@given(probs, st.integers(0, 3))
def test_mix_with_is_affine_in_t(t, k):
    Q = [X, Y, Z, depolarizing()][k]
    ch = mix_with(Q, t)
    assert np.allclose(ch.M, (1 - t) * np.eye(3) + t * Q.M, atol=1e-15)
    assert np.allclose(ch.c, t * Q.c, atol=1e-15)


@settings(max_examples=30)
@given(st.lists(probs, min_size=4, max_size=4).filter(lambda w: sum(w) > 0), st.lists(probs, min_size=4, max_size=4).filter(lambda w: sum(w) > 0))
def test_pauli_mixtures_commute(w1, w2):
    A = pauli_mixture({P: w / sum(w1) for P, w in zip(PauliOp, w1)})
    B = pauli_mixture({P: w / sum(w2) for P, w in zip(PauliOp, w2)})
    assert compose(A, B).allclose(compose(B, A), atol=1e-15)


def _constructor_outputs(rng):
    for t in np.linspace(0, 1, 6):
        yield mix_with(X, t)
        yield mix_with(Y, t)
        yield mix_with(Z, t)
        yield mix_with(depolarizing(), t)
        yield opposite_noise(random_unit(rng, 1)[0], t)
        yield orthogonal_flip(min(t, 2 / 3))
    yield unitary_channel(random_unitary(rng))
    yield conjugate(orthogonal_flip(0.3), unitary_channel(random_unitary(rng)).M)


def test_constructors_cptp_and_contractive():
    rng = np.random.default_rng(3)
    pts = random_unit(rng, 1000)
    for ch in _constructor_outputs(rng):
        assert choi_psd_check(ch)
        out = pts @ ch.M.T + ch.c
        assert np.max(np.linalg.norm(out, axis=1)) <= 1 + 1e-12


def test_compose_associative():
    rng = np.random.default_rng(5)
    chans = list(_constructor_outputs(rng))
    for _ in range(50):
        a, b, c = (chans[i] for i in rng.integers(len(chans), size=3))
        assert compose(compose(a, b), c).max_deviation(compose(a, compose(b, c))) <= 1e-14
