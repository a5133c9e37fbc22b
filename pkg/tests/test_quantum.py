import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmmq.analysis import analyze
from hmmq.classical import classical_memory, classical_work
from hmmq.errors import ConsistencyError, EncodingError, ShapeError, SpectrumError, TraceError
from hmmq.generators import fair_coin, period_two, random_generator
from hmmq.hmm import Generator, block_distribution, sample_trajectory, word_probability
from hmmq.quantum import (
    EncodingScheme,
    apply_channel,
    build_isometry,
    channel_word_distribution,
    check_gram,
    embed_states,
    encoding_from_name,
    implementation_residual,
    memory_spectrum,
    quantum_memory,
    quantum_report,
    quantum_work,
    solve_overlaps,
)
from hmmq.renewal import RenewalFamily, build_sns_B

from .oracles import binary_entropy, renewal_overlap, shared_transition_pairs, sns_phi_truncated
from .test_hmm import random_gens

small_gens = st.builds(
    lambda seed, ns, nx, kind: random_generator(np.random.default_rng(seed), ns, nx, kind),
    st.integers(0, 2**32 - 1),
    st.integers(1, 3),
    st.integers(1, 2),
    st.sampled_from(["general", "unifilar", "retrodictive"]),
)


def _channel(gen, enc=None):
    gram = solve_overlaps(gen, enc)
    emb = embed_states(gram)
    return gram, emb, build_isometry(gen, emb, enc)


def test_sns_a_overlap(sns_a):
    gram = solve_overlaps(sns_a)
    assert gram[0, 1] == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(np.diag(gram), 1.0, atol=1e-12)


def test_retrodictive_states_are_orthogonal(sns_c):
    np.testing.assert_allclose(solve_overlaps(sns_c), np.eye(sns_c.n_states), atol=1e-12)
    np.testing.assert_allclose(solve_overlaps(period_two()), np.eye(2), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(random_gens)
def test_overlap_support_matches_shared_transitions(gen):
    gram = solve_overlaps(gen)
    t = gen.tensor()
    check_gram(gram)
    for j in range(gen.n_states):
        for k in range(gen.n_states):
            shared = shared_transition_pairs(t, j, k)
            assert (abs(gram[j, k]) > 0) == bool(shared)


def test_phase_only_overlaps_match_renewal_sums():
    gen = build_sns_B(0.5, 30)
    gram = solve_overlaps(gen, EncodingScheme.phase_only())
    phi = sns_phi_truncated(0.5, 30)
    for m in range(0, 31, 3):
        for n in range(0, 31, 4):
            assert gram[m, n] == pytest.approx(renewal_overlap(phi, m, n), abs=1e-9)


def test_sns_a_memory(sns_a):
    gram = solve_overlaps(sns_a)
    np.testing.assert_allclose(np.sort(memory_spectrum(gram, sns_a.stationary)), [0.25, 0.75], atol=1e-12)
    d, c = quantum_memory(gram, sns_a.stationary)
    assert d == 1.0
    assert c == pytest.approx(binary_entropy(0.75), abs=1e-12)
    assert c == pytest.approx(0.811, abs=5e-4)


def test_sns_a_work_closed_form(sns_a):
    # the symbol-0 output block mixes sigma_0 and sigma_1 with weights 1/3, 2/3 and overlap 1/2
    expected = -0.75 * binary_entropy((1 + 1 / math.sqrt(3)) / 2)
    assert quantum_work(sns_a, solve_overlaps(sns_a)) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(-0.558, abs=5e-4)


@settings(max_examples=40, deadline=None)
@given(random_gens)
def test_identity_gram_reproduces_classical_costs(gen):
    eye = np.eye(gen.n_states)
    assert quantum_memory(eye, gen.stationary)[1] == pytest.approx(classical_memory(gen)[1], abs=1e-9)
    assert quantum_work(gen, eye) == pytest.approx(classical_work(gen), abs=1e-9)


def test_embedding_sns_a(sns_a):
    gram = solve_overlaps(sns_a)
    a = embed_states(gram)
    assert a.shape == (2, 2)
    np.testing.assert_allclose(a.conj().T @ a, gram, atol=1e-12)


def test_embedding_random_gram(rng):
    z = rng.normal(size=(4, 6)) + 1j * rng.normal(size=(4, 6))
    z /= np.linalg.norm(z, axis=0)
    gram = z.conj().T @ z
    a = embed_states(gram)
    assert a.shape == (4, 6)
    np.testing.assert_allclose(a.conj().T @ a, gram, atol=1e-10)
    with pytest.raises(SpectrumError):
        embed_states(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_isometry_sns_a(sns_a):
    gram, emb, iso = _channel(sns_a)
    v = iso.matrix
    np.testing.assert_allclose(v.conj().T @ v, np.eye(iso.memory_dim), atol=1e-12)
    # sigma_0 -> (|sigma_0>|0>|0> + |sigma_1>|0>|1>) / sqrt(2)
    out = (v @ emb[:, 0]).reshape(iso.memory_dim, 2, 2)
    expected = np.einsum("r,x,a->rxa", emb[:, 0], [1, 0], [1, 0]) + np.einsum(
        "r,x,a->rxa", emb[:, 1], [1, 0], [0, 1]
    )
    np.testing.assert_allclose(out, expected / math.sqrt(2), atol=1e-12)
    u = iso.unitary()
    np.testing.assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)
    kraus = iso.kraus_operators()
    np.testing.assert_allclose(sum(k.conj().T @ k for k in kraus), np.eye(iso.memory_dim), atol=1e-12)


def test_isometry_rejects_wrong_embedding(sns_a):
    with pytest.raises(ConsistencyError):
        build_isometry(sns_a, np.eye(2))
    with pytest.raises(ShapeError):
        build_isometry(sns_a, np.eye(3))


def test_channel_from_basis_state(sns_a):
    _, emb, iso = _channel(sns_a)
    rho0 = np.outer(emb[:, 0], emb[:, 0].conj())
    out = apply_channel(iso, rho0)
    d = iso.memory_dim
    blocks = out.reshape(d, 2, d, 2)
    # only symbol 0 is possible; memory is an equal mixture of sigma_0 and sigma_1
    assert np.trace(blocks[:, 1, :, 1]) == pytest.approx(0.0, abs=1e-12)
    target = 0.5 * (rho0 + np.outer(emb[:, 1], emb[:, 1].conj()))
    np.testing.assert_allclose(blocks[:, 0, :, 0], target, atol=1e-12)
    assert np.trace(out) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(small_gens)
def test_stationary_memory_is_a_fixed_point(gen):
    _, emb, iso = _channel(gen)
    rho = emb @ np.diag(gen.stationary) @ emb.conj().T
    out = apply_channel(iso, rho)
    d, nx = iso.memory_dim, iso.n_symbols
    memory = np.einsum("ixjx->ij", out.reshape(d, nx, d, nx))
    np.testing.assert_allclose(memory, rho, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(small_gens, st.integers(1, 6))
def test_channel_words_match_generator(gen, L):
    _, emb, iso = _channel(gen)
    rho = emb @ np.diag(gen.stationary) @ emb.conj().T
    np.testing.assert_allclose(channel_word_distribution(iso, rho, L), block_distribution(gen, L).ravel(), atol=1e-9)
    assert implementation_residual(gen, emb, iso) < 1e-9


def test_channel_rejects_bad_density(sns_a):
    _, _, iso = _channel(sns_a)
    with pytest.raises(TraceError):
        apply_channel(iso, np.eye(2))
    with pytest.raises(ShapeError):
        apply_channel(iso, np.eye(3) / 3)


def test_channel_word_probabilities_sns_a(sns_a):
    _, emb, iso = _channel(sns_a)
    rho = emb @ np.diag(sns_a.stationary) @ emb.conj().T
    dist = channel_word_distribution(iso, rho, 2)
    # words 00, 01, 10, 11
    expected = [word_probability(sns_a, w) for w in ("00", "01", "10", "11")]
    np.testing.assert_allclose(dist, expected, atol=1e-12)
    assert dist[3] == pytest.approx(0.0, abs=1e-14)


def test_custom_encoding_matches_end_state(sns_a):
    def psi(s, t, x):
        v = np.zeros(2)
        v[t] = 1.0
        return v

    custom = EncodingScheme.custom(psi, 2)
    np.testing.assert_allclose(solve_overlaps(sns_a, custom), solve_overlaps(sns_a), atol=1e-11)
    _, emb, iso = _channel(sns_a, custom)
    assert implementation_residual(sns_a, emb, iso) < 1e-9


def test_encoding_errors(sns_a, sns_b):
    with pytest.raises(EncodingError):
        solve_overlaps(sns_a, EncodingScheme.phase_only())
    with pytest.raises(EncodingError):
        solve_overlaps(sns_b, EncodingScheme.phase_only(np.zeros((2, 2))))
    same = EncodingScheme.custom(lambda s, t, x: np.array([1.0, 0.0]), 2)
    with pytest.raises(EncodingError):
        solve_overlaps(sns_a, same)
    with pytest.raises(EncodingError):
        encoding_from_name("bogus")


def test_complex_phases_keep_channel_consistent():
    gen = random_generator(np.random.default_rng(7), 3, 2, "unifilar")
    phases = np.random.default_rng(8).uniform(0, 2 * np.pi, size=(3, 2))
    enc = EncodingScheme.phase_only(phases)
    gram = solve_overlaps(gen, enc)
    check_gram(gram)
    emb = embed_states(gram)
    iso = build_isometry(gen, emb, enc)
    assert implementation_residual(gen, emb, iso) < 1e-9
    rho = emb @ np.diag(gen.stationary) @ emb.conj().T
    np.testing.assert_allclose(channel_word_distribution(iso, rho, 4), block_distribution(gen, 4).ravel(), atol=1e-9)


def test_sampling(sns_a):
    assert sample_trajectory(sns_a, 0, seed=1) == ()
    assert sample_trajectory(sns_a, 50, seed=3) == sample_trajectory(sns_a, 50, seed=3)
    traj = sample_trajectory(sns_a, 1_000_000, seed=11)
    assert traj.count("1") / len(traj) == pytest.approx(0.25, abs=0.002)
    assert "11" not in "".join(traj[:10000])


def test_report_spectrum_matches_dense_state(sns_a):
    rep = quantum_report(sns_a, embed=True)
    a = rep.state_vectors
    rho = a @ np.diag(sns_a.stationary) @ a.conj().T
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(rho))[::-1], rep.spectrum, atol=1e-12)
    assert rep.rank == 2
    assert set(rep.to_dict()) >= {"D", "C", "W", "rank", "gram", "spectrum"}


@settings(max_examples=60, deadline=None)
@given(random_gens)
def test_cost_ordering_properties(gen):
    bundle = analyze(gen, L_max=6)
    c, q = bundle.classical, bundle.quantum
    assert q.C <= c.C + 1e-9
    assert q.W <= c.W + 1e-9
    assert q.C <= q.D + 1e-9
    if bundle.is_retrodictive:
        assert q.C == pytest.approx(c.C, abs=1e-9)
    # a work saving needs overlapping states, hence a memory saving
    if c.W - q.W > 1e-6:
        assert c.C - q.C > 1e-6
    checks = dict(bundle.checks)
    checks.pop("memory_work_sign_agreement")
    assert all(checks.values())


def test_memory_saving_without_work_saving():
    # every state is entered by a single symbol, and the one overlapping pair
    # (s1, s3) only ever appears inside the same symbol's output block
    t = np.zeros((2, 4, 4))
    t[0, 2, 1] = 1.0
    t[0, 0, 2] = 1.0
    t[0, 2, 3] = 0.6
    t[1, 3, 0] = 1.0
    t[1, 1, 3] = 0.4
    gen = Generator.from_tensor(t)
    bundle = analyze(gen)
    c, q = bundle.classical, bundle.quantum
    assert c.C - q.C > 0.1
    assert c.W == pytest.approx(0.0, abs=1e-12)
    assert q.W == pytest.approx(c.W, abs=1e-12)
    assert not bundle.checks["memory_work_sign_agreement"]


def test_fair_coin_costs_nothing():
    rep = quantum_report(fair_coin())
    assert (rep.D, rep.C) == (0.0, 0.0)
    assert rep.W == pytest.approx(-1.0, abs=1e-12)
