import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmmq.classical import (
    classical_memory,
    classical_report,
    classical_work,
    joint_distribution,
    locality_dissipation,
    to_joules,
    work_mutual_information_form,
)
from hmmq.errors import BoundViolationError
from hmmq.generators import constant, fair_coin, random_generator
from hmmq.hmm import Generator, entropy_rate_unifilar
from hmmq.info import shannon_entropy

from .oracles import entropy_bits, reversed_tensor
from .test_hmm import random_gens


def test_memory_examples(sns_a, sns_b):
    assert classical_memory(sns_a) == (1.0, pytest.approx(1.0, abs=1e-12))
    assert classical_memory(constant()) == (0.0, 0.0)
    assert classical_memory(sns_b)[1] == pytest.approx(2.71, abs=0.005)


def test_sns_a_joint_table_and_work(sns_a):
    joint = joint_distribution(sns_a)
    # rows are symbols, columns end states
    np.testing.assert_allclose(joint, [[0.25, 0.5], [0.25, 0.0]], atol=1e-12)
    assert classical_work(sns_a) == pytest.approx(1 - entropy_bits([0.25, 0.25, 0.5]), abs=1e-12)
    assert classical_work(sns_a) == pytest.approx(-0.5, abs=1e-12)


def test_work_of_renewal_generators(sns_b, sns_c):
    assert classical_work(sns_b) == pytest.approx(0.0, abs=0.005)
    assert classical_work(sns_c) == pytest.approx(-0.678, abs=0.001)


def test_locality_dissipation_examples(sns_a, sns_b, sns_c):
    h = entropy_rate_unifilar(sns_b)
    assert locality_dissipation(classical_work(sns_c), h) == pytest.approx(0.0, abs=0.002)
    assert locality_dissipation(classical_work(sns_a), h) == pytest.approx(0.178, abs=0.002)
    coin = fair_coin()
    assert classical_work(coin) == pytest.approx(-1.0, abs=1e-12)
    assert locality_dissipation(classical_work(coin), 1.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(BoundViolationError):
        locality_dissipation(-1.0, 0.5)


def test_report_serialises_flat(sns_a):
    rep = classical_report(sns_a, h_mu=0.678)
    d = rep.to_dict()
    assert set(d) == {"D", "C", "W", "dissipation"}
    assert rep.joint_dist.sum() == pytest.approx(1.0, abs=1e-10)


def test_joules_conversion():
    # one bit of work at 300 K is k_B T ln 2
    assert to_joules(1.0, 300.0) == pytest.approx(1.380649e-23 * 300 * np.log(2), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(random_gens)
def test_work_identities(gen):
    joint = joint_distribution(gen)
    assert joint.sum() == pytest.approx(1.0, abs=1e-10)
    # end-state marginal is stationary
    assert shannon_entropy(joint.sum(axis=0)) == pytest.approx(shannon_entropy(gen.stationary), abs=1e-10)
    w = classical_work(gen)
    assert w == pytest.approx(work_mutual_information_form(joint), abs=1e-10)
    assert w <= 1e-12
    d, c = classical_memory(gen)
    assert 0 <= c <= d + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 3))
def test_retrodictive_generators_are_dissipation_free(seed, ns, nx):
    gen = random_generator(np.random.default_rng(seed), ns, nx, "retrodictive")
    # the time reverse of a co-unifilar generator is unifilar, with the same entropy rate
    rev = Generator.from_tensor(reversed_tensor(gen.tensor(), gen.stationary))
    assert rev.is_unifilar
    h = entropy_rate_unifilar(rev)
    assert locality_dissipation(classical_work(gen), h) == pytest.approx(0.0, abs=1e-6)
