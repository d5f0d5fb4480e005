import numpy as np
import pytest
from hypothesis import given, assume, settings
from hypothesis import strategies as st
from pmlpy.prob import Pmf, Channel, Joint, AlphabetError, posterior, renyi_div_inf
from pmlpy.leakage import (pml, pml_profile, pml_randomized_function_lower, conditional_pml, leakage_capacity,
                           epsilon_max, induced_joint, deterministic_kernels, kernel_bank_posteriors,
                           PriorSet, check_eps_pml, LeakageProfile)
from pmlpy.database import DatabaseSchema
from pmlpy.mechanisms import randomized_response


def flip(q=0.25):
    return Channel([0, 1], [0, 1], [[1 - q, q], [q, 1 - q]])


@st.composite
def pmfs(draw, size):
    weights = draw(st.lists(st.floats(0.05, 1.0), min_size=size, max_size=size))
    return Pmf(list(range(size)), np.asarray(weights) / np.sum(weights))


@st.composite
def instances(draw, zeros=False):
    nx = draw(st.integers(2, 4))
    ny = draw(st.integers(2, 4))
    low = 0. if zeros else 0.05
    rows = []
    for _ in range(nx):
        row = draw(st.lists(st.floats(low, 1.0), min_size=ny, max_size=ny))
        assume(sum(row) > 0.1)
        rows.append(np.asarray(row) / np.sum(row))
    c = Channel(list(range(nx)), ['y{}'.format(i) for i in range(ny)], rows)
    return c, draw(pmfs(nx))


def test_flip_pml():
    j = Joint(flip(), Pmf.uniform([0, 1]))
    assert pml(j, 0) == pytest.approx(np.log(1.5))
    profile = pml_profile(j)
    assert profile.sup == pytest.approx(0.405465, abs=1e-6)
    assert profile.witness == 0
    frame = profile.to_frame()
    assert list(frame.columns) == ['outcome', 'pml']
    assert frame.shape[0] == 2


def test_constant_channel_leaks_nothing():
    c = Channel.constant([0, 1, 2], ['a', 'b'], 'a')
    profile = pml_profile(Joint(c, Pmf([0, 1, 2], [0.2, 0.3, 0.5])))
    assert profile.sup == 0
    assert profile.per_outcome['b'] == 0
    assert leakage_capacity(c) == 0


def test_degenerate_prior_leaks_nothing():
    j = Joint(flip(), Pmf.degenerate([0, 1], 1))
    assert pml_profile(j).sup == 0


def test_pml_ignores_zero_prior_rows():
    c = Channel([0, 1, 2], [0, 1], [[0.75, 0.25], [0.25, 0.75], [1., 0.]])
    j = Joint(c, Pmf([0, 1, 2], [0.5, 0.5, 0.]))
    assert pml(j, 0) == pytest.approx(np.log(1.5))


def test_identity_channel_pml_is_eps_max():
    prior = Pmf(['a', 'b', 'c'], [0.5, 0.3, 0.2])
    profile = pml_profile(Joint(Channel.identity(prior.labels), prior))
    assert profile.sup == pytest.approx(epsilon_max(prior))
    assert profile.witness == 'c'


def test_capacity():
    assert leakage_capacity(flip()) == pytest.approx(1.098612, abs=1e-6)
    assert leakage_capacity(randomized_response(3, 0.5)) == pytest.approx(np.log(2))
    assert leakage_capacity(Channel([0, 1], [0, 1], [[1, 0], [0.5, 0.5]])) == np.inf
    assert leakage_capacity(Channel.identity([0, 1])) == np.inf


def test_epsilon_max():
    assert epsilon_max(Pmf.uniform([0, 1])) == pytest.approx(np.log(2))
    with pytest.raises(ValueError):
        epsilon_max(Pmf.degenerate([0, 1], 0))


def test_randomized_function_lower():
    j = Joint(flip(), Pmf.uniform([0, 1]))
    assert pml_randomized_function_lower(j, 0, Channel.identity([0, 1])) == pytest.approx(np.log(1.5))
    assert pml_randomized_function_lower(j, 0, Channel.constant([0, 1], ['u'], 'u')) == 0
    with pytest.raises(AlphabetError):
        pml_randomized_function_lower(j, 0, Channel.identity(['a', 'b']))


def test_conditional_pml():
    j = Joint(flip(), Pmf.uniform([0, 1]))
    assert conditional_pml(j, Pmf([0, 1], [0.9, 0.1]), 1) == pytest.approx(np.log(0.75 / 0.3))


def test_induced_joint_identity():
    j = Joint(flip(), Pmf([0, 1], [0.3, 0.7]))
    ju = induced_joint(j, Channel.identity([0, 1]))
    assert ju.channel.matrix == pytest.approx(j.channel.matrix)
    assert pml_profile(ju).sup == pytest.approx(pml_profile(j).sup)


def test_deterministic_kernels():
    bank = deterministic_kernels(4)
    assert bank.shape == (354, 4, 4)
    assert np.all(bank.sum(axis=2) == 1)
    assert deterministic_kernels(2).shape == (5, 2, 2)


def test_kernel_bank_posteriors():
    j = Joint(flip(), Pmf([0, 1], [0.3, 0.7]))
    bank = deterministic_kernels(2)
    p_u, q_u = kernel_bank_posteriors(j, bank)
    assert p_u.sum(axis=1) == pytest.approx(np.ones(len(bank)))
    # map x -> x is the identity attribute
    ident = [k for k in range(len(bank)) if np.array_equal(bank[k], np.eye(2))][0]
    assert q_u[ident, 0] == pytest.approx(posterior(j, 0).probs)


def test_check_eps_pml_explicit():
    cert = check_eps_pml(flip(), [Pmf.uniform([0, 1])], 0.5)
    assert cert.holds
    assert cert.label == 'exact'
    cert = check_eps_pml(flip(), [Pmf.uniform([0, 1])], 0.40)
    assert not cert.holds
    assert cert.worst_value == pytest.approx(0.405465, abs=1e-6)
    with pytest.raises(ValueError):
        check_eps_pml(flip(), [], 0.5)
    with pytest.raises(AlphabetError):
        check_eps_pml(flip(), [Pmf.uniform(['a', 'b'])], 0.5)


def test_check_eps_pml_simplex():
    cert = check_eps_pml(flip(), PriorSet.simplex([0, 1], resolution=10), np.log(3))
    assert cert.holds
    assert cert.label == 'grid/sequence lower estimate'
    assert cert.worst_value == pytest.approx(np.log(2.5))


def test_prior_set_explicit_rejects_partial_support():
    with pytest.raises(ValueError):
        PriorSet.explicit([Pmf.degenerate([0, 1], 0)])


def test_prior_set_product():
    schema = DatabaseSchema([0, 1], 2)
    members = list(PriorSet.product(schema, resolution=4, eps_sequence=(0.1, 0.01)))
    # 3 x 3 lattice products and one product per target database and eps
    assert len(members) == 9 + 2 * 4
    assert all(m.is_full_support() for m in members)


def test_prior_set_predicate():
    schema = DatabaseSchema(['a', 'b', 'c'], 2)
    family = PriorSet.predicate(schema, ['c'], 0.2)
    ps = family.params['p_values']
    assert all(0.2 < p < 0.8 for p in ps)
    assert min(ps) == pytest.approx(0.2 + 1e-6)
    for member in family:
        assert member.labels == schema.labels
        assert member.is_full_support()
    with pytest.raises(ValueError):
        PriorSet.predicate(schema, ['a', 'b', 'c'], 0.2)


@settings(max_examples=200, deadline=None)
@given(instances(zeros=True))
def test_pml_bounded_by_capacity(inst):
    c, prior = inst
    profile = pml_profile(Joint(c, prior))
    assert min(profile.per_outcome.values()) >= 0
    assert profile.sup <= leakage_capacity(c) + 1e-9


@settings(max_examples=200, deadline=None)
@given(instances())
def test_pml_is_posterior_divergence(inst):
    c, prior = inst
    j = Joint(c, prior)
    for y in c.output_labels:
        assert pml(j, y) == pytest.approx(renyi_div_inf(posterior(j, y), prior), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(instances(), st.data())
def test_attribute_gain_dominated(inst, data):
    c, prior = inst
    j = Joint(c, prior)
    images = data.draw(st.lists(st.integers(0, 2), min_size=len(prior), max_size=len(prior)))
    u_kernel = Channel.from_function(prior.labels, lambda x: images[x])
    for y in c.output_labels:
        assert pml_randomized_function_lower(j, y, u_kernel) <= pml(j, y) + 1e-9
        assert pml(induced_joint(j, u_kernel), y) <= pml(j, y) + 1e-9


@settings(max_examples=200, deadline=None)
@given(instances(zeros=True))
def test_pml_bounded_by_least_likely_symbol(inst):
    c, prior = inst
    assert pml_profile(Joint(c, prior)).sup <= epsilon_max(prior) + 1e-9


@settings(max_examples=100, deadline=None)
@given(instances())
def test_posteriors_average_to_prior(inst):
    c, prior = inst
    j = Joint(c, prior)
    total = sum(j.marginal_probs[j.output_index(y)] * posterior(j, y).probs for y in c.output_labels)
    assert total == pytest.approx(prior.probs, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(pmfs(3), st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3))
def test_no_leakage_when_rows_agree(prior, row):
    row = np.asarray(row) / np.sum(row)
    c = Channel(prior.labels, ['a', 'b', 'c'], [row] * len(prior))
    profile = pml_profile(Joint(c, prior))
    assert max(profile.per_outcome.values()) == pytest.approx(0., abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(instances())
def test_leakage_when_rows_differ(inst):
    c, prior = inst
    assume(np.ptp(c.matrix, axis=0).max() > 1e-3)
    assert pml_profile(Joint(c, prior)).sup > 0


def test_profile_accepts_pair_iterables():
    profile = LeakageProfile(iter([(0, 0.1), (1, 0.4)]))
    assert profile.sup == pytest.approx(0.4)
    assert profile.witness == 1
    profile = pml_profile(Joint(randomized_response(3, 0.5), Pmf.uniform([0, 1, 2])))
    assert len(profile.per_outcome) == 3
    assert profile.sup == pytest.approx(np.log(1.5))
    with pytest.raises(ValueError):
        LeakageProfile(iter([]))
