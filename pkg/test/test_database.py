import logging
import numpy as np
import pytest
from pmlpy.prob import Pmf, Channel, AlphabetError
from pmlpy.database import (DatabaseSchema, DatabaseMechanism, DatabasePrior, SizeGuardError, FORMULATIONS,
                            dp_epsilon, free_lunch_epsilon, entry_joint, entry_pml, database_pml,
                            conditional_entry_pml, product_target_prior, conditional_entry_prior,
                            correlated_entry_kernel, joint_target_prior, correlated_prior, adversarial_prior,
                            pml_supremum, verify_equivalences, SupremumTrace, EquivalenceReport)
from pmlpy.setuplog import setuplog


LOG3 = np.log(3)


def flip(q=0.25):
    return Channel([0, 1], [0, 1], [[1 - q, q], [q, 1 - q]])


def flip_first_entry():
    return DatabaseMechanism.from_entry_channel(DatabaseSchema([0, 1], 2), 0, flip())


def flip_xor():
    schema = DatabaseSchema([0, 1], 2)
    xor = DatabaseMechanism.from_function(schema, lambda d: d[0] ^ d[1], [0, 1])
    return DatabaseMechanism(schema, Channel(schema.labels, [0, 1], xor.channel.matrix @ flip().matrix))


def test_schema():
    schema = DatabaseSchema([0, 1], 2)
    assert schema.labels == ('0,0', '0,1', '1,0', '1,1')
    assert schema.database_index((1, 0)) == 2
    assert schema.rest_index(1, (1,)) == 1
    assert schema.rest_labels() == ('0', '1')
    with pytest.raises(ValueError):
        schema.check_entry(2)
    with pytest.raises(SizeGuardError):
        DatabaseSchema([0, 1], 13)
    with pytest.raises(ValueError):
        DatabaseSchema([0], 3)


def test_mechanism_relabels_channel():
    schema = DatabaseSchema([0, 1], 2)
    m = DatabaseMechanism(schema, Channel(range(4), [0, 1], np.full((4, 2), 0.5)))
    assert m.channel.input_labels == schema.labels
    with pytest.raises(AlphabetError):
        DatabaseMechanism(schema, flip())


def test_from_entry_channel():
    m = flip_first_entry()
    assert m.channel.row('1,0').probs == pytest.approx([0.25, 0.75])
    assert m.channel.row('0,1').probs == pytest.approx([0.75, 0.25])
    assert m.entry_view(1).shape == (2, 2, 2)


def test_dp_and_flp():
    m = flip_first_entry()
    assert dp_epsilon(m) == pytest.approx(LOG3, abs=1e-12)
    assert free_lunch_epsilon(m) == pytest.approx(LOG3, abs=1e-12)
    m = flip_xor()
    assert dp_epsilon(m) == pytest.approx(LOG3, abs=1e-12)
    assert free_lunch_epsilon(m) == pytest.approx(LOG3, abs=1e-12)


def test_dp_below_flp():
    schema = DatabaseSchema([0, 1], 2)
    counts = np.array([0, 1, 1, 2])
    rows = 2. ** -np.abs(np.arange(3)[None, :] - counts[:, None])
    m = DatabaseMechanism(schema, Channel(schema.labels, [0, 1, 2], rows / rows.sum(axis=1, keepdims=True)))
    assert dp_epsilon(m) == pytest.approx(np.log(16 / 7))
    assert free_lunch_epsilon(m) == pytest.approx(np.log(4))


def test_priors():
    schema = DatabaseSchema([0, 1], 2)
    prior = DatabasePrior.uniform(schema)
    assert prior.probs == pytest.approx(np.full(4, 0.25))
    assert prior.marginal(1).probs == pytest.approx([0.5, 0.5])
    explicit = DatabasePrior.explicit(schema, [0.4, 0.1, 0.2, 0.3])
    assert explicit.marginal(0).probs == pytest.approx([0.5, 0.5])
    assert explicit.conditional(0, (1,)).probs == pytest.approx([0.25, 0.75])
    with pytest.raises(ValueError):
        DatabasePrior.explicit(schema, [0.5, 0.5, 0., 0.])
    with pytest.raises(ValueError):
        DatabasePrior(schema)


def test_entry_pml():
    m = flip_first_entry()
    prior = DatabasePrior.uniform(m.schema)
    for y in (0, 1):
        assert entry_pml(m, prior, 0, y) == pytest.approx(np.log(1.5))
        assert entry_pml(m, prior, 1, y) == pytest.approx(0, abs=1e-12)
    assert database_pml(m, prior, 0) == pytest.approx(np.log(1.5))
    assert entry_joint(m, prior, 0).channel.matrix == pytest.approx(flip().matrix)


def test_conditional_entry_pml():
    m = flip_first_entry()
    prior = DatabasePrior.uniform(m.schema)
    for d in (0, 1):
        assert conditional_entry_pml(m, prior, 0, (d,), 0) == pytest.approx(np.log(1.5))
        assert conditional_entry_pml(m, prior, 1, (d,), 0) == pytest.approx(0, abs=1e-12)


def test_prior_schema_mismatch():
    m = flip_first_entry()
    with pytest.raises(AlphabetError):
        entry_pml(m, DatabasePrior.uniform(DatabaseSchema([0, 1], 3)), 0, 0)


def test_product_target_prior():
    schema = DatabaseSchema([0, 1], 2)
    prior = product_target_prior(schema, (0, 0), 0.1)
    assert prior.probs == pytest.approx([0.81, 0.09, 0.09, 0.01])
    prior = product_target_prior(schema, (1, 1), 0.1)
    assert prior.to_pmf().prob('1,1') == pytest.approx(0.81)
    assert sorted(prior.probs) == pytest.approx([0.01, 0.09, 0.09, 0.81])
    with pytest.raises(ValueError):
        product_target_prior(schema, (1,), 0.1)
    with pytest.raises(ValueError):
        product_target_prior(schema, (1, 1), 0.)


def test_conditional_entry_prior():
    m = flip_first_entry()
    pmf = conditional_entry_prior(m, 0, (0,), 0, 0.1)
    assert pmf.probs == pytest.approx([0.1, 0.9])


def test_correlated_prior():
    m = flip_first_entry()
    kernel = correlated_entry_kernel(m, 1, 0, 1, 0, 0.1)
    assert kernel.shape == (2, 2)
    entry = Pmf([0, 1], [0.1, 0.9])
    prior = correlated_prior(m, 1, entry, kernel)
    assert prior.probs.sum() == pytest.approx(1)
    assert prior.marginal(1).probs == pytest.approx([0.1, 0.9])


def test_joint_target_prior():
    m = flip_xor()
    prior = joint_target_prior(m, 0, 0.3)
    # first database least likely to produce 0 is 0,1
    assert prior.to_pmf().prob('0,1') == pytest.approx(0.7)
    assert prior.to_pmf().prob('1,1') == pytest.approx(0.1)


def test_adversarial_prior_dispatch():
    schema = DatabaseSchema([0, 1], 2)
    prior = adversarial_prior('product-target', {'schema': schema, 'target': (0, 0)}, 0.1)
    assert prior.probs == pytest.approx([0.81, 0.09, 0.09, 0.01])
    m = flip_first_entry()
    assert adversarial_prior('joint-target', {'mechanism': m, 'y': 1}, 0.1).kind == 'explicit'
    with pytest.raises(ValueError):
        adversarial_prior('uniform', {}, 0.1)
    with pytest.raises(ValueError):
        adversarial_prior('conditional-entry', {'mechanism': m}, 0.1)


def test_supremum_traces_flip_first_entry():
    m = flip_first_entry()
    for f in ('dp-entry-product', 'flp-joint-product'):
        trace = pml_supremum(m, f)
        assert trace.is_monotone()
        assert trace.below_target()
        assert LOG3 - trace.limit < 1e-4
    frame = trace.to_frame()
    assert list(frame.columns) == ['formulation', 'eps', 'value', 'trace']
    with pytest.raises(ValueError):
        pml_supremum(m, 'dp-unknown')
    with pytest.raises(ValueError):
        pml_supremum(m, 'flp-joint', eps_sequence=(0.01, 0.1))


def test_verify_equivalences():
    logger = setuplog()
    report = verify_equivalences(flip_xor(), logger=logger.Equivlog)
    assert report.all_passed
    assert set(report.gaps) == set(FORMULATIONS)
    assert max(report.gaps.values()) < 1e-4
    assert min(report.gaps.values()) > 0
    assert report.to_frame().shape == (6, 6)


def test_supremum_trace_rejects_decreasing_values():
    trace = SupremumTrace('dp-conditional', (0.1, 0.01, 0.001), [0.9, 0.2, 0.1], 1.0)
    assert not trace.is_monotone()
    assert trace.limit == pytest.approx(0.9)
    assert SupremumTrace('dp-conditional', (0.1, 0.01, 0.001), [0.2, 0.5, 0.9], 1.0).is_monotone()
    report = EquivalenceReport(1.0, 1.0, {'dp-conditional': trace}, tol=0.2)
    assert not report.passed['dp-conditional']
    assert not report.all_passed


def test_verify_equivalences_logs_by_default(caplog):
    with caplog.at_level(logging.INFO, logger='Equiv'):
        report = verify_equivalences(flip_first_entry(), eps_sequence=(0.1, 0.01, 0.001))
    records = [r for r in caplog.records if r.name == 'Equiv']
    assert len(records) == 1 + len(FORMULATIONS)
    assert report.dp_eps == pytest.approx(LOG3)


def test_unbounded_parameters():
    m = DatabaseMechanism.from_entry_channel(DatabaseSchema([0, 1], 2), 0, Channel.identity([0, 1]))
    assert dp_epsilon(m) == np.inf
    report = verify_equivalences(m, eps_sequence=(0.1, 0.01, 0.001))
    assert report.unbounded
    for trace in report.traces.values():
        assert trace.below_target()
        assert np.all(np.isfinite(trace.values))


def test_correlation_raises_entry_leakage():
    m = flip_first_entry()
    assert entry_pml(m, DatabasePrior.uniform(m.schema), 1, 0) == pytest.approx(0, abs=1e-12)
    delta = 1e-4
    prior = DatabasePrior.explicit(m.schema, [0.5 - delta, delta, delta, 0.5 - delta])
    value = entry_pml(m, prior, 1, 0)
    assert value == pytest.approx(np.log(1.5), abs=1e-3)
    assert value <= -np.log(prior.marginal(1).probs.min())
