import itertools
import numpy as np
import pandas as pd
from scipy.special import comb
from pmlpy.prob import (Pmf, Channel, Joint, AlphabetError, SUPPORT_FLOOR, posterior,
                        push_forward, product_probs, _tie_first)


DEFAULT_EPS_SEQUENCE = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
MAX_FAMILY_SIZE = 20000


class LeakageProfile(object):
    """PML of every outcome of a joint distribution.

    :param per_outcome: Outcome label mapped to its leakage in nats
    :type per_outcome: dict
    """
    def __init__(self, per_outcome):
        self.per_outcome = dict(per_outcome)
        if len(self.per_outcome) == 0:
            raise ValueError('per_outcome should not be empty')
        labels = list(self.per_outcome.keys())
        values = np.array([self.per_outcome[y] for y in labels])
        if np.any(values < 0):
            raise ValueError('PML values should be non-negative')
        self.sup = float(values.max())
        self.witness = _tie_first(labels, values)

    def to_frame(self):
        return pd.DataFrame({'outcome': list(self.per_outcome.keys()),
                             'pml': list(self.per_outcome.values())})

    def __repr__(self):
        return 'LeakageProfile(sup={:.6f}, witness={!r})'.format(self.sup, self.witness)


def _pml_values(prior_probs, matrix, support=None):
    """Per-outcome PML for a prior vector and a row-stochastic matrix"""
    if support is None:
        support = prior_probs > SUPPORT_FLOOR
    marginal = prior_probs @ matrix
    colmax = matrix[support].max(axis=0)
    values = np.zeros(matrix.shape[1])
    live = marginal > SUPPORT_FLOOR
    values[live] = np.log(colmax[live]) - np.log(marginal[live])
    return np.maximum(values, 0.)


def pml(j, y):
    yi = j.output_index(y)
    return float(_pml_values(j.prior.probs, j.channel.matrix, j.prior.support)[yi])


def pml_profile(j):
    values = _pml_values(j.prior.probs, j.channel.matrix, j.prior.support)
    return LeakageProfile(zip(j.output_labels, values.tolist()))


def pml_randomized_function_lower(j, y, u_kernel):
    """Posterior-to-prior gain of the MAP guess of one attribute ``U``.

    Evaluates the guessing gain for the single kernel ``P_U|X`` given by
    ``u_kernel``; the PML of ``y`` is the supremum of this over all kernels.
    """
    if u_kernel.input_labels != j.prior.labels:
        raise AlphabetError('u_kernel inputs {} do not match prior alphabet {}'.format(
                            list(u_kernel.input_labels), list(j.prior.labels)))
    p_u = push_forward(u_kernel, j.prior)
    q_u = push_forward(u_kernel, posterior(j, y))
    return float(np.log(q_u.probs.max()) - np.log(p_u.probs.max()))


def conditional_pml(j_given_z, prior_given_z, y):
    return pml(Joint(j_given_z.channel, prior_given_z), y)


def _matrix_capacity(matrix):
    positive = matrix > SUPPORT_FLOOR
    live = positive.any(axis=0)
    if not np.all(positive[:, live]):
        return np.inf
    if not np.any(live):
        return 0.
    sub = matrix[:, live]
    return float(max(np.max(np.log(sub.max(axis=0)) - np.log(sub.min(axis=0))), 0.))


def leakage_capacity(c):
    return _matrix_capacity(c.matrix)


def epsilon_max(marginal):
    if not marginal.is_full_support():
        raise ValueError('epsilon_max needs a full-support marginal, got {}'.format(marginal))
    return float(-np.log(marginal.probs.min()))


def induced_joint(j, u_kernel):
    """Joint of ``(U, Y)`` for the Markov chain ``U - X - Y``"""
    if u_kernel.input_labels != j.prior.labels:
        raise AlphabetError('u_kernel inputs {} do not match prior alphabet {}'.format(
                            list(u_kernel.input_labels), list(j.prior.labels)))
    p_u = push_forward(u_kernel, j.prior)
    weights = j.prior.probs[:, None] * u_kernel.matrix
    joint_uy = weights.T @ j.channel.matrix
    rows = np.tile(j.marginal_probs, (len(p_u), 1))
    live = p_u.probs > 0
    rows[live] = joint_uy[live] / p_u.probs[live, None]
    return Joint(Channel(p_u.labels, j.output_labels, rows), p_u)


def deterministic_kernels(size, max_outputs=None):
    """Every map from ``size`` inputs onto at most ``max_outputs`` values.

    :return: One-hot bank of shape (kernels, size, max_outputs)
    :rtype: np.ndarray
    """
    if max_outputs is None:
        max_outputs = size
    maps = [f for m in range(1, max_outputs + 1)
            for f in itertools.product(range(m), repeat=size)]
    maps = np.array(maps, dtype=int).reshape(len(maps), size)
    bank = np.zeros((len(maps), size, max_outputs))
    np.put_along_axis(bank, maps[:, :, None], 1., axis=2)
    return bank


def kernel_bank_posteriors(j, bank):
    """Attribute priors and per-outcome attribute posteriors for a kernel bank.

    :return: ``p_u`` of shape (kernels, outputs_u) and ``q_u`` of shape
        (kernels, outcomes, outputs_u); rows for zero-probability outcomes
        equal the prior
    """
    prior = j.prior.probs
    marginal = j.marginal_probs
    post = np.tile(prior, (len(marginal), 1))
    live = marginal > SUPPORT_FLOOR
    post[live] = (prior[None, :] * j.channel.matrix.T[live]) / marginal[live, None]
    p_u = np.einsum('x,kxu->ku', prior, bank)
    q_u = np.einsum('yx,kxu->kyu', post, bank)
    return p_u, q_u


class PriorSet(object):
    """Family of full-support priors over one alphabet.

    Explicit sets are evaluated exactly; the parametric kinds (``simplex``,
    ``product`` and ``predicate``) are enumerated on a lattice or an
    epsilon sequence, so suprema over them are lower estimates.
    """
    def __init__(self, kind, labels, members, exact=False, **params):
        self.kind = kind
        self.labels = tuple(labels)
        self._members = members
        self.exact = exact
        self.params = params

    @classmethod
    def explicit(cls, pmfs):
        pmfs = list(pmfs)
        if len(pmfs) == 0:
            raise ValueError('Empty prior set')
        labels = pmfs[0].labels
        for p in pmfs:
            if p.labels != labels:
                raise AlphabetError('Prior alphabets differ: {} vs {}'.format(list(labels), list(p.labels)))
            if not p.is_full_support():
                raise ValueError('Prior {} does not have full support'.format(p))
        return cls('explicit', labels, lambda: iter(pmfs), exact=True)

    @classmethod
    def simplex(cls, labels, resolution=10):
        labels = tuple(labels)
        if resolution < len(labels):
            raise ValueError('resolution {} gives no full-support member over {} symbols'.format(
                             resolution, len(labels)))
        _check_family_size(_count_compositions(resolution, len(labels)))

        def members():
            for probs in _compositions(resolution, len(labels)):
                yield Pmf(labels, probs)
        return cls('simplex', labels, members, resolution=resolution)

    @classmethod
    def product(cls, schema, resolution=4, eps_sequence=DEFAULT_EPS_SEQUENCE):
        k = len(schema.entry_alphabet)
        if resolution < k:
            raise ValueError('resolution {} gives no full-support entry over {} symbols'.format(resolution, k))
        factors = list(_compositions(resolution, k))
        _check_family_size(len(factors) ** schema.n + len(schema.labels) * len(eps_sequence))
        labels = schema.labels

        def members():
            for combo in itertools.product(factors, repeat=schema.n):
                yield Pmf(labels, product_probs(combo))
            for eps in eps_sequence:
                if (eps / (k - 1)) ** schema.n <= SUPPORT_FLOOR:
                    continue
                for target in itertools.product(range(k), repeat=schema.n):
                    combo = [_target_factor(k, t, eps) for t in target]
                    yield Pmf(labels, product_probs(combo))
        return cls('product', labels, members, resolution=resolution, eps_sequence=tuple(eps_sequence))

    @classmethod
    def predicate(cls, schema, satisfying, c, grid_size=21, eps_sequence=DEFAULT_EPS_SEQUENCE):
        """I.i.d. priors whose entries satisfy the predicate with probability in ``(c, 1-c)``.

        :param satisfying: Entry symbols ``d`` with ``f(d) = 1``
        :param c: Margin in [0, 0.5)
        """
        if not 0 <= c < 0.5:
            raise ValueError('c should be in [0, 0.5) not {}'.format(c))
        alphabet = schema.entry_alphabet
        mask = np.array([d in set(satisfying) for d in alphabet])
        if mask.all() or not mask.any():
            raise ValueError('satisfying set should be a non-empty proper subset of {}'.format(list(alphabet)))
        ps = list(np.linspace(c, 1 - c, grid_size + 2)[1:-1])
        for eps in eps_sequence:
            if eps < 0.5 - c:
                ps.extend([c + eps, 1 - c - eps])
        ps = sorted(set(ps))
        labels = schema.labels

        def members():
            for p in ps:
                entry = np.where(mask, p / mask.sum(), (1 - p) / (~mask).sum())
                yield Pmf(labels, product_probs([entry] * schema.n))
        return cls('predicate', labels, members, c=c, p_values=tuple(ps))

    def members(self):
        return self._members()

    def __iter__(self):
        return self.members()


def _target_factor(k, target, eps):
    factor = np.full(k, eps / (k - 1))
    factor[target] = 1 - eps
    return factor


def _count_compositions(total, parts):
    return int(comb(total - 1, parts - 1, exact=True))


def _compositions(total, parts):
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield np.diff(bounds) / total


def _check_family_size(size):
    if size > MAX_FAMILY_SIZE:
        raise ValueError('Prior family has {} members, more than {}'.format(size, MAX_FAMILY_SIZE))


class Certification(object):
    def __init__(self, holds, eps, worst_prior, worst_y, worst_value, lower_estimate):
        self.holds = holds
        self.eps = eps
        self.worst_prior = worst_prior
        self.worst_y = worst_y
        self.worst_value = worst_value
        self.lower_estimate = lower_estimate

    @property
    def label(self):
        return 'grid/sequence lower estimate' if self.lower_estimate else 'exact'

    def __repr__(self):
        return 'Certification(holds={}, worst={:.6f} at y={!r}, {})'.format(
               self.holds, self.worst_value, self.worst_y, self.label)


def check_eps_pml(c, priors, eps):
    if not isinstance(priors, PriorSet):
        priors = PriorSet.explicit(priors)
    worst = None
    for prior in priors:
        if prior.labels != c.input_labels:
            raise AlphabetError('Prior alphabet {} does not match channel inputs {}'.format(
                                list(prior.labels), list(c.input_labels)))
        profile = pml_profile(Joint(c, prior))
        if worst is None or profile.sup > worst[2]:
            worst = (prior, profile.witness, profile.sup)
    if worst is None:
        raise ValueError('Empty prior set')
    return Certification(worst[2] <= eps, eps, worst[0], worst[1], worst[2],
                         lower_estimate=not priors.exact)
