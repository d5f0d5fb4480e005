import itertools
import numpy as np
import pandas as pd
from pmlpy.prob import Pmf, Channel, Joint, AlphabetError, product_probs, _find
from pmlpy.leakage import DEFAULT_EPS_SEQUENCE, pml, _pml_values, _matrix_capacity
from pmlpy.setuplog import setuplog


MAX_DATABASES = 4096
FORMULATIONS = ('dp-conditional', 'dp-conditional-product', 'dp-entry-product',
                'flp-joint', 'flp-joint-product', 'flp-entry')


class SizeGuardError(ValueError):
    pass


class DatabaseSchema(object):
    """Databases of ``n`` entries over ``entry_alphabet``, enumerated row-major
    with the first entry most significant."""
    def __init__(self, entry_alphabet, n):
        self.entry_alphabet = tuple(entry_alphabet)
        if len(self.entry_alphabet) < 2:
            raise ValueError('entry_alphabet should have at least two symbols')
        if len(set(self.entry_alphabet)) != len(self.entry_alphabet):
            raise ValueError('entry_alphabet should be unique: {}'.format(list(self.entry_alphabet)))
        if int(n) != n or n < 1:
            raise ValueError('n should be a positive integer not {}'.format(n))
        self.n = int(n)
        if self.size > MAX_DATABASES:
            raise SizeGuardError('{}^{} = {} databases exceed the enumeration limit {}'.format(
                                 len(self.entry_alphabet), self.n, self.size, MAX_DATABASES))
        self._labels = tuple(','.join(str(d) for d in combo)
                             for combo in itertools.product(self.entry_alphabet, repeat=self.n))

    @property
    def k(self):
        return len(self.entry_alphabet)

    @property
    def size(self):
        return self.k ** self.n

    @property
    def shape(self):
        return (self.k,) * self.n

    @property
    def labels(self):
        return self._labels

    def entry_index(self, d):
        return _find(self.entry_alphabet, d, 'entry symbol')

    def database_index(self, database):
        if len(database) != self.n:
            raise ValueError('database should have {} entries not {}'.format(self.n, len(database)))
        return int(np.ravel_multi_index([self.entry_index(d) for d in database], self.shape))

    def rest_index(self, i, d_minus_i):
        self.check_entry(i)
        if len(d_minus_i) != self.n - 1:
            raise ValueError('d_minus_i should have {} entries not {}'.format(self.n - 1, len(d_minus_i)))
        if self.n == 1:
            return 0
        return int(np.ravel_multi_index([self.entry_index(d) for d in d_minus_i], (self.k,) * (self.n - 1)))

    def rest_labels(self):
        return tuple(','.join(str(d) for d in combo)
                     for combo in itertools.product(self.entry_alphabet, repeat=self.n - 1)) or ('',)

    def check_entry(self, i):
        if int(i) != i or not 0 <= i < self.n:
            raise ValueError('entry index should be in [0, {}) not {}'.format(self.n, i))

    def __eq__(self, other):
        return isinstance(other, DatabaseSchema) and self.entry_alphabet == other.entry_alphabet \
            and self.n == other.n

    def __repr__(self):
        return 'DatabaseSchema({}, n={})'.format(list(self.entry_alphabet), self.n)


class DatabaseMechanism(object):
    def __init__(self, schema, channel):
        if channel.input_labels != schema.labels:
            if len(channel.input_labels) != schema.size:
                raise AlphabetError('channel has {} inputs, schema needs {}'.format(
                                    len(channel.input_labels), schema.size))
            channel = Channel(schema.labels, channel.output_labels, channel.matrix)
        self.schema = schema
        self.channel = channel

    @classmethod
    def from_function(cls, schema, func, output_labels=None):
        """Deterministic mechanism releasing ``func(database)``"""
        combos = list(itertools.product(schema.entry_alphabet, repeat=schema.n))
        images = dict(zip(schema.labels, combos))
        return cls(schema, Channel.from_function(schema.labels, lambda x: func(images[x]), output_labels))

    @classmethod
    def from_entry_channel(cls, schema, i, entry_channel):
        """Mechanism applying ``entry_channel`` to entry ``i`` only"""
        schema.check_entry(i)
        if entry_channel.input_labels != schema.entry_alphabet:
            raise AlphabetError('entry channel inputs {} do not match {}'.format(
                                list(entry_channel.input_labels), list(schema.entry_alphabet)))
        idx = np.unravel_index(np.arange(schema.size), schema.shape)[i]
        return cls(schema, Channel(schema.labels, entry_channel.output_labels, entry_channel.matrix[idx]))

    @property
    def output_labels(self):
        return self.channel.output_labels

    @property
    def tensor(self):
        return self.channel.matrix.reshape(self.schema.shape + (len(self.output_labels),))

    def entry_view(self, i):
        """Rows arranged as (d_i, d_-i, y)"""
        self.schema.check_entry(i)
        t = np.moveaxis(self.tensor, i, 0)
        return t.reshape(self.schema.k, -1, len(self.output_labels))


class DatabasePrior(object):
    """Full-support prior over the databases of a schema, either explicit or
    a product of per-entry pmfs."""
    def __init__(self, schema, pmf=None, factors=None):
        if (pmf is None) == (factors is None):
            raise ValueError('Give exactly one of pmf or factors')
        self.schema = schema
        if factors is not None:
            factors = [f if isinstance(f, Pmf) else Pmf(schema.entry_alphabet, f) for f in factors]
            if len(factors) != schema.n:
                raise ValueError('product prior needs {} factors not {}'.format(schema.n, len(factors)))
            for f in factors:
                if f.labels != schema.entry_alphabet:
                    raise AlphabetError('factor alphabet {} does not match {}'.format(
                                        list(f.labels), list(schema.entry_alphabet)))
                if np.any(f.probs <= 0):
                    raise ValueError('product factors should have full support: {}'.format(f))
            self.kind = 'product'
            self.factors = tuple(factors)
            self._probs = product_probs([f.probs for f in factors])
        else:
            if not isinstance(pmf, Pmf):
                pmf = Pmf(schema.labels, pmf)
            if pmf.labels != schema.labels:
                raise AlphabetError('prior alphabet does not match the databases of {}'.format(schema))
            if np.any(pmf.probs <= 0):
                raise ValueError('database prior should have full support')
            self.kind = 'explicit'
            self.factors = None
            self._probs = pmf.probs

    @classmethod
    def product(cls, schema, factors):
        return cls(schema, factors=factors)

    @classmethod
    def explicit(cls, schema, pmf):
        return cls(schema, pmf=pmf)

    @classmethod
    def uniform(cls, schema):
        return cls(schema, factors=[np.full(schema.k, 1 / schema.k)] * schema.n)

    @property
    def probs(self):
        return self._probs

    @property
    def tensor(self):
        return self._probs.reshape(self.schema.shape)

    def to_pmf(self):
        return Pmf(self.schema.labels, self._probs)

    def entry_view(self, i):
        """Probabilities arranged as (d_i, d_-i)"""
        self.schema.check_entry(i)
        return np.moveaxis(self.tensor, i, 0).reshape(self.schema.k, -1)

    def marginal(self, i):
        if self.factors is not None:
            self.schema.check_entry(i)
            return self.factors[i]
        return Pmf(self.schema.entry_alphabet, self.entry_view(i).sum(axis=1))

    def conditional(self, i, d_minus_i):
        r = self.schema.rest_index(i, d_minus_i)
        if self.factors is not None:
            return self.factors[i]
        col = self.entry_view(i)[:, r]
        if col.sum() <= 0:
            raise ValueError('d_minus_i = {} has probability zero'.format(d_minus_i))
        return Pmf(self.schema.entry_alphabet, col / col.sum())


def _check_prior(m, prior):
    if prior.schema != m.schema:
        raise AlphabetError('prior schema {} does not match mechanism schema {}'.format(prior.schema, m.schema))


def dp_epsilon(m):
    return max(_matrix_capacity(m.entry_view(i).reshape(m.schema.k, -1)) for i in range(m.schema.n))


def free_lunch_epsilon(m):
    return _matrix_capacity(m.channel.matrix)


def _entry_rows(m, prior, i):
    """Channel rows ``P_Y|D_i`` and the marginal of ``D_i``"""
    weights = prior.entry_view(i)
    view = m.entry_view(i)
    marg = weights.sum(axis=1)
    rows = np.einsum('dr,dry->dy', weights, view) / marg[:, None]
    return rows, marg


def entry_joint(m, prior, i):
    _check_prior(m, prior)
    rows, marg = _entry_rows(m, prior, i)
    return Joint(Channel(m.schema.entry_alphabet, m.output_labels, rows),
                 Pmf(m.schema.entry_alphabet, marg))


def entry_pml(m, prior, i, y):
    _check_prior(m, prior)
    yi = m.channel.output_index(y)
    rows, marg = _entry_rows(m, prior, i)
    return float(_pml_values(marg, rows, np.ones(len(marg), dtype=bool))[yi])


def database_pml(m, prior, y):
    """Leakage about the whole database, every database in the support"""
    _check_prior(m, prior)
    yi = m.channel.output_index(y)
    support = np.ones(m.schema.size, dtype=bool)
    return float(_pml_values(prior.probs, m.channel.matrix, support)[yi])


def conditional_entry_pml(m, prior, i, d_minus_i, y):
    _check_prior(m, prior)
    r = m.schema.rest_index(i, d_minus_i)
    rows = m.entry_view(i)[:, r, :]
    cond = Joint(Channel(m.schema.entry_alphabet, m.output_labels, rows), prior.conditional(i, d_minus_i))
    return pml(cond, y)


def _check_eps(eps_c):
    if not 0 < eps_c < 1:
        raise ValueError('eps_c should be in (0, 1) not {}'.format(eps_c))


def _target_probs(k, target, eps_c):
    probs = np.full(k, eps_c / (k - 1))
    probs[target] = 1 - eps_c
    return probs


def _argmin_first(values):
    return int(np.flatnonzero(values <= values.min())[0])


def _argmax_first(values):
    return int(np.flatnonzero(values >= values.max())[0])


def product_target_prior(schema, target, eps_c):
    """Product prior putting ``1 - eps_c`` on ``target[j]`` in every entry"""
    _check_eps(eps_c)
    idx = [schema.entry_index(d) for d in target]
    if len(idx) != schema.n:
        raise ValueError('target should have {} entries not {}'.format(schema.n, len(idx)))
    return DatabasePrior.product(schema, [_target_probs(schema.k, t, eps_c) for t in idx])


def conditional_entry_prior(m, i, d_minus_i, y, eps_c):
    """Pmf of ``D_i`` putting ``1 - eps_c`` on the row least likely to produce ``y``"""
    _check_eps(eps_c)
    r = m.schema.rest_index(i, d_minus_i)
    col = m.entry_view(i)[:, r, m.channel.output_index(y)]
    return Pmf(m.schema.entry_alphabet, _target_probs(m.schema.k, _argmin_first(col), eps_c))


def correlated_entry_kernel(m, i, d_i, d_i_prime, y, eps_c):
    """Kernel ``P_D-i|D_i`` steering ``d_i`` to its most and ``d_i_prime`` to
    its least likely rest for outcome ``y``; other rows are uniform."""
    _check_eps(eps_c)
    schema = m.schema
    a, b = schema.entry_index(d_i), schema.entry_index(d_i_prime)
    view = m.entry_view(i)[:, :, m.channel.output_index(y)]
    n_rest = view.shape[1]
    rows = np.full((schema.k, n_rest), 1 / n_rest)
    if n_rest > 1:
        rows[a] = _target_probs(n_rest, _argmax_first(view[a]), eps_c)
        if b != a:
            rows[b] = _target_probs(n_rest, _argmin_first(view[b]), eps_c)
    return Channel(schema.entry_alphabet, schema.rest_labels(), rows)


def joint_target_prior(m, y, eps_c):
    """Explicit prior putting ``1 - eps_c`` on the database least likely to produce ``y``"""
    _check_eps(eps_c)
    col = m.channel.matrix[:, m.channel.output_index(y)]
    probs = _target_probs(m.schema.size, _argmin_first(col), eps_c)
    return DatabasePrior.explicit(m.schema, probs)


def correlated_prior(m, i, entry_pmf, kernel):
    """Explicit prior ``P_D_i x P_D-i|D_i`` laid out row-major"""
    schema = m.schema
    weights = entry_pmf.probs[:, None] * kernel.matrix
    full = np.moveaxis(weights.reshape((schema.k,) + (schema.k,) * (schema.n - 1)), 0, i)
    return DatabasePrior.explicit(schema, full.ravel())


def adversarial_prior(kind, params, eps_c):
    """Dispatch the prior constructions by name.

    ``product-target``: params ``schema``, ``target``;
    ``conditional-entry``: ``mechanism``, ``i``, ``d_minus_i``, ``y``;
    ``correlated-entry``: ``mechanism``, ``i``, ``d_i``, ``d_i_prime``, ``y``;
    ``joint-target``: ``mechanism``, ``y``.
    """
    builders = {'product-target': lambda p: product_target_prior(p['schema'], p['target'], eps_c),
                'conditional-entry': lambda p: conditional_entry_prior(
                    p['mechanism'], p['i'], p['d_minus_i'], p['y'], eps_c),
                'correlated-entry': lambda p: correlated_entry_kernel(
                    p['mechanism'], p['i'], p['d_i'], p['d_i_prime'], p['y'], eps_c),
                'joint-target': lambda p: joint_target_prior(p['mechanism'], p['y'], eps_c)}
    if kind not in builders:
        raise ValueError('Unknown prior kind {!r}, expected one of {}'.format(kind, list(builders)))
    _check_eps(eps_c)
    try:
        return builders[kind](params)
    except KeyError as e:
        raise ValueError('Missing parameter {} for prior kind {!r}'.format(e, kind))


def _rests(schema):
    return list(itertools.product(schema.entry_alphabet, repeat=schema.n - 1))


def _dp_conditional(m, eps_c):
    """Explicit priors whose conditional on every rest is the conditional-entry construction"""
    schema = m.schema
    rests = _rests(schema)
    best = 0.
    for i in range(schema.n):
        for y in m.output_labels:
            cols = [conditional_entry_prior(m, i, rest, y, eps_c).probs for rest in rests]
            weights = np.stack(cols, axis=1) / len(rests)
            full = np.moveaxis(weights.reshape((schema.k,) * schema.n), 0, i)
            prior = DatabasePrior.explicit(schema, full.ravel())
            for rest in rests:
                best = max(best, conditional_entry_pml(m, prior, i, rest, y))
    return best


def _dp_conditional_product(m, eps_c):
    schema = m.schema
    uniform = np.full(schema.k, 1 / schema.k)
    best = 0.
    for i in range(schema.n):
        for y in m.output_labels:
            for rest in _rests(schema):
                factors = [uniform] * schema.n
                factors[i] = conditional_entry_prior(m, i, rest, y, eps_c)
                prior = DatabasePrior.product(schema, factors)
                best = max(best, conditional_entry_pml(m, prior, i, rest, y))
    return best


def _entry_argmin_pmf(m, prior_rest, i, y, eps_c):
    """Entry pmf on the row of ``P_Y|D_i`` least likely to produce ``y``"""
    yi = m.channel.output_index(y)
    induced = np.einsum('dr,r->d', m.entry_view(i)[:, :, yi], prior_rest)
    return Pmf(m.schema.entry_alphabet, _target_probs(m.schema.k, _argmin_first(induced), eps_c))


def _dp_entry_product(m, eps_c):
    schema = m.schema
    best = 0.
    for i in range(schema.n):
        for y in m.output_labels:
            yi = m.channel.output_index(y)
            view = m.entry_view(i)[:, :, yi]
            for a, b in itertools.permutations(range(schema.k), 2):
                with np.errstate(divide='ignore', invalid='ignore'):
                    ratio = np.where(view[a] > 0, view[a] / view[b], 0.)
                rest = _rests(schema)[_argmax_first(ratio)]
                factors = [_target_probs(schema.k, schema.entry_index(d), eps_c) for d in rest]
                factors.insert(i, np.full(schema.k, 1 / schema.k))
                rest_probs = DatabasePrior.product(schema, factors).entry_view(i).sum(axis=0)
                factors[i] = _entry_argmin_pmf(m, rest_probs, i, y, eps_c)
                prior = DatabasePrior.product(schema, factors)
                best = max(best, entry_pml(m, prior, i, y))
    return best


def _flp_joint(m, eps_c):
    return max(database_pml(m, joint_target_prior(m, y, eps_c), y) for y in m.output_labels)


def _flp_joint_product(m, eps_c):
    best = 0.
    for y in m.output_labels:
        col = m.channel.matrix[:, m.channel.output_index(y)]
        target = np.unravel_index(_argmin_first(col), m.schema.shape)
        target = [m.schema.entry_alphabet[t] for t in target]
        best = max(best, database_pml(m, product_target_prior(m.schema, target, eps_c), y))
    return best


def _flp_entry(m, eps_c):
    schema = m.schema
    best = 0.
    for i in range(schema.n):
        for y in m.output_labels:
            for a, b in itertools.permutations(schema.entry_alphabet, 2):
                kernel = correlated_entry_kernel(m, i, a, b, y, eps_c)
                entry = Pmf(schema.entry_alphabet, _target_probs(schema.k, schema.entry_index(b), eps_c))
                prior = correlated_prior(m, i, entry, kernel)
                best = max(best, entry_pml(m, prior, i, y))
    return best


_EVALUATORS = {'dp-conditional': _dp_conditional,
               'dp-conditional-product': _dp_conditional_product,
               'dp-entry-product': _dp_entry_product,
               'flp-joint': _flp_joint,
               'flp-joint-product': _flp_joint_product,
               'flp-entry': _flp_entry}


class SupremumTrace(object):
    """Leakage of the prior constructions along a decreasing epsilon sequence.

    ``values`` holds the leakage of each construction and should not decrease
    as epsilon shrinks; ``trace`` is the running best, the lower estimate of
    the supremum.
    """
    def __init__(self, formulation, eps_sequence, values, target):
        self.formulation = formulation
        self.eps_sequence = tuple(eps_sequence)
        self.values = np.asarray(values, dtype=float)
        self.trace = np.maximum.accumulate(self.values)
        self.target = target

    @property
    def limit(self):
        return float(self.trace[-1])

    @property
    def gap(self):
        return float(self.target - self.limit)

    @property
    def unbounded(self):
        return bool(np.isinf(self.target))

    def is_monotone(self, tol=1e-9):
        return bool(np.all(np.diff(self.values) >= -tol))

    def below_target(self):
        return bool(np.all(self.values < self.target)) or \
            (self.target == 0 and bool(np.all(self.values == 0)))

    def to_frame(self):
        return pd.DataFrame({'formulation': self.formulation, 'eps': self.eps_sequence,
                             'value': self.values, 'trace': self.trace})


def _check_eps_sequence(eps_sequence):
    eps = np.asarray(eps_sequence, dtype=float)
    if eps.size == 0 or np.any(eps <= 0) or np.any(eps >= 1) or np.any(np.diff(eps) >= 0):
        raise ValueError('eps_sequence should be strictly decreasing in (0, 1): {}'.format(list(eps_sequence)))
    return eps


def pml_supremum(m, formulation, eps_sequence=DEFAULT_EPS_SEQUENCE):
    if formulation not in _EVALUATORS:
        raise ValueError('Unknown formulation {!r}, expected one of {}'.format(formulation, list(FORMULATIONS)))
    eps = _check_eps_sequence(eps_sequence)
    values = [_EVALUATORS[formulation](m, e) for e in eps]
    target = dp_epsilon(m) if formulation.startswith('dp') else free_lunch_epsilon(m)
    return SupremumTrace(formulation, eps, values, target)


class EquivalenceReport(object):
    def __init__(self, dp_eps, flp_eps, traces, tol):
        self.dp_eps = dp_eps
        self.flp_eps = flp_eps
        self.traces = traces
        self.tol = tol
        self.pml_sups = {f: (t.limit, t.trace) for f, t in traces.items()}
        self.gaps = {f: t.gap for f, t in traces.items()}
        self.passed = {f: self._passes(t) for f, t in traces.items()}

    def _passes(self, trace):
        if not trace.is_monotone():
            return False
        if trace.unbounded:
            return bool(trace.values[-1] > trace.values[0]) or trace.limit > 0
        return trace.below_target() and trace.gap <= self.tol

    @property
    def unbounded(self):
        return bool(np.isinf(self.dp_eps) or np.isinf(self.flp_eps))

    @property
    def all_passed(self):
        return all(self.passed.values())

    def to_frame(self):
        return pd.DataFrame.from_records(
            [{'formulation': f, 'target': t.target, 'limit': t.limit, 'gap': t.gap,
              'monotone': t.is_monotone(), 'passed': self.passed[f]} for f, t in self.traces.items()],
            columns=['formulation', 'target', 'limit', 'gap', 'monotone', 'passed'])


def verify_equivalences(m, tol=1e-4, eps_sequence=DEFAULT_EPS_SEQUENCE, logger=None):
    if logger is None:
        logger = setuplog().Equivlog
    if m.schema.size > MAX_DATABASES:
        raise SizeGuardError('{} databases exceed the enumeration limit {}'.format(m.schema.size, MAX_DATABASES))
    traces = {f: pml_supremum(m, f, eps_sequence) for f in FORMULATIONS}
    report = EquivalenceReport(dp_epsilon(m), free_lunch_epsilon(m), traces, tol)
    logger.info('dp = {:.6f}, flp = {:.6f}'.format(report.dp_eps, report.flp_eps))
    for f, t in traces.items():
        logger.info('{}: limit {:.6f}, gap {:.3e}, passed {}'.format(f, t.limit, t.gap, report.passed[f]))
    if report.unbounded:
        logger.warning('Mechanism has opposing zero and positive entries, parameters are unbounded')
    return report
