import numpy as np
from scipy.special import gammaln, logsumexp, xlogy


SUPPORT_FLOOR = 1e-12
SUM_TOL = 1e-9


class AlphabetError(ValueError):
    pass


def _check_labels(labels, key='labels'):
    labels = tuple(labels)
    if len(labels) == 0:
        raise ValueError('{} should not be empty'.format(key))
    if len(set(labels)) != len(labels):
        raise ValueError('{} should be unique: {}'.format(key, list(labels)))
    return labels


def _normalize(probs, key='pmf'):
    probs = np.asarray(probs, dtype=float)
    if np.any(~np.isfinite(probs)):
        raise ValueError('{} contains non-finite values'.format(key))
    if np.any(probs < 0):
        raise ValueError('{} contains negative values'.format(key))
    total = probs.sum(axis=-1, keepdims=True)
    if np.any(np.abs(total - 1) > SUM_TOL):
        raise ValueError('pmf sum out of tolerance: {} sums to {}'.format(
                         key, np.round(total.ravel(), 12).tolist()))
    probs = probs / total
    probs.setflags(write=False)
    return probs


def _find(labels, label, key='label'):
    try:
        return labels.index(label)
    except ValueError:
        raise AlphabetError('Unknown {} {!r}, expected one of {}'.format(key, label, list(labels)))


class Pmf(object):
    """Finite probability distribution over a labeled alphabet.

    :param labels: Alphabet symbols, unique and hashable
    :type labels: list
    :param probs: Probabilities in the same order as ``labels``
    :type probs: list or np.ndarray
    """
    def __init__(self, labels, probs):
        self._labels = _check_labels(labels)
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (len(self._labels),):
            raise ValueError('probs should have shape ({},) not {}'.format(len(self._labels), probs.shape))
        self._probs = _normalize(probs)
        with np.errstate(divide='ignore'):
            self._logprobs = np.log(self._probs)
        self._logprobs.setflags(write=False)

    @classmethod
    def uniform(cls, labels):
        labels = _check_labels(labels)
        return cls(labels, np.full(len(labels), 1 / len(labels)))

    @classmethod
    def degenerate(cls, labels, label):
        labels = _check_labels(labels)
        probs = np.zeros(len(labels))
        probs[_find(labels, label)] = 1.
        return cls(labels, probs)

    @property
    def labels(self):
        return self._labels

    @property
    def probs(self):
        return self._probs

    @property
    def logprobs(self):
        return self._logprobs

    @property
    def support(self):
        return self._probs > SUPPORT_FLOOR

    def index(self, label):
        return _find(self._labels, label)

    def prob(self, label):
        return self._probs[self.index(label)]

    def is_full_support(self):
        return bool(np.all(self.support))

    def is_degenerate(self):
        return int(np.count_nonzero(self.support)) == 1

    def argmin(self):
        """Least likely symbol, first by ``str(label)`` among ties"""
        return _tie_first(self._labels, -self._probs)

    def argmax(self):
        return _tie_first(self._labels, self._probs)

    def same_alphabet(self, other):
        return self._labels == other.labels

    def __len__(self):
        return len(self._labels)

    def __eq__(self, other):
        return isinstance(other, Pmf) and self.same_alphabet(other) and \
            np.array_equal(self._probs, other.probs)

    def __hash__(self):
        return hash((self._labels, self._probs.tobytes()))

    def __repr__(self):
        return 'Pmf({})'.format(', '.join('{}: {:.6g}'.format(la, pr)
                                          for la, pr in zip(self._labels, self._probs)))


class Channel(object):
    """Row-stochastic kernel from ``input_labels`` to ``output_labels``."""
    def __init__(self, input_labels, output_labels, rows):
        self._input_labels = _check_labels(input_labels, 'input_labels')
        self._output_labels = _check_labels(output_labels, 'output_labels')
        rows = np.asarray(rows, dtype=float)
        shape = (len(self._input_labels), len(self._output_labels))
        if rows.shape != shape:
            raise ValueError('rows should have shape {} not {}'.format(shape, rows.shape))
        self._matrix = _normalize(rows, key='channel rows')

    @classmethod
    def identity(cls, labels):
        labels = _check_labels(labels)
        return cls(labels, labels, np.eye(len(labels)))

    @classmethod
    def constant(cls, input_labels, output_labels, output):
        output_labels = _check_labels(output_labels)
        row = np.zeros(len(output_labels))
        row[_find(output_labels, output, 'output')] = 1.
        input_labels = _check_labels(input_labels)
        return cls(input_labels, output_labels, np.tile(row, (len(input_labels), 1)))

    @classmethod
    def from_function(cls, input_labels, func, output_labels=None):
        """Deterministic kernel mapping each input ``x`` to ``func(x)``"""
        input_labels = _check_labels(input_labels)
        images = [func(x) for x in input_labels]
        if output_labels is None:
            output_labels = []
            for u in images:
                if u not in output_labels:
                    output_labels.append(u)
        output_labels = _check_labels(output_labels)
        rows = np.zeros((len(input_labels), len(output_labels)))
        for i, u in enumerate(images):
            rows[i, _find(output_labels, u, 'output')] = 1.
        return cls(input_labels, output_labels, rows)

    @property
    def input_labels(self):
        return self._input_labels

    @property
    def output_labels(self):
        return self._output_labels

    @property
    def matrix(self):
        return self._matrix

    @property
    def shape(self):
        return self._matrix.shape

    def row(self, x):
        return Pmf(self._output_labels, self._matrix[_find(self._input_labels, x, 'input')])

    def output_index(self, y):
        return _find(self._output_labels, y, 'output')

    def __repr__(self):
        return 'Channel({} -> {})'.format(list(self._input_labels), list(self._output_labels))


class Joint(object):
    """Prior on the input of a channel, i.e. ``P_XY = P_Y|X x P_X``."""
    def __init__(self, channel, prior):
        if not isinstance(channel, Channel):
            raise TypeError('channel should be \'Channel\' type not \'{0}\''.format(type(channel)))
        if not isinstance(prior, Pmf):
            raise TypeError('prior should be \'Pmf\' type not \'{0}\''.format(type(prior)))
        if prior.labels != channel.input_labels:
            raise AlphabetError('prior alphabet {} does not match channel inputs {}'.format(
                                list(prior.labels), list(channel.input_labels)))
        self.channel = channel
        self.prior = prior
        self._marginal = prior.probs @ channel.matrix

    @property
    def marginal_probs(self):
        return self._marginal

    @property
    def output_labels(self):
        return self.channel.output_labels

    def output_index(self, y):
        return self.channel.output_index(y)


def _tie_first(labels, values, tol=SUPPORT_FLOOR):
    values = np.asarray(values, dtype=float)
    best = values.max()
    cands = [la for la, v in zip(labels, values) if v >= best - tol]
    return min(cands, key=str)


def min_entropy(p):
    return float(-np.log(p.probs.max()))


def renyi_div_inf(p, q):
    if not p.same_alphabet(q):
        raise AlphabetError('alphabets differ: {} vs {}'.format(list(p.labels), list(q.labels)))
    supp = p.support
    if np.any(q.probs[supp] <= SUPPORT_FLOOR):
        return np.inf
    value = np.max(p.logprobs[supp] - q.logprobs[supp])
    return float(max(value, 0.))


def output_marginal(j):
    return Pmf(j.output_labels, j.marginal_probs)


def posterior(j, y):
    yi = j.output_index(y)
    py = j.marginal_probs[yi]
    if py <= SUPPORT_FLOOR:
        return j.prior
    return Pmf(j.prior.labels, j.prior.probs * j.channel.matrix[:, yi] / py)


def push_forward(k, p):
    if k.input_labels != p.labels:
        raise AlphabetError('kernel inputs {} do not match pmf alphabet {}'.format(
                            list(k.input_labels), list(p.labels)))
    return Pmf(k.output_labels, p.probs @ k.matrix)


def kl_bernoulli(q, r):
    if not 0 < r < 1:
        raise ValueError('r should be in (0, 1) not {}'.format(r))
    if not 0 <= q <= 1:
        raise ValueError('q should be in [0, 1] not {}'.format(q))
    return float(max(xlogy(q, q / r) + xlogy(1 - q, (1 - q) / (1 - r)), 0.))


def _check_binomial(n, m, p):
    if n < 0 or int(n) != n:
        raise ValueError('n should be a non-negative integer not {}'.format(n))
    if not 0 <= m <= n or int(m) != m:
        raise ValueError('m should be an integer in [0, {}] not {}'.format(n, m))
    if not 0 < p < 1:
        raise ValueError('p should be in (0, 1) not {}'.format(p))


def binomial_logpmf(n, p):
    """Log-probabilities of Bin(n, p) at k = 0..n"""
    k = np.arange(n + 1)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + k * np.log(p) + (n - k) * np.log1p(-p)


def binomial_logcdf(n, m, p):
    _check_binomial(n, m, p)
    if m == n:
        return 0.
    return float(min(logsumexp(binomial_logpmf(n, p)[:m + 1]), 0.))


def binomial_cdf(n, m, p):
    return float(np.exp(binomial_logcdf(n, m, p)))


def chernoff_log_tail_bound(n, m, p):
    _check_binomial(n, m, p)
    if n == 0:
        raise ValueError('Chernoff bound needs n >= 1')
    if m / n > p:
        raise ValueError('Chernoff bound needs m/n <= p, got m/n = {} > p = {}'.format(m / n, p))
    return -n * kl_bernoulli(m / n, p)


def chernoff_tail_bound(n, m, p):
    return float(np.exp(chernoff_log_tail_bound(n, m, p)))


def product_probs(factors):
    """Joint probabilities of independent factors, first factor most significant"""
    probs = np.ones(1)
    for f in factors:
        probs = np.multiply.outer(probs, np.asarray(f, dtype=float)).ravel()
    return probs
