import numpy as np
import pandas as pd
from scipy.special import logsumexp
from pmlpy.prob import Channel, binomial_logpmf, chernoff_log_tail_bound


MAX_ORACLE_N = 5000


def randomized_response(k, stay_prob, labels=None):
    """Keep the input with ``stay_prob``, otherwise report one of the other
    ``k - 1`` symbols uniformly at random."""
    if int(k) != k or k < 2:
        raise ValueError('k should be an integer >= 2 not {}'.format(k))
    if not 1 / k <= stay_prob < 1:
        raise ValueError('stay_prob should be in [1/{0}, 1) not {1}'.format(k, stay_prob))
    if labels is None:
        labels = list(range(k))
    rows = np.full((k, k), (1 - stay_prob) / (k - 1))
    np.fill_diagonal(rows, stay_prob)
    return Channel(labels, labels, rows)


class ThresholdQuerySpec(object):
    """Deterministic answer to "are there more than m individuals with S_i = 1?"

    :param n: Number of individuals
    :param m: Threshold
    :param p: Probability that one individual satisfies the predicate
    :param answer: Released bit
    """
    def __init__(self, n, m, p, answer=1):
        if int(n) != n or n < 1:
            raise ValueError('n should be a positive integer not {}'.format(n))
        if int(m) != m or not 0 <= m <= n:
            raise ValueError('m should be an integer in [0, {}] not {}'.format(n, m))
        if not 0 < p < 1:
            raise ValueError('p should be in (0, 1) not {}'.format(p))
        if answer not in (0, 1):
            raise ValueError('answer should be 0 or 1 not {}'.format(answer))
        self.n = int(n)
        self.m = int(m)
        self.p = p
        self.answer = answer


class ThresholdLeakage(object):
    def __init__(self, exact, chernoff_bound, zero_probability=False):
        self.exact = exact
        self.chernoff_bound = chernoff_bound
        self.zero_probability = zero_probability

    def __repr__(self):
        return 'ThresholdLeakage(exact={!r}, chernoff_bound={!r}, zero_probability={})'.format(
               self.exact, self.chernoff_bound, self.zero_probability)


def _neg_log1m_exp(logq):
    """-log(1 - exp(logq)) for logq <= 0"""
    if logq >= 0:
        return np.inf
    if logq > -np.log(2):
        return float(-np.log(-np.expm1(logq)))
    return float(-np.log1p(-np.exp(logq)))


def _neg_log_prob(log_parts, answer_part):
    """-log of the mass in ``answer_part``, through the complement when it is the larger part"""
    log_answer = logsumexp(log_parts[answer_part])
    log_other = logsumexp(log_parts[~answer_part])
    if log_answer < log_other:
        return float(max(-log_answer, 0.))
    return _neg_log1m_exp(min(log_other, 0.))


def threshold_query_leakage(spec):
    n, m, p = spec.n, spec.m, spec.p
    logpmf = binomial_logpmf(n, p)
    above = np.arange(n + 1) > m
    if spec.answer == 1:
        # P(Y = 1) = P(count >= m + 1)
        if m == n:
            return ThresholdLeakage(0., None, zero_probability=True)
        exact = _neg_log_prob(logpmf, above)
        bound = None
        if m / n <= p:
            bound = _neg_log1m_exp(chernoff_log_tail_bound(n, m, p))
        return ThresholdLeakage(exact, bound)
    # P(Y = 0) = P(count <= m) = 1 - P(n - count <= n - m - 1)
    if m == n:
        return ThresholdLeakage(0., 0.)
    exact = _neg_log_prob(logpmf, ~above)
    bound = None
    if (m + 1) / n >= p:
        bound = _neg_log1m_exp(chernoff_log_tail_bound(n, n - m - 1, 1 - p))
    return ThresholdLeakage(exact, bound)


def threshold_sweep(ns, ps, answer=1, ms=None, reference=None):
    """Leakage of the threshold query over a grid of (n, p, m).

    :param ms: Thresholds to evaluate, defaults to every m in [0, n]
    :rtype: pd.DataFrame
    """
    if reference is None:
        reference = -np.log(0.7)
    records = []
    for n in ns:
        for p in ps:
            for m in (range(n + 1) if ms is None else ms):
                res = threshold_query_leakage(ThresholdQuerySpec(n, m, p, answer))
                records.append({'n': n, 'p': p, 'm': m, 'ratio': m / n, 'answer': answer,
                                'exact': res.exact,
                                'bound': np.nan if res.chernoff_bound is None else res.chernoff_bound,
                                'reference': reference})
    return pd.DataFrame.from_records(records, columns=['n', 'p', 'm', 'ratio', 'answer',
                                                       'exact', 'bound', 'reference'])


class LaplaceCountingSpec(object):
    """Laplace mechanism answering a counting query over ``n`` i.i.d. entries.

    Either a fixed predicate probability ``p`` or a family margin ``c`` (or both)
    """
    def __init__(self, n, b, p=None, c=None):
        if int(n) != n or n < 1:
            raise ValueError('n should be a positive integer not {}'.format(n))
        if not b > 0:
            raise ValueError('b should be positive not {}'.format(b))
        if p is None and c is None:
            raise ValueError('One of p or c should be given')
        if p is not None and not 0 < p < 1:
            raise ValueError('p should be in (0, 1) not {}'.format(p))
        if c is not None and not 0 <= c < 0.5:
            raise ValueError('c should be in [0, 0.5) not {}'.format(c))
        if p is not None and c is not None and not c < p < 1 - c:
            raise ValueError('p = {} should lie in (c, 1 - c) = ({}, {})'.format(p, c, 1 - c))
        self.n = int(n)
        self.b = float(b)
        self.p = p
        self.c = c

    @property
    def dp_epsilon(self):
        return 1 / (self.n * self.b)


def _check_nb(n, b):
    if int(n) != n or n < 1:
        raise ValueError('n should be a positive integer not {}'.format(n))
    if not b > 0:
        raise ValueError('b should be positive not {}'.format(b))


def laplace_counting_branches(n, b, p):
    """Leakage for outcomes above 1 and below 0, in this order"""
    _check_nb(n, b)
    if not 0 < p < 1:
        raise ValueError('p should be in (0, 1) not {}'.format(p))
    x = 1 / (n * b)
    upper = x - np.log1p(p * np.expm1(x))
    lower = x - np.log1p((1 - p) * np.expm1(x))
    return float(upper), float(lower)


def laplace_counting_leakage_exact(n, b, p):
    return max(laplace_counting_branches(n, b, p))


def laplace_counting_leakage_bound(n, b, c):
    _check_nb(n, b)
    if not 0 <= c < 0.5:
        raise ValueError('c should be in [0, 0.5) not {}'.format(c))
    x = 1 / (n * b)
    return float(x - np.log1p(c * np.expm1(x)))


def laplace_counting_leakage_simplified(n, b, c):
    _check_nb(n, b)
    if not 0 <= c < 0.5:
        raise ValueError('c should be in [0, 0.5) not {}'.format(c))
    if n * b < 1:
        raise ValueError('Simplified bound needs n * b >= 1, got {}'.format(n * b))
    return float((1 - c) / (n * b) + c ** 2 / (2 * n ** 2 * b ** 2))


def laplace_counting_pml_at_y(n, b, p, y):
    """Leakage about one entry at Laplace outcome(s) ``y`` by exact binomial sums.

    The density of ``Y`` given ``D_1 = d`` averages the Laplace density over
    the count of the other ``n - 1`` entries; the marginal averages it over
    the full count.
    """
    _check_nb(n, b)
    if not 0 < p < 1:
        raise ValueError('p should be in (0, 1) not {}'.format(p))
    if n > MAX_ORACLE_N:
        raise ValueError('n = {} is above the exact summation limit {}'.format(n, MAX_ORACLE_N))
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    rest = np.arange(n)
    w_rest = binomial_logpmf(n - 1, p)
    w_all = binomial_logpmf(n, p)
    num = np.stack([logsumexp(w_rest[None, :] - np.abs(y[:, None] - (d + rest[None, :]) / n) / b, axis=1)
                    for d in (0, 1)])
    den = logsumexp(w_all[None, :] - np.abs(y[:, None] - np.arange(n + 1)[None, :] / n) / b, axis=1)
    values = np.maximum(num.max(axis=0) - den, 0.)
    if scalar:
        return float(values[0])
    return values


def default_y_grid(y_min=-2., y_max=3., size=1001, tails=(-10., 10.)):
    return np.concatenate([np.linspace(y_min, y_max, size), np.asarray(tails, dtype=float)])


def laplace_counting_oracle_sup(n, b, p, y_grid=None):
    if y_grid is None:
        y_grid = default_y_grid()
    return float(np.max(laplace_counting_pml_at_y(n, b, p, y_grid)))


def laplace_counting_grid_sup(n, b, c, grid_size=21):
    """Largest exact leakage over ``grid_size`` interior points of ``(c, 1 - c)``"""
    if not 0 <= c < 0.5:
        raise ValueError('c should be in [0, 0.5) not {}'.format(c))
    ps = np.linspace(c, 1 - c, grid_size + 2)[1:-1]
    return max(laplace_counting_leakage_exact(n, b, p) for p in ps)


def laplace_sweep(n, b, c=None, p=None):
    """Exact leakage, family bound and simplified bound over broadcast grids.

    :rtype: pd.DataFrame
    """
    grid = np.broadcast_arrays(*[np.atleast_1d(np.asarray(v, dtype=float))
                                 for v in (n, b, np.nan if c is None else c, np.nan if p is None else p)])
    records = []
    for nn, bb, cc, pp in zip(*[g.ravel() for g in grid]):
        spec = LaplaceCountingSpec(int(nn), bb, p=None if np.isnan(pp) else pp,
                                   c=None if np.isnan(cc) else cc)
        row = {'n': spec.n, 'b': spec.b, 'c': spec.c, 'p': spec.p, 'dp': spec.dp_epsilon,
               'exact': np.nan, 'bound': np.nan, 'simplified': np.nan}
        if spec.p is not None:
            row['exact'] = laplace_counting_leakage_exact(spec.n, spec.b, spec.p)
        if spec.c is not None:
            row['bound'] = laplace_counting_leakage_bound(spec.n, spec.b, spec.c)
            if spec.n * spec.b >= 1:
                row['simplified'] = laplace_counting_leakage_simplified(spec.n, spec.b, spec.c)
        records.append(row)
    return pd.DataFrame.from_records(records, columns=['n', 'b', 'c', 'p', 'dp', 'exact', 'bound', 'simplified'])
