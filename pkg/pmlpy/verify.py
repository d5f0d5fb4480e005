"""Property suites that check the leakage results by direct computation.

Every suite has an instance checker returning a list of failure records and
a random driver that feeds it seeded instances.
"""
import numpy as np
from pmlpy.prob import Pmf, Channel, Joint, SUPPORT_FLOOR, min_entropy, posterior, push_forward
from pmlpy.leakage import (pml_profile, leakage_capacity, deterministic_kernels,
                           kernel_bank_posteriors, _pml_values)
from pmlpy.disclosure import (detect_disclosure, detect_singling_out, capacity_entropy_floor,
                              low_entropy_threshold, construct_low_entropy_disclosed_attribute,
                              construct_min_cost_disclosure)
from pmlpy.database import (DatabaseSchema, DatabaseMechanism, FORMULATIONS, pml_supremum,
                            dp_epsilon, free_lunch_epsilon)
from pmlpy.para import default_config
from pmlpy.setuplog import setuplog


DEFAULT_COUNTS = {'pml-dominance': 500, 'entropy-floor': 500, 'disclosure-prevention': 500,
                  'low-entropy-attribute': 100, 'capacity-floor': 500, 'min-cost-disclosure': 100,
                  'dp-equivalence': 50, 'flp-equivalence': 50, 'non-attainment': 50,
                  'singling-out': 500, 'ubiquity': 100}
SUITES = tuple(DEFAULT_COUNTS.keys())
MAX_DRAWS = 100


class SuiteResult(object):
    def __init__(self, suite, checked, failures):
        self.suite = suite
        self.checked = checked
        self.failures = failures

    @property
    def passed(self):
        return len(self.failures) == 0

    def to_dict(self):
        return {'suite': self.suite, 'checked': self.checked, 'passed': self.passed,
                'failures': self.failures}


def _labels(prefix, size):
    return ['{}{}'.format(prefix, i) for i in range(size)]


def random_pmf(rng, k, floor=0.01, prefix='x'):
    probs = (1 - floor * k) * rng.dirichlet(np.ones(k)) + floor
    return Pmf(_labels(prefix, k), probs)


def random_channel(rng, nx, ny, mix=0.2, zero_prob=0.):
    """Rows mixed with the uniform row; ``zero_prob`` zeroes entries at random"""
    rows = (1 - mix) * rng.dirichlet(np.ones(ny), size=nx) + mix / ny
    if zero_prob > 0:
        mask = rng.random((nx, ny)) < zero_prob
        mask[np.arange(nx), rng.integers(ny, size=nx)] = False
        rows = np.where(mask, 0., rows)
        rows = rows / rows.sum(axis=1, keepdims=True)
    return Channel(_labels('x', nx), _labels('y', ny), rows)


def random_infinite_capacity_channel(rng, nx, ny):
    """Random channel with one outcome impossible for exactly one input"""
    rows = 0.8 * rng.dirichlet(np.ones(ny), size=nx) + 0.2 / ny
    x0, y0 = rng.integers(nx), rng.integers(ny)
    rows[x0, y0] = 0.
    rows[x0] /= rows[x0].sum()
    return Channel(_labels('x', nx), _labels('y', ny), rows)


def random_database_mechanism(rng, n, k=2, ny=None):
    if ny is None:
        ny = int(rng.integers(2, 5))
    schema = DatabaseSchema(list(range(k)), n)
    rows = 0.8 * rng.dirichlet(np.ones(ny), size=schema.size) + 0.2 / ny
    return DatabaseMechanism(schema, Channel(schema.labels, _labels('y', ny), rows))


def _random_instance(rng, mix=0.2):
    nx, ny = int(rng.integers(2, 5)), int(rng.integers(2, 5))
    return random_channel(rng, nx, ny, mix=mix), random_pmf(rng, nx)


def _bank_quantities(c, prior):
    j = Joint(c, prior)
    bank = deterministic_kernels(len(prior))
    pmls = _pml_values(prior.probs, c.matrix, prior.support)
    p_u, q_u = kernel_bank_posteriors(j, bank)
    live = j.marginal_probs > SUPPORT_FLOOR
    return bank, pmls, p_u, q_u, live


def _kernel_map(bank, kidx):
    return bank[kidx].argmax(axis=1).tolist()


def _records(bank, c, viol, **values):
    failures = []
    for kidx, yi in zip(*np.nonzero(viol)):
        rec = {'kernel': _kernel_map(bank, kidx), 'y': c.output_labels[yi]}
        rec.update({k: float(v[kidx, yi]) for k, v in values.items()})
        failures.append(rec)
    return failures


def check_dominance(c, prior, tol=1e-9):
    """Guessing gain and pre-processed leakage never exceed the PML of X"""
    bank, pmls, p_u, q_u, live = _bank_quantities(c, prior)
    with np.errstate(divide='ignore'):
        lower = np.log(q_u.max(axis=2)) - np.log(p_u.max(axis=1))[:, None]
        ratio = np.where(p_u[:, None, :] > SUPPORT_FLOOR, q_u / np.maximum(p_u[:, None, :], SUPPORT_FLOOR), 0.)
        pre = np.maximum(np.log(ratio.max(axis=2)), 0.)
    bound = np.broadcast_to(pmls[None, :], lower.shape)
    viol = (lower > bound + tol) | (pre > bound + tol)
    return _records(bank, c, viol, lower=lower, preprocessed=pre, pml=bound)


def check_entropy_floor(c, prior, tol=1e-9):
    """Posterior min-entropy of every attribute stays above prior entropy minus PML"""
    bank, pmls, p_u, q_u, live = _bank_quantities(c, prior)
    h_u = -np.log(p_u.max(axis=1))
    h_q = -np.log(q_u.max(axis=2))
    floor = np.maximum(h_u[:, None] - pmls[None, :], 0.)
    viol = (h_q < floor - tol) & live[None, :]
    return _records(bank, c, viol, posterior_entropy=h_q, floor=floor)


def check_disclosure_prevention(c, prior, tol=1e-9):
    """No attribute with entropy above the certified level is disclosed exactly"""
    failures = check_entropy_floor(c, prior, tol)
    bank, pmls, p_u, q_u, live = _bank_quantities(c, prior)
    eps = pmls.max()
    h_u = -np.log(p_u.max(axis=1))
    exact = (q_u.max(axis=2) >= 1 - SUPPORT_FLOOR) & live[None, :]
    viol = exact & (h_u[:, None] > eps + tol)
    failures.extend(_records(bank, c, viol, mass=q_u.max(axis=2),
                             prior_entropy=np.broadcast_to(h_u[:, None], exact.shape)))
    return failures


def check_capacity_floor(c, prior, tol=1e-9):
    """Every non-constant deterministic attribute keeps the capacity entropy floor"""
    capacity = leakage_capacity(c)
    floor = capacity_entropy_floor(prior, capacity)
    bank, pmls, p_u, q_u, live = _bank_quantities(c, prior)
    nonconstant = bank.any(axis=1).sum(axis=1) >= 2
    h_q = -np.log(q_u.max(axis=2))
    viol = (h_q < floor - tol) & live[None, :] & nonconstant[:, None]
    return _records(bank, c, viol, posterior_entropy=h_q,
                    floor=np.full(h_q.shape, floor))


def check_low_entropy_attribute(c, prior, u_kernel, fraction=0.5, tol=1e-9):
    """The entropy-lowering attribute inherits the disclosure of ``U``"""
    j = Joint(c, prior)
    p_u = push_forward(u_kernel, prior)
    witness = detect_disclosure(c, prior, u_kernel, threshold=1.).witness
    d = witness.u
    if p_u.prob(d) >= 1 - SUPPORT_FLOOR:
        return []
    threshold = low_entropy_threshold(p_u, d)
    lam = threshold + fraction * (1 - threshold)
    w_kernel = construct_low_entropy_disclosed_attribute(p_u, d, lam)
    p_w = push_forward(w_kernel, p_u)
    q_u = push_forward(u_kernel, posterior(j, witness.y))
    q_w = push_forward(w_kernel, q_u)
    failures = []
    if not min_entropy(p_w) < min_entropy(p_u):
        failures.append({'check': 'prior entropy', 'lambda': lam, 'h_w': min_entropy(p_w),
                         'h_u': min_entropy(p_u)})
    if q_w.prob(d) < q_u.prob(d) - tol or min_entropy(q_w) > min_entropy(q_u) + tol:
        failures.append({'check': 'inherited disclosure', 'y': witness.y, 'u': d, 'lambda': lam,
                         'mass_w': float(q_w.prob(d)), 'mass_u': float(q_u.prob(d))})
    return failures


def check_min_cost_disclosure(prior, alpha=None, tol=1e-12):
    pmin = float(prior.probs.min())
    if alpha is None:
        alpha = 0.5 * pmin / (1 - pmin)
    mechanism, u_kernel = construct_min_cost_disclosure(prior, alpha)
    profile = pml_profile(Joint(mechanism, prior))
    target = float(-np.log1p(-pmin))
    failures = []
    if abs(profile.sup - target) > tol or profile.witness != 0:
        failures.append({'check': 'sup', 'sup': profile.sup, 'target': target, 'witness': profile.witness})
    disc = detect_disclosure(mechanism, prior, u_kernel, threshold=1e-9)
    if not disc.attained or disc.witness.y != 0 or disc.witness.u != 1:
        failures.append({'check': 'disclosure', 'y': disc.witness.y, 'mass': disc.witness.mass})
    return failures


def check_infinite_capacity(c, prior, tol=1e-9):
    """Infinite-capacity mechanisms leak at least the minimal disclosure cost"""
    if not np.isinf(leakage_capacity(c)):
        return []
    target = float(-np.log1p(-prior.probs.min()))
    sup = pml_profile(Joint(c, prior)).sup
    if sup < target - tol:
        return [{'check': 'infinite capacity', 'sup': sup, 'target': target}]
    return []


def check_singling_out(c, prior, margin=1e-9):
    eps = pml_profile(Joint(c, prior)).sup
    threshold = min_entropy(prior) - eps - margin
    if threshold <= 0:
        return None
    res = detect_singling_out(c, prior, threshold)
    if res.singled_out:
        return [{'eps': eps, 'threshold': threshold, 'y': res.witness.y,
                 'min_entropy': res.witness.min_entropy}]
    return []


def _attained(c, prior):
    bank, pmls, p_u, q_u, live = _bank_quantities(c, prior)
    return bank, (q_u.max(axis=2) >= 1 - SUPPORT_FLOOR) & live[None, :]


def check_ubiquity(c, priors):
    """Exact disclosure at an outcome does not depend on the full-support prior"""
    bank, ref = _attained(c, priors[0])
    failures = []
    for prior in priors[1:]:
        _, other = _attained(c, prior)
        for kidx, yi in zip(*np.nonzero(ref != other)):
            failures.append({'kernel': _kernel_map(bank, kidx), 'y': c.output_labels[yi],
                             'reference_prior': priors[0].probs.tolist(), 'prior': prior.probs.tolist()})
    return failures


def check_equivalence(m, family, tol=1e-4, eps_sequence=None, logger=None):
    """Supremum traces of one family converge from below to the DP or FLP parameter"""
    kwargs = {} if eps_sequence is None else {'eps_sequence': eps_sequence}
    failures = []
    for f in FORMULATIONS:
        if not f.startswith(family):
            continue
        trace = pml_supremum(m, f, **kwargs)
        if logger is not None:
            logger.info('{}: target {:.6f}, limit {:.6f}, gap {:.3e}'.format(f, trace.target, trace.limit, trace.gap))
        if not trace.is_monotone():
            failures.append({'formulation': f, 'check': 'monotone', 'values': trace.values.tolist()})
        if trace.unbounded:
            continue
        if not trace.below_target():
            failures.append({'formulation': f, 'check': 'below target', 'target': trace.target,
                             'values': trace.values.tolist()})
        if trace.gap > tol:
            failures.append({'formulation': f, 'check': 'gap', 'target': trace.target,
                             'limit': trace.limit, 'gap': trace.gap})
    if dp_epsilon(m) > free_lunch_epsilon(m):
        failures.append({'check': 'dp <= flp', 'dp': dp_epsilon(m), 'flp': free_lunch_epsilon(m)})
    return failures


def check_non_attainment(m, eps_sequence=None):
    kwargs = {} if eps_sequence is None else {'eps_sequence': eps_sequence}
    failures = []
    for f in FORMULATIONS:
        trace = pml_supremum(m, f, **kwargs)
        if not trace.below_target():
            failures.append({'formulation': f, 'target': trace.target, 'values': trace.values.tolist()})
    return failures


def _as_database(mechanism):
    if isinstance(mechanism, DatabaseMechanism):
        return mechanism
    return DatabaseMechanism(DatabaseSchema(mechanism.input_labels, 1), mechanism)


class TheoremSuite(object):
    """Runs the property suites on one instance or on seeded random instances."""
    def __init__(self, cfg_file=None, log=None):
        if log is None:
            self.logger = setuplog()
        else:
            self.logger = log
        self.para = default_config(cfg_file)

    def run(self, suite, mechanism=None, prior=None, seed=None, count=None, u_kernel=None):
        if suite not in SUITES:
            raise ValueError('Unknown suite {!r}, expected one of {}'.format(suite, list(SUITES)))
        if u_kernel is not None and suite != 'low-entropy-attribute':
            raise ValueError('An attribute kernel is only used by low-entropy-attribute not {}'.format(suite))
        if mechanism is None and prior is None:
            if seed is None:
                seed = 0
            if count is None:
                count = DEFAULT_COUNTS[suite]
            self.logger.Verifylog.info('Running {} on {} random instances with seed {}'.format(suite, count, seed))
            result = self._run_random(suite, np.random.default_rng(seed), count)
        else:
            self.logger.Verifylog.info('Running {} on the given instance'.format(suite))
            result = self._run_instance(suite, mechanism, prior, seed, u_kernel)
        if result.passed:
            self.logger.Verifylog.info('{} passed on {} instance(s)'.format(suite, result.checked))
        else:
            self.logger.Verifylog.error('{} failed with {} violation(s)'.format(suite, len(result.failures)))
        return result

    def _require(self, suite, mechanism, prior):
        if mechanism is None or prior is None:
            raise ValueError('Suite {} needs both a mechanism and a prior'.format(suite))
        if isinstance(mechanism, DatabaseMechanism):
            mechanism = mechanism.channel
        return mechanism

    def _run_instance(self, suite, mechanism, prior, seed, u_kernel=None):
        tol = self.para.numeric_tol
        failures = []
        if suite in ('dp-equivalence', 'flp-equivalence', 'non-attainment'):
            if mechanism is None:
                raise ValueError('Suite {} needs a mechanism'.format(suite))
            m = _as_database(mechanism)
            if suite == 'non-attainment':
                failures = check_non_attainment(m, self.para.eps_sequence)
            else:
                failures = check_equivalence(m, suite.split('-')[0], self.para.equivalence_tol,
                                             self.para.eps_sequence, logger=self.logger.Equivlog)
        elif suite == 'min-cost-disclosure':
            if prior is None:
                raise ValueError('Suite {} needs a prior'.format(suite))
            failures = check_min_cost_disclosure(prior)
            if mechanism is not None:
                failures += check_infinite_capacity(self._require(suite, mechanism, prior), prior, tol)
        else:
            c = self._require(suite, mechanism, prior)
            if suite == 'pml-dominance':
                failures = check_dominance(c, prior, tol)
            elif suite == 'entropy-floor':
                failures = check_entropy_floor(c, prior, tol)
            elif suite == 'disclosure-prevention':
                failures = check_disclosure_prevention(c, prior, tol)
            elif suite == 'capacity-floor':
                failures = check_capacity_floor(c, prior, tol)
            elif suite == 'low-entropy-attribute':
                if u_kernel is None:
                    u_kernel = Channel.identity(c.input_labels)
                failures = check_low_entropy_attribute(c, prior, u_kernel, tol=tol)
            elif suite == 'singling-out':
                failures = check_singling_out(c, prior) or []
            elif suite == 'ubiquity':
                rng = np.random.default_rng(0 if seed is None else seed)
                priors = [prior] + [Pmf(prior.labels, random_pmf(rng, len(prior)).probs) for _ in range(5)]
                failures = check_ubiquity(c, priors)
        return SuiteResult(suite, 1, failures)

    def _run_random(self, suite, rng, count):
        tol = self.para.numeric_tol
        failures = []
        checked = 0
        draws = 0
        while checked < count:
            draws += 1
            if draws > MAX_DRAWS * count:
                raise RuntimeError('Could not draw {} admissible instances for {}'.format(count, suite))
            found = self._random_case(suite, rng, tol)
            if found is None:
                continue
            checked += 1
            failures.extend(found)
        return SuiteResult(suite, checked, failures)

    def _random_case(self, suite, rng, tol):
        if suite == 'pml-dominance':
            return check_dominance(*_random_instance(rng), tol=tol)
        if suite == 'entropy-floor':
            return check_entropy_floor(*_random_instance(rng), tol=tol)
        if suite == 'disclosure-prevention':
            return check_disclosure_prevention(*_random_instance(rng), tol=tol)
        if suite == 'capacity-floor':
            return check_capacity_floor(*_random_instance(rng), tol=tol)
        if suite == 'singling-out':
            return check_singling_out(*_random_instance(rng, mix=0.9))
        if suite == 'low-entropy-attribute':
            c, prior = _random_instance(rng)
            bank = deterministic_kernels(len(prior))
            nonconstant = np.flatnonzero(bank.any(axis=1).sum(axis=1) >= 2)
            kmap = bank[rng.choice(nonconstant)].argmax(axis=1)
            u_kernel = Channel.from_function(prior.labels, lambda x: int(kmap[prior.index(x)]))
            p_u = push_forward(u_kernel, prior)
            witness = detect_disclosure(c, prior, u_kernel, threshold=1.).witness
            if witness.mass <= p_u.probs.max():
                return None
            return check_low_entropy_attribute(c, prior, u_kernel, fraction=rng.uniform(0.05, 0.95), tol=tol)
        if suite == 'min-cost-disclosure':
            nx = int(rng.integers(2, 5))
            prior = random_pmf(rng, nx)
            c = random_infinite_capacity_channel(rng, nx, int(rng.integers(2, 5)))
            return check_min_cost_disclosure(prior) + check_infinite_capacity(c, prior, tol)
        if suite == 'ubiquity':
            nx = int(rng.integers(2, 5))
            c = random_channel(rng, nx, int(rng.integers(2, 5)), mix=0.1, zero_prob=0.4)
            priors = [random_pmf(rng, nx) for _ in range(5)]
            return check_ubiquity(c, priors)
        m = random_database_mechanism(rng, int(rng.integers(2, 4)))
        if suite == 'non-attainment':
            return check_non_attainment(m, self.para.eps_sequence)
        return check_equivalence(m, suite.split('-')[0], self.para.equivalence_tol, self.para.eps_sequence)
