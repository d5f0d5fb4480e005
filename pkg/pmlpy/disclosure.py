from collections import namedtuple
import numpy as np
from pmlpy.prob import (Channel, Joint, AlphabetError, SUPPORT_FLOOR, min_entropy,
                        posterior, push_forward)


DisclosureWitness = namedtuple('DisclosureWitness', ['y', 'u', 'mass', 'min_entropy'])


class Disclosure(object):
    """Outcome of a disclosure search over the outcomes of a mechanism.

    ``attained`` marks an outcome whose attribute posterior is degenerate,
    which is disclosure in the exact sense regardless of the threshold.
    """
    def __init__(self, disclosed, witness, attained):
        self.disclosed = disclosed
        self.witness = witness
        self.attained = attained

    @property
    def singled_out(self):
        return self.disclosed

    def __repr__(self):
        return 'Disclosure(disclosed={}, attained={}, witness={})'.format(
               self.disclosed, self.attained, self.witness)


def detect_disclosure(c, adversary_prior, u_kernel, threshold):
    if threshold <= 0:
        raise ValueError('threshold should be positive not {}'.format(threshold))
    if u_kernel.input_labels != c.input_labels:
        raise AlphabetError('u_kernel inputs {} do not match channel inputs {}'.format(
                            list(u_kernel.input_labels), list(c.input_labels)))
    j = Joint(c, adversary_prior)
    best = None
    for yi, y in enumerate(c.output_labels):
        if j.marginal_probs[yi] <= SUPPORT_FLOOR:
            continue
        q_u = push_forward(u_kernel, posterior(j, y))
        mass = float(q_u.probs.max())
        if best is None or mass > best.mass + SUPPORT_FLOOR or \
                (abs(mass - best.mass) <= SUPPORT_FLOOR and str(y) < str(best.y)):
            best = DisclosureWitness(y, q_u.argmax(), mass, min_entropy(q_u))
    attained = best.mass >= 1 - SUPPORT_FLOOR
    return Disclosure(attained or best.min_entropy < threshold, best, attained)


def detect_singling_out(c, prior, threshold):
    return detect_disclosure(c, prior, Channel.identity(c.input_labels), threshold)


def posterior_entropy_floor(prior_entropy_u, pml_at_y):
    """Lower bound on the posterior min-entropy of any attribute at one outcome.

    :param prior_entropy_u: Min-entropy of the attribute under the true prior
    :param pml_at_y: Leakage of the outcome under the true prior
    """
    if prior_entropy_u < 0 or pml_at_y < 0:
        raise ValueError('entropy and leakage should be non-negative, got {} and {}'.format(
                         prior_entropy_u, pml_at_y))
    return max(0., prior_entropy_u - pml_at_y)


def capacity_entropy_floor(adversary_prior, capacity):
    if len(adversary_prior) < 2:
        raise ValueError('Entropy floor needs at least two symbols')
    if not adversary_prior.is_full_support():
        raise ValueError('Adversary prior should have full support')
    if capacity < 0:
        raise ValueError('capacity should be non-negative not {}'.format(capacity))
    if np.isinf(capacity):
        return 0.
    minq = adversary_prior.probs.min()
    return float(np.log1p(minq / (1 - minq) * np.exp(-capacity)))


def low_entropy_threshold(p_u, disclosed_u):
    p_d = p_u.prob(disclosed_u)
    if p_d >= 1:
        raise ValueError('Attribute prior is degenerate at {!r}'.format(disclosed_u))
    return float((p_u.probs.max() - p_d) / (1 - p_d))


def construct_low_entropy_disclosed_attribute(p_u, disclosed_u, lam):
    """Kernel ``P_W|U`` that lowers entropy while keeping a disclosure.

    Row ``disclosed_u`` is degenerate on itself, every other row ``u``
    moves mass ``lam`` onto ``disclosed_u`` and keeps ``1 - lam`` on ``u``.
    """
    threshold = low_entropy_threshold(p_u, disclosed_u)
    if not 0 < lam < 1:
        raise ValueError('lambda should be in (0, 1) not {}'.format(lam))
    if lam <= threshold:
        raise ValueError('lambda {} should exceed the threshold {:.6f}'.format(lam, threshold))
    d = p_u.index(disclosed_u)
    rows = (1 - lam) * np.eye(len(p_u))
    rows[:, d] += lam
    rows[d] = 0.
    rows[d, d] = 1.
    return Channel(p_u.labels, p_u.labels, rows)


def construct_min_cost_disclosure(prior, alpha):
    """Binary mechanism disclosing ``U = 1{X != x_min}`` at outcome 0.

    :return: The mechanism over outputs (0, 1) and the attribute kernel
    :rtype: tuple
    """
    if not prior.is_full_support() or len(prior) < 2:
        raise ValueError('Prior should have full support on at least two symbols')
    pmin = float(prior.probs.min())
    alpha_max = pmin / (1 - pmin)
    if not 0 < alpha < 1:
        raise ValueError('alpha should be in (0, 1) not {}'.format(alpha))
    if alpha >= alpha_max:
        raise ValueError('alpha {} should be below p_min / (1 - p_min) = {:.6f}'.format(alpha, alpha_max))
    x_min = prior.argmin()
    rows = np.array([[0., 1.] if x == x_min else [alpha, 1 - alpha] for x in prior.labels])
    mechanism = Channel(prior.labels, (0, 1), rows)
    u_kernel = Channel.from_function(prior.labels, lambda x: int(x != x_min), (0, 1))
    return mechanism, u_kernel
