import json
from pmlpy.prob import Joint, min_entropy
from pmlpy.leakage import pml_profile, leakage_capacity, epsilon_max, check_eps_pml, PriorSet
from pmlpy.disclosure import detect_singling_out, posterior_entropy_floor
from pmlpy.database import DatabaseMechanism, DatabasePrior, dp_epsilon, free_lunch_epsilon, entry_joint
from pmlpy.para import default_config
from pmlpy.setuplog import setuplog
from pmlpy.utils import fmt_float


class LeakageAnalysis(object):
    """Leakage report of one mechanism under one prior.

    :param mechanism: Channel or database mechanism
    :param prior: Prior of the mechanism input
    :type prior: pmlpy.prob.Pmf
    :param cfg_file: Optional configure file, see :func:`pmlpy.para.default_config`
    :param log: A :class:`pmlpy.setuplog.setuplog` instance
    """
    def __init__(self, mechanism, prior, cfg_file=None, log=None):
        if log is None:
            self.logger = setuplog()
        else:
            self.logger = log
        self.para = default_config(cfg_file)
        if isinstance(mechanism, DatabaseMechanism):
            self.database = mechanism
            self.channel = mechanism.channel
        else:
            self.database = None
            self.channel = mechanism
        self.prior = prior
        self.joint = Joint(self.channel, prior)
        self.profile = None
        self.capacity = None
        self.eps_max = None
        self.singling = None
        self.entry_profiles = None
        self.certification = None
        self.threshold = self.para.singling_threshold

    def run(self, threshold=None):
        if threshold is not None:
            if not threshold > 0:
                raise ValueError('threshold should be positive not {}'.format(threshold))
            self.threshold = threshold
        self.logger.Leakagelog.info('Computing PML of {} outcomes'.format(len(self.channel.output_labels)))
        self.profile = pml_profile(self.joint)
        self.capacity = leakage_capacity(self.channel)
        if self.prior.is_full_support():
            self.eps_max = epsilon_max(self.prior)
        else:
            self.logger.Leakagelog.warning('Prior has no full support, epsilon_max is undefined')
            self.eps_max = None
        self.singling = detect_singling_out(self.channel, self.prior, self.threshold)
        if self.database is not None and self.prior.is_full_support():
            db_prior = DatabasePrior.explicit(self.database.schema, self.prior)
            self.entry_profiles = [pml_profile(entry_joint(self.database, db_prior, i))
                                   for i in range(self.database.schema.n)]
        self.logger.Leakagelog.info('sup-PML {} at y={!r}, capacity {}'.format(
            fmt_float(self.profile.sup), self.profile.witness, fmt_float(self.capacity)))
        return self

    def certify(self, eps):
        """Check eps-PML over the simplex grid of priors of the configured resolution.

        Only grid members are checked, the worst value is a lower estimate of
        the supremum over all full-support priors.
        """
        if not eps >= 0:
            raise ValueError('eps should be non-negative not {}'.format(eps))
        priors = PriorSet.simplex(self.channel.input_labels, self.para.simplex_resolution)
        self.certification = check_eps_pml(self.channel, priors, eps)
        self.logger.Leakagelog.info('{}-PML {} on the simplex grid of resolution {}, worst {} at y={!r}'.format(
            fmt_float(eps), 'holds' if self.certification.holds else 'fails', self.para.simplex_resolution,
            fmt_float(self.certification.worst_value), self.certification.worst_y))
        return self.certification

    def _check_run(self):
        if self.profile is None:
            self.run()

    @property
    def entropy_floor(self):
        """Posterior min-entropy floor of the input at the worst outcome"""
        self._check_run()
        return posterior_entropy_floor(min_entropy(self.prior), self.profile.sup)

    def to_dict(self):
        self._check_run()
        report = {'pml': {str(y): v for y, v in self.profile.per_outcome.items()},
                  'sup_pml': self.profile.sup,
                  'witness': str(self.profile.witness),
                  'capacity': self.capacity,
                  'epsilon_max': self.eps_max,
                  'prior_min_entropy': min_entropy(self.prior),
                  'entropy_floor': self.entropy_floor,
                  'singling_out': {'threshold': self.threshold,
                                   'singled_out': self.singling.singled_out,
                                   'attained': self.singling.attained,
                                   'y': str(self.singling.witness.y),
                                   'posterior_min_entropy': self.singling.witness.min_entropy}}
        if self.database is not None:
            report['dp_epsilon'] = dp_epsilon(self.database)
            report['flp_epsilon'] = free_lunch_epsilon(self.database)
        if self.entry_profiles is not None:
            report['entry_sup_pml'] = [p.sup for p in self.entry_profiles]
        if self.certification is not None:
            cert = self.certification
            report['certification'] = {'eps': cert.eps, 'holds': cert.holds, 'worst_pml': cert.worst_value,
                                       'y': str(cert.worst_y), 'resolution': self.para.simplex_resolution,
                                       'kind': cert.label}
        return report

    def to_json(self):
        # inf has no JSON literal
        report = self.to_dict()
        for key in ('capacity', 'dp_epsilon', 'flp_epsilon'):
            if key in report and report[key] == float('inf'):
                report[key] = 'inf'
        return json.dumps(report, indent=2)

    def to_text(self):
        report = self.to_dict()
        lines = ['pml,{},{}'.format(y, fmt_float(v)) for y, v in report['pml'].items()]
        lines.append('sup_pml,{}'.format(fmt_float(report['sup_pml'])))
        lines.append('witness,{}'.format(report['witness']))
        lines.append('capacity,{}'.format(fmt_float(report['capacity'])))
        lines.append('epsilon_max,{}'.format(fmt_float(report['epsilon_max'])))
        lines.append('prior_min_entropy,{}'.format(fmt_float(report['prior_min_entropy'])))
        lines.append('entropy_floor,{}'.format(fmt_float(report['entropy_floor'])))
        if self.database is not None:
            lines.append('dp_epsilon,{}'.format(fmt_float(report['dp_epsilon'])))
            lines.append('flp_epsilon,{}'.format(fmt_float(report['flp_epsilon'])))
        for i, v in enumerate(report.get('entry_sup_pml', [])):
            lines.append('entry_sup_pml,{},{}'.format(i, fmt_float(v)))
        if 'certification' in report:
            cert = report['certification']
            lines.append('certified,{},eps={},worst={},y={}'.format(
                         'yes' if cert['holds'] else 'no', fmt_float(cert['eps']), fmt_float(cert['worst_pml']),
                         cert['y']))
        singling = report['singling_out']
        lines.append('singling_out,{},threshold={},y={},posterior_min_entropy={}'.format(
                     'yes' if singling['singled_out'] else 'no', fmt_float(singling['threshold']),
                     singling['y'], fmt_float(singling['posterior_min_entropy'])))
        return '\n'.join(lines)

    def to_frame(self):
        self._check_run()
        return self.profile.to_frame()
