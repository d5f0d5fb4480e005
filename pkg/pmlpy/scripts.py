import sys
import json
import argparse
import numpy as np
from pmlpy.prob import Pmf, AlphabetError
from pmlpy.io import (read_mechanism, read_kernel, read_prior, read_database_prior, write_channel, write_mechanism,
                      write_prior)
from pmlpy.analysis import LeakageAnalysis
from pmlpy.verify import TheoremSuite, SUITES
from pmlpy.disclosure import construct_min_cost_disclosure, construct_low_entropy_disclosed_attribute
from pmlpy.database import DatabaseSchema, DatabaseMechanism, SizeGuardError, adversarial_prior, correlated_prior
from pmlpy.mechanisms import (LaplaceCountingSpec, laplace_counting_leakage_exact, laplace_counting_leakage_bound,
                              laplace_counting_leakage_simplified, laplace_counting_oracle_sup,
                              laplace_counting_grid_sup, laplace_sweep, ThresholdQuerySpec,
                              threshold_query_leakage, threshold_sweep)
from pmlpy.para import default_config
from pmlpy.setuplog import setuplog
from pmlpy.utils import fmt_float, format_frame, resolve_label, parse_range


# JSONDecodeError, AlphabetError and SizeGuardError are ValueError subclasses
INPUT_ERRORS = (ValueError, AlphabetError, SizeGuardError, json.JSONDecodeError, FileNotFoundError)


def _abort(log, e):
    log.error('{}'.format(e))
    sys.exit(2)


def _emit(frame, outpath):
    text = format_frame(frame).to_csv(index=False)
    if outpath is None:
        sys.stdout.write(text)
    else:
        with open(outpath, 'w') as f:
            f.write(text)


def _symbol(text):
    try:
        return int(text)
    except ValueError:
        return text


def analyze():
    parser = argparse.ArgumentParser(description="Pointwise maximal leakage report of a mechanism under a prior")
    parser.add_argument('mechanism', type=str, help='Path to mechanism in JSON format')
    parser.add_argument('prior', type=str, help='Path to prior in JSON format')
    parser.add_argument('-c', help='Path to configure file, defaults to $PMLPY_CONFIG', dest='cfg_file',
                        default=None, metavar='cfg_file')
    parser.add_argument('-f', help='Output format, defaults to the configured format (text)', dest='format',
                        choices=['text', 'json', 'csv'], default=None)
    parser.add_argument('-t', help='Min-entropy threshold for the singling-out check, defaults to 1e-9',
                        dest='threshold', type=float, default=None, metavar='threshold')
    parser.add_argument('-e', help='Check eps-PML over the simplex grid of priors, the grid resolution is taken '
                        'from the configure file', dest='eps', type=float, default=None, metavar='eps')
    arg = parser.parse_args()
    logger = setuplog()
    try:
        mechanism = read_mechanism(arg.mechanism)
        if isinstance(mechanism, DatabaseMechanism):
            prior = read_database_prior(arg.prior, mechanism.schema).to_pmf()
        else:
            prior = read_prior(arg.prior)
        pjt = LeakageAnalysis(mechanism, prior, cfg_file=arg.cfg_file, log=logger)
        pjt.run(threshold=arg.threshold)
        if arg.eps is not None:
            pjt.certify(arg.eps)
    except INPUT_ERRORS as e:
        _abort(logger.Leakagelog, e)
    fmt = pjt.para.output_format if arg.format is None else arg.format
    if fmt == 'json':
        print(pjt.to_json())
    elif fmt == 'csv':
        _emit(pjt.to_frame(), None)
    else:
        print(pjt.to_text())


def verify():
    parser = argparse.ArgumentParser(description="Check a leakage property on one instance or on seeded random instances")
    parser.add_argument('suite', type=str, choices=SUITES, help='Property suite to run')
    parser.add_argument('-i', help='Path to mechanism in JSON format', dest='mechanism', default=None,
                        metavar='mechanism')
    parser.add_argument('-p', help='Path to prior in JSON format', dest='prior', default=None, metavar='prior')
    parser.add_argument('-u', help='Attribute kernel in JSON format (low-entropy-attribute), defaults to the identity',
                        dest='kernel', default=None, metavar='kernel')
    parser.add_argument('-r', help='Run on COUNT random instances drawn with SEED', dest='random', nargs=2,
                        type=int, default=None, metavar=('seed', 'count'))
    parser.add_argument('-c', help='Path to configure file, defaults to $PMLPY_CONFIG', dest='cfg_file',
                        default=None, metavar='cfg_file')
    parser.add_argument('-o', help='Write the result in JSON format to this file', dest='outpath', default=None,
                        metavar='outpath')
    arg = parser.parse_args()
    logger = setuplog()
    if arg.random is not None and (arg.mechanism is not None or arg.prior is not None or arg.kernel is not None):
        parser.error('-r cannot be combined with -i, -p or -u')
    try:
        suite = TheoremSuite(arg.cfg_file, log=logger)
        mechanism = None if arg.mechanism is None else read_mechanism(arg.mechanism)
        prior = None if arg.prior is None else read_prior(arg.prior)
        u_kernel = None if arg.kernel is None else read_kernel(arg.kernel)
        if arg.random is None:
            result = suite.run(arg.suite, mechanism=mechanism, prior=prior, u_kernel=u_kernel)
        else:
            result = suite.run(arg.suite, seed=arg.random[0], count=arg.random[1])
    except INPUT_ERRORS as e:
        _abort(logger.Verifylog, e)
    report = json.dumps(result.to_dict(), indent=2, default=str)
    if arg.outpath is not None:
        with open(arg.outpath, 'w') as f:
            f.write(report + '\n')
    if not result.passed:
        print(report)
        sys.exit(1)
    print('{},pass,{}'.format(result.suite, result.checked))


def laplace():
    parser = argparse.ArgumentParser(description="Leakage about one entry of the Laplace counting query")
    parser.add_argument('-n', help='Number of entries', type=int, required=True)
    parser.add_argument('-b', help='Laplace scale', type=float, required=True)
    parser.add_argument('-c', help='Margin of the prior family, p in (c, 1 - c)', type=float, default=None)
    parser.add_argument('-p', help='Probability that one entry satisfies the predicate', type=float, default=None)
    parser.add_argument('--sweep', help='Sweep one parameter, e.g. b=0.001/0.1/50', default=None,
                        metavar='key=start/stop/num')
    parser.add_argument('-o', help='CSV file for the sweep, defaults to stdout', dest='outpath', default=None)
    parser.add_argument('--check', help='Also print the outcome-grid supremum (with -p) and the prior-grid '
                        'supremum (with -c), grids are taken from the configure file', action='store_true',
                        default=False)
    parser.add_argument('--config', help='Path to configure file, defaults to $PMLPY_CONFIG', dest='cfg_file',
                        default=None, metavar='cfg_file')
    arg = parser.parse_args()
    logger = setuplog()
    try:
        para = default_config(arg.cfg_file)
        if arg.sweep is None:
            spec = LaplaceCountingSpec(arg.n, arg.b, p=arg.p, c=arg.c)
        else:
            key, _, rng = arg.sweep.partition('=')
            if key not in ('n', 'b', 'c', 'p'):
                raise ValueError('Sweep key should be one of n, b, c, p not {!r}'.format(key))
            values = dict(n=arg.n, b=arg.b, c=arg.c, p=arg.p)
            values[key] = parse_range(rng, 'sweep')
            if key == 'n':
                values['n'] = np.round(values['n']).astype(int)
            frame = laplace_sweep(values['n'], values['b'], c=values['c'], p=values['p'])
    except INPUT_ERRORS as e:
        _abort(logger.Mechlog, e)
    if arg.sweep is not None:
        logger.Mechlog.info('{} grid points evaluated'.format(frame.shape[0]))
        _emit(frame, arg.outpath)
        return
    print('dp,{}'.format(fmt_float(spec.dp_epsilon)))
    if spec.p is not None:
        print('exact,{}'.format(fmt_float(laplace_counting_leakage_exact(spec.n, spec.b, spec.p))))
    if spec.c is not None:
        print('bound,{}'.format(fmt_float(laplace_counting_leakage_bound(spec.n, spec.b, spec.c))))
        if spec.n * spec.b >= 1:
            print('simplified,{}'.format(fmt_float(laplace_counting_leakage_simplified(spec.n, spec.b, spec.c))))
    if not arg.check:
        return
    try:
        if spec.p is not None:
            oracle = laplace_counting_oracle_sup(spec.n, spec.b, spec.p, y_grid=para.y_grid)
            print('oracle,{}'.format(fmt_float(oracle)))
        if spec.c is not None:
            grid_sup = laplace_counting_grid_sup(spec.n, spec.b, spec.c, para.p_grid_size)
            print('grid_sup,{}'.format(fmt_float(grid_sup)))
    except INPUT_ERRORS as e:
        _abort(logger.Mechlog, e)


def threshold():
    parser = argparse.ArgumentParser(description="Leakage of a deterministic threshold query about one individual")
    parser.add_argument('-n', help='Number of individuals, several values are allowed with --sweep', type=int,
                        nargs='+', required=True)
    parser.add_argument('-m', help='Threshold', type=int, default=None)
    parser.add_argument('-p', help='Probability of the sensitive attribute, several values are allowed with --sweep',
                        type=float, nargs='+', required=True)
    parser.add_argument('-a', help='Released answer, defaults to 1', dest='answer', type=int, choices=[0, 1], default=1)
    parser.add_argument('--sweep', help='Evaluate every threshold m in [0, n]', action='store_true', default=False)
    parser.add_argument('-o', help='CSV file for the sweep, defaults to stdout', dest='outpath', default=None)
    arg = parser.parse_args()
    logger = setuplog()
    reference = float(-np.log(0.7))
    if not arg.sweep:
        if arg.m is None or len(arg.n) != 1 or len(arg.p) != 1:
            parser.error('A single n, p and -m are required without --sweep')
        try:
            res = threshold_query_leakage(ThresholdQuerySpec(arg.n[0], arg.m, arg.p[0], arg.answer))
        except INPUT_ERRORS as e:
            _abort(logger.Mechlog, e)
        print('exact,{}'.format(fmt_float(res.exact)))
        print('bound,{}'.format(fmt_float(res.chernoff_bound)))
        print('reference,{}'.format(fmt_float(reference)))
        if res.zero_probability:
            print('zero_probability,yes')
        return
    try:
        frame = threshold_sweep(arg.n, arg.p, answer=arg.answer,
                                ms=None if arg.m is None else [arg.m], reference=reference)
    except INPUT_ERRORS as e:
        _abort(logger.Mechlog, e)
    logger.Mechlog.info('{} thresholds evaluated'.format(frame.shape[0]))
    _emit(frame, arg.outpath)


def _construct_min_cost(arg, logger):
    prior = read_prior(arg.prior)
    alpha = arg.alpha
    if alpha is None:
        pmin = float(prior.probs.min())
        alpha = 0.5 * pmin / (1 - pmin)
    mechanism, u_kernel = construct_min_cost_disclosure(prior, alpha)
    files = [write_channel(mechanism, arg.outprefix + '_mechanism.json'),
             write_channel(u_kernel, arg.outprefix + '_kernel.json')]
    logger.Constructlog.info('Minimal-cost disclosing mechanism with alpha={}'.format(alpha))
    return files


def _construct_low_entropy(arg, logger):
    p_u = read_prior(arg.prior)
    d = resolve_label(p_u.labels, arg.disclosed)
    kernel = construct_low_entropy_disclosed_attribute(p_u, d, arg.lam)
    logger.Constructlog.info('Entropy-lowering attribute for u={!r} with lambda={}'.format(d, arg.lam))
    return [write_channel(kernel, arg.outprefix + '_attribute.json')]


def _construct_prior(arg, logger):
    if arg.mechanism is not None:
        m = read_mechanism(arg.mechanism)
        if not isinstance(m, DatabaseMechanism):
            raise ValueError('{} is not a database mechanism'.format(arg.mechanism))
        schema = m.schema
    elif arg.kind == 'product-target':
        if arg.alphabet is None or arg.n is None:
            raise ValueError('product-target needs -i or both --alphabet and -n')
        m = None
        schema = DatabaseSchema([_symbol(v) for v in arg.alphabet.split(',')], arg.n)
    else:
        raise ValueError('{} needs a database mechanism (-i)'.format(arg.kind))
    params = {'schema': schema, 'mechanism': m, 'i': arg.entry}
    if arg.kind == 'product-target':
        target = [schema.entry_alphabet[0]] * schema.n if arg.target is None else \
                 [resolve_label(schema.entry_alphabet, v) for v in arg.target.split(',')]
        params['target'] = target
    else:
        params['y'] = resolve_label(m.output_labels, arg.y)
    if arg.kind == 'conditional-entry':
        params['d_minus_i'] = [resolve_label(schema.entry_alphabet, v) for v in arg.rest.split(',')]
    if arg.kind == 'correlated-entry':
        params['d_i'] = resolve_label(schema.entry_alphabet, arg.d_i)
        params['d_i_prime'] = resolve_label(schema.entry_alphabet, arg.d_i_prime)
    built = adversarial_prior(arg.kind, params, arg.eps)
    logger.Constructlog.info('Adversarial prior {} with eps={}'.format(arg.kind, arg.eps))
    if arg.kind == 'correlated-entry':
        entry_probs = np.full(schema.k, arg.eps / (schema.k - 1))
        entry_probs[schema.entry_index(params['d_i_prime'])] = 1 - arg.eps
        entry = Pmf(schema.entry_alphabet, entry_probs)
        return [write_channel(built, arg.outprefix + '_kernel.json'),
                write_prior(correlated_prior(m, arg.entry, entry, built), arg.outprefix + '_prior.json')]
    if arg.kind == 'conditional-entry':
        return [write_prior(built, arg.outprefix + '_prior.json')]
    files = [write_prior(built, arg.outprefix + '_prior.json')]
    if m is not None:
        files.append(write_mechanism(m, arg.outprefix + '_mechanism.json'))
    return files


def construct():
    parser = argparse.ArgumentParser(description="Write the disclosure and adversarial-prior constructions to JSON files")
    parser.add_argument('kind', type=str, choices=['min-cost', 'low-entropy-attr', 'adversarial-prior'],
                        help='Construction to build')
    parser.add_argument('-o', help='Prefix of output files', dest='outprefix', required=True, metavar='prefix')
    parser.add_argument('-p', help='Prior (min-cost) or attribute prior (low-entropy-attr) in JSON format',
                        dest='prior', default=None)
    parser.add_argument('-a', help='Leak probability of the min-cost mechanism, defaults to p_min / (1 - p_min) / 2',
                        dest='alpha', type=float, default=None)
    parser.add_argument('-u', help='Disclosed attribute value (low-entropy-attr)', dest='disclosed', default=None)
    parser.add_argument('-l', help='Mixing weight lambda (low-entropy-attr)', dest='lam', type=float, default=None)
    parser.add_argument('-k', help='Prior kind (adversarial-prior), defaults to product-target', dest='kind_prior',
                        choices=['product-target', 'conditional-entry', 'correlated-entry', 'joint-target'],
                        default='product-target')
    parser.add_argument('-e', help='Construction epsilon, defaults to 0.1', dest='eps', type=float, default=0.1)
    parser.add_argument('-i', help='Database mechanism in JSON format', dest='mechanism', default=None)
    parser.add_argument('--alphabet', help='Entry alphabet separated by commas, e.g. 0,1', default=None)
    parser.add_argument('-n', help='Number of entries', type=int, default=None)
    parser.add_argument('-t', help='Target database separated by commas, defaults to the first symbol everywhere',
                        dest='target', default=None)
    parser.add_argument('--entry', help='0-based entry index, defaults to 0', type=int, default=0)
    parser.add_argument('--rest', help='Other entries separated by commas (conditional-entry)', default=None)
    parser.add_argument('--d-i', help='Entry value steered to the likeliest rest (correlated-entry)',
                        dest='d_i', default=None)
    parser.add_argument('--d-i-prime', help='Entry value steered to the least likely rest (correlated-entry)',
                        dest='d_i_prime', default=None)
    parser.add_argument('-y', help='Mechanism outcome', default=None)
    arg = parser.parse_args()
    logger = setuplog()
    try:
        if arg.kind == 'min-cost':
            if arg.prior is None:
                parser.error('min-cost needs a prior (-p)')
            files = _construct_min_cost(arg, logger)
        elif arg.kind == 'low-entropy-attr':
            if None in (arg.prior, arg.disclosed, arg.lam):
                parser.error('low-entropy-attr needs -p, -u and -l')
            files = _construct_low_entropy(arg, logger)
        else:
            arg.kind = arg.kind_prior
            if arg.kind != 'product-target' and arg.y is None:
                parser.error('{} needs an outcome (-y)'.format(arg.kind))
            if arg.kind == 'conditional-entry' and arg.rest is None:
                parser.error('conditional-entry needs --rest')
            if arg.kind == 'correlated-entry' and None in (arg.d_i, arg.d_i_prime):
                parser.error('correlated-entry needs --d-i and --d-i-prime')
            files = _construct_prior(arg, logger)
    except INPUT_ERRORS as e:
        _abort(logger.Constructlog, e)
    for fname in files:
        print(fname)
