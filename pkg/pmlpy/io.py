import json
from pmlpy.prob import Pmf, Channel
from pmlpy.database import DatabaseSchema, DatabaseMechanism, DatabasePrior
from pmlpy.utils import check_path


def _load(path, key):
    check_path(key, path)
    with open(path) as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError('Cannot parse {} file {}: {}'.format(key, path, e))


def _require(data, keys, path):
    if not isinstance(data, dict):
        raise ValueError('{} should hold a JSON object'.format(path))
    missing = [k for k in keys if k not in data]
    if missing:
        raise ValueError('{} misses keys {}'.format(path, missing))


def _label(v):
    if isinstance(v, dict):
        raise ValueError('labels should be scalars or lists not {!r}'.format(v))
    return tuple(v) if isinstance(v, list) else v


def channel_from_dict(data, path='<dict>'):
    _require(data, ['input_labels', 'output_labels', 'rows'], path)
    return Channel([_label(v) for v in data['input_labels']],
                   [_label(v) for v in data['output_labels']], data['rows'])


def read_mechanism(path):
    """Channel, or DatabaseMechanism when the file names an entry alphabet"""
    data = _load(path, 'mechanism')
    channel = channel_from_dict(data, path)
    if 'entry_alphabet' in data:
        schema = DatabaseSchema(data['entry_alphabet'], data.get('n', 1))
        return DatabaseMechanism(schema, channel)
    return channel


def read_kernel(path):
    return channel_from_dict(_load(path, 'kernel'), path)


def read_prior(path):
    data = _load(path, 'prior')
    _require(data, ['labels', 'probs'], path)
    return Pmf([_label(v) for v in data['labels']], data['probs'])


def read_database_prior(path, schema=None):
    data = _load(path, 'prior')
    if 'factors' in data:
        if schema is None:
            _require(data, ['entry_alphabet', 'n'], path)
        schema = schema or DatabaseSchema(data['entry_alphabet'], data['n'])
        return DatabasePrior.product(schema, [Pmf(schema.entry_alphabet, f) for f in data['factors']])
    _require(data, ['labels', 'probs'], path)
    if schema is None:
        _require(data, ['entry_alphabet', 'n'], path)
        schema = DatabaseSchema(data['entry_alphabet'], data['n'])
    return DatabasePrior.explicit(schema, Pmf(schema.labels, data['probs']))


def channel_to_dict(channel):
    return {'input_labels': list(channel.input_labels),
            'output_labels': list(channel.output_labels),
            'rows': channel.matrix.tolist()}


def pmf_to_dict(pmf):
    return {'labels': list(pmf.labels), 'probs': pmf.probs.tolist()}


def _dump(data, path):
    with open(path, 'w') as f:
        json.dump(data, f, indent=2)
        f.write('\n')
    return path


def write_channel(channel, path):
    return _dump(channel_to_dict(channel), path)


def write_mechanism(mechanism, path):
    if isinstance(mechanism, DatabaseMechanism):
        data = channel_to_dict(mechanism.channel)
        data['entry_alphabet'] = list(mechanism.schema.entry_alphabet)
        data['n'] = mechanism.schema.n
        return _dump(data, path)
    return write_channel(mechanism, path)


def write_prior(prior, path):
    if isinstance(prior, DatabasePrior):
        data = {'labels': list(prior.schema.labels), 'probs': prior.probs.tolist(),
                'entry_alphabet': list(prior.schema.entry_alphabet), 'n': prior.schema.n}
        if prior.factors is not None:
            data['factors'] = [f.probs.tolist() for f in prior.factors]
        return _dump(data, path)
    return _dump(pmf_to_dict(prior), path)
