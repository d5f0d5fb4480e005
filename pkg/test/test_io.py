import json
import numpy as np
import pytest
from pmlpy.prob import Pmf, Channel
from pmlpy.database import DatabaseSchema, DatabaseMechanism, DatabasePrior
from pmlpy.io import (read_mechanism, read_kernel, read_prior, read_database_prior,
                      write_channel, write_mechanism, write_prior)


def flip(q=0.25):
    return Channel([0, 1], [0, 1], [[1 - q, q], [q, 1 - q]])


def dump(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_channel_file(tmp_path):
    path = write_channel(flip(), str(tmp_path / 'flip.json'))
    c = read_mechanism(path)
    assert isinstance(c, Channel)
    assert c.input_labels == (0, 1)
    assert c.matrix == pytest.approx(flip().matrix)
    assert read_kernel(path).output_labels == (0, 1)


def test_prior_file(tmp_path):
    prior = Pmf(['a', 'b'], [0.7, 0.3])
    back = read_prior(write_prior(prior, str(tmp_path / 'prior.json')))
    assert back.labels == ('a', 'b')
    assert back.probs == pytest.approx([0.7, 0.3])


def test_database_mechanism_file(tmp_path):
    schema = DatabaseSchema([0, 1], 2)
    m = DatabaseMechanism.from_entry_channel(schema, 0, flip())
    back = read_mechanism(write_mechanism(m, str(tmp_path / 'mech.json')))
    assert isinstance(back, DatabaseMechanism)
    assert back.schema == schema
    assert back.channel.matrix == pytest.approx(m.channel.matrix)


def test_database_prior_files(tmp_path):
    schema = DatabaseSchema([0, 1], 2)
    prior = DatabasePrior.product(schema, [Pmf([0, 1], [0.9, 0.1]), Pmf([0, 1], [0.4, 0.6])])
    back = read_database_prior(write_prior(prior, str(tmp_path / 'product.json')))
    assert back.kind == 'product'
    assert back.probs == pytest.approx(prior.probs)
    explicit = DatabasePrior.explicit(schema, [0.4, 0.1, 0.2, 0.3])
    back = read_database_prior(write_prior(explicit, str(tmp_path / 'explicit.json')))
    assert back.kind == 'explicit'
    assert back.marginal(0).probs == pytest.approx([0.5, 0.5])
    # plain pmf files are read against the mechanism schema
    path = dump(tmp_path, 'plain.json', {'labels': list(schema.labels), 'probs': [0.25] * 4})
    assert read_database_prior(path, schema).probs == pytest.approx(np.full(4, 0.25))


def test_bad_files(tmp_path):
    bad = tmp_path / 'bad.json'
    bad.write_text('{"labels": [0, 1], "probs": [0.5,')
    with pytest.raises(ValueError):
        read_prior(str(bad))
    with pytest.raises(ValueError):
        read_prior(dump(tmp_path, 'keys.json', {'labels': [0, 1]}))
    with pytest.raises(ValueError):
        read_mechanism(dump(tmp_path, 'list.json', [[1, 0], [0, 1]]))
    with pytest.raises(ValueError, match='pmf sum out of tolerance'):
        read_prior(dump(tmp_path, 'sum.json', {'labels': [0, 1], 'probs': [0.5, 0.48]}))
    with pytest.raises(FileNotFoundError):
        read_prior(str(tmp_path / 'missing.json'))
