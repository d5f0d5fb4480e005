from os.path import exists
import numpy as np


def check_path(key, path):
    if not exists(path):
        raise FileNotFoundError('No such file or directory of {}: {}'.format(key, path))
    else:
        return path


def fmt_float(value):
    """Six decimals, scientific notation below 1e-4"""
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return 'none'
    if np.isinf(value):
        return 'inf' if value > 0 else '-inf'
    if value != 0 and abs(value) < 1e-4:
        return '{:.6e}'.format(value)
    return '{:.6f}'.format(value)


def resolve_label(labels, text):
    """Match a command-line string against an alphabet by value or by ``str``"""
    for la in labels:
        if la == text or str(la) == str(text):
            return la
    raise ValueError('Unknown symbol {!r}, expected one of {}'.format(text, list(labels)))


def parse_range(text, key='range'):
    """Parse ``start/stop/num`` into a numpy grid"""
    try:
        start, stop, num = text.split('/')
        return np.linspace(float(start), float(stop), int(num))
    except ValueError:
        raise ValueError('{} should be start/stop/num not {!r}'.format(key, text))


def format_frame(frame):
    """Copy of ``frame`` with float columns rendered by :func:`fmt_float`"""
    out = frame.copy()
    for col in out.columns:
        if out[col].dtype.kind == 'f' or out[col].dtype == object:
            out[col] = out[col].map(lambda v: fmt_float(v) if v is None or isinstance(v, float) else v)
    return out
