import os
import configparser
import numpy as np
from pmlpy.mechanisms import default_y_grid
from pmlpy.utils import check_path


CONFIG_ENV = 'PMLPY_CONFIG'


class AnalysisConfig(object):
    def __init__(self):
        self.numeric_tol = 1e-9
        self.equivalence_tol = 1e-4
        self.eps_sequence = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
        self.simplex_resolution = 10
        self.p_grid_size = 21
        self.y_grid_min = -2.
        self.y_grid_max = 3.
        self.y_grid_size = 1001
        self.y_tails = (-10., 10.)
        self.singling_threshold = 1e-9
        self.output_format = 'text'

    def get_para(self):
        return self.__dict__

    @property
    def y_grid(self):
        return default_y_grid(self.y_grid_min, self.y_grid_max, self.y_grid_size, self.y_tails)

    @property
    def numeric_tol(self):
        return self._numeric_tol

    @numeric_tol.setter
    def numeric_tol(self, value):
        self._numeric_tol = _positive('numeric_tol', value)

    @property
    def equivalence_tol(self):
        return self._equivalence_tol

    @equivalence_tol.setter
    def equivalence_tol(self, value):
        self._equivalence_tol = _positive('equivalence_tol', value)

    @property
    def singling_threshold(self):
        return self._singling_threshold

    @singling_threshold.setter
    def singling_threshold(self, value):
        self._singling_threshold = _positive('singling_threshold', value)

    @property
    def eps_sequence(self):
        return self._eps_sequence

    @eps_sequence.setter
    def eps_sequence(self, value):
        value = tuple(float(v) for v in value)
        if len(value) == 0:
            raise ValueError('eps_sequence should not be empty')
        if any(not 0 < v < 1 for v in value) or any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError('eps_sequence should be strictly decreasing in (0, 1) not {}'.format(value))
        self._eps_sequence = value

    @property
    def simplex_resolution(self):
        return self._simplex_resolution

    @simplex_resolution.setter
    def simplex_resolution(self, value):
        self._simplex_resolution = _count('simplex_resolution', value)

    @property
    def p_grid_size(self):
        return self._p_grid_size

    @p_grid_size.setter
    def p_grid_size(self, value):
        self._p_grid_size = _count('p_grid_size', value)

    @property
    def y_grid_size(self):
        return self._y_grid_size

    @y_grid_size.setter
    def y_grid_size(self, value):
        self._y_grid_size = _count('y_grid_size', value)

    @property
    def output_format(self):
        return self._output_format

    @output_format.setter
    def output_format(self, value):
        if not isinstance(value, str):
            raise TypeError('output_format should be \'str\' type not \'{0}\''.format(type(value)))
        if value.lower() not in ('text', 'json', 'csv'):
            raise ValueError('output_format should be in text, json or csv not {}'.format(value))
        self._output_format = value.lower()


def _positive(key, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise TypeError('{} should be \'float\' type not \'{}\''.format(key, type(value)))
    if not value > 0:
        raise ValueError('{} should be positive not {}'.format(key, value))
    return float(value)


def _count(key, value):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise TypeError('{} should be \'int\' type not \'{}\''.format(key, type(value)))
    if value < 1:
        raise ValueError('{} should be at least 1 not {}'.format(key, value))
    return int(value)


def anapara(cfg_file):
    apara = AnalysisConfig()
    check_path('cfg_file', cfg_file)
    cf = configparser.ConfigParser()
    try:
        cf.read(cfg_file)
    except Exception:
        raise FileNotFoundError('Cannot open configure file %s' % cfg_file)

    # tolerance section
    if cf.has_section('tolerance'):
        apara.numeric_tol = cf.getfloat('tolerance', 'numeric', fallback=apara.numeric_tol)
        apara.equivalence_tol = cf.getfloat('tolerance', 'equivalence', fallback=apara.equivalence_tol)
        apara.singling_threshold = cf.getfloat('tolerance', 'singling_threshold',
                                               fallback=apara.singling_threshold)

    if cf.has_section('sequence'):
        eps = cf.get('sequence', 'eps', fallback='')
        if eps != '':
            apara.eps_sequence = [float(v) for v in eps.replace(',', ' ').split()]

    if cf.has_section('grid'):
        apara.simplex_resolution = cf.getint('grid', 'simplex_resolution', fallback=apara.simplex_resolution)
        apara.p_grid_size = cf.getint('grid', 'p_grid_size', fallback=apara.p_grid_size)
        apara.y_grid_min = cf.getfloat('grid', 'y_min', fallback=apara.y_grid_min)
        apara.y_grid_max = cf.getfloat('grid', 'y_max', fallback=apara.y_grid_max)
        apara.y_grid_size = cf.getint('grid', 'y_size', fallback=apara.y_grid_size)
        tails = cf.get('grid', 'y_tails', fallback='')
        if tails != '':
            apara.y_tails = tuple(float(v) for v in tails.replace(',', ' ').split())

    if cf.has_section('output'):
        apara.output_format = cf.get('output', 'format', fallback=apara.output_format)
    return apara


def default_config(cfg_file=None):
    """Config from ``cfg_file``, else from ``$PMLPY_CONFIG``, else defaults"""
    if cfg_file is None:
        cfg_file = os.environ.get(CONFIG_ENV)
    if cfg_file:
        return anapara(cfg_file)
    return AnalysisConfig()
