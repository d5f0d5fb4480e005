import logging
import numpy as np
import pandas as pd
import pytest
from pmlpy.para import AnalysisConfig, anapara, default_config, CONFIG_ENV
from pmlpy.setuplog import setuplog
from pmlpy.utils import check_path, fmt_float, format_frame, resolve_label, parse_range


CFG = """[tolerance]
numeric = 1e-8
equivalence = 1e-3

[sequence]
eps = 0.1, 0.01 0.001

[grid]
simplex_resolution = 6
y_size = 11
y_tails = -5 5

[output]
format = JSON
"""


def write_cfg(tmp_path, text=CFG):
    path = tmp_path / 'pml.cfg'
    path.write_text(text)
    return str(path)


def test_defaults():
    para = AnalysisConfig()
    assert para.numeric_tol == 1e-9
    assert para.equivalence_tol == 1e-4
    assert para.eps_sequence == (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    assert para.output_format == 'text'
    assert para.y_grid.shape == (1003,)
    assert para.get_para()['_p_grid_size'] == 21


def test_validation():
    para = AnalysisConfig()
    with pytest.raises(ValueError):
        para.numeric_tol = 0
    with pytest.raises(TypeError):
        para.equivalence_tol = '1e-4'
    with pytest.raises(ValueError):
        para.eps_sequence = [0.01, 0.1]
    with pytest.raises(ValueError):
        para.eps_sequence = [1.0]
    with pytest.raises(ValueError):
        para.eps_sequence = []
    with pytest.raises(ValueError):
        para.output_format = 'xml'
    with pytest.raises(TypeError):
        para.simplex_resolution = 2.5


def test_anapara(tmp_path):
    para = anapara(write_cfg(tmp_path))
    assert para.numeric_tol == 1e-8
    assert para.equivalence_tol == 1e-3
    assert para.eps_sequence == (0.1, 0.01, 0.001)
    assert para.simplex_resolution == 6
    assert para.p_grid_size == 21
    assert para.y_grid.shape == (13,)
    assert para.y_grid[-1] == 5
    assert para.output_format == 'json'
    with pytest.raises(FileNotFoundError):
        anapara(str(tmp_path / 'missing.cfg'))


def test_anapara_bad_value(tmp_path):
    with pytest.raises(ValueError):
        anapara(write_cfg(tmp_path, '[sequence]\neps = 0.01 0.1\n'))


def test_default_config_env(tmp_path, monkeypatch):
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    assert default_config().output_format == 'text'
    monkeypatch.setenv(CONFIG_ENV, write_cfg(tmp_path))
    assert default_config().output_format == 'json'


def test_fmt_float():
    assert fmt_float(np.log(1.5)) == '0.405465'
    assert fmt_float(0.1) == '0.100000'
    assert fmt_float(3.0346e-51) == '3.034600e-51'
    assert fmt_float(0.) == '0.000000'
    assert fmt_float(np.inf) == 'inf'
    assert fmt_float(None) == 'none'
    assert fmt_float(np.nan) == 'none'


def test_format_frame():
    frame = pd.DataFrame({'n': [1, 2], 'bound': [0.5, np.nan], 'c': [None, 0.2]})
    out = format_frame(frame)
    assert list(out['bound']) == ['0.500000', 'none']
    assert list(out['c']) == ['none', '0.200000']
    assert list(out['n']) == [1, 2]


def test_resolve_label():
    assert resolve_label((0, 1), '1') == 1
    assert resolve_label(('a', 'b'), 'b') == 'b'
    with pytest.raises(ValueError):
        resolve_label((0, 1), '2')


def test_parse_range():
    assert parse_range('0/1/5') == pytest.approx([0, 0.25, 0.5, 0.75, 1])
    with pytest.raises(ValueError):
        parse_range('0/1')


def test_check_path(tmp_path):
    with pytest.raises(FileNotFoundError):
        check_path('prior', str(tmp_path / 'none.json'))


def test_setuplog(tmp_path):
    logger = setuplog(str(tmp_path / 'pml.log'))
    assert isinstance(logger.Verifylog, logging.Logger)
    assert logger.Leakagelog.name == 'Leakage'
    # loggers are shared across instances
    assert setuplog(str(tmp_path / 'pml.log')).Mechlog is logger.Mechlog


def test_setuplog_keeps_handlers(tmp_path, monkeypatch):
    setuplog()
    verify = logging.getLogger('Verify')
    counts = [len(logging.getLogger(name).handlers) for name in ('Leakage', 'Equiv', 'Verify')]
    for _ in range(3):
        setuplog(str(tmp_path / 'again.log'))
    assert [len(logging.getLogger(name).handlers) for name in ('Leakage', 'Equiv', 'Verify')] == counts
    assert not (tmp_path / 'again.log').exists()
    # a fresh Verify logger gets the log file
    monkeypatch.setattr(verify, 'handlers', [])
    setuplog(str(tmp_path / 'fresh.log'))
    assert (tmp_path / 'fresh.log').exists()
    assert len(verify.handlers) == 2
    for h in verify.handlers:
        h.close()


def test_grid_config_feeds_y_grid():
    para = AnalysisConfig()
    para.y_grid_min, para.y_grid_max, para.y_grid_size, para.y_tails = 0., 1., 3, (-4.,)
    assert para.y_grid == pytest.approx([0., 0.5, 1., -4.])
