import logging

from compop.utils import init_config

DEFAULTS = {'M': 256, 'ATOMS': 32, 'PRINT_CONFIG': False}


def test_init_config_fills_defaults():
    config = init_config({'M': 1024}, DEFAULTS)
    assert config == {'M': 1024, 'ATOMS': 32, 'PRINT_CONFIG': False}
    assert init_config(None, DEFAULTS) == DEFAULTS
    assert init_config(None, DEFAULTS) is not DEFAULTS


def test_init_config_echo_goes_through_logger(caplog, capsys):
    with caplog.at_level(logging.INFO, logger='compop.utils'):
        init_config({'PRINT_CONFIG': True}, DEFAULTS, 'CapacityRun')
    assert capsys.readouterr().out == ''
    assert 'CapacityRun config' in caplog.text
    assert 'ATOMS' in caplog.text


def test_init_config_is_quiet_by_default(caplog):
    with caplog.at_level(logging.INFO, logger='compop.utils'):
        init_config({'M': 64}, DEFAULTS, 'CapacityRun')
    assert caplog.text == ''
