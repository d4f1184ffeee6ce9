import json

import numpy as np
import pytest

from compop import cli
from compop.utils import PreconditionError


def test_parser_defaults():
    args = cli.build_parser().parse_args(['hs', '--symbol', 'scale:0.6'])
    cfg = cli.config_from_args(args)
    assert cfg.command == 'hs'
    assert cfg.space == 'D'
    assert cfg.alpha == 0.5
    assert cfg.fmt == 'csv'
    assert cfg.validate() is cfg


@pytest.mark.parametrize('kwargs', [
    {'command': 'hs'},
    {'command': 'capacity'},
    {'command': 'capacity', 'set': 'point:0', 'M': 1000},
    {'command': 'capacity', 'set': 'point:0', 'budgets': [16]},
    {'command': 'capacity', 'set': 'point:0', 'atoms': 0},
    {'command': 'capacity', 'set': 'point:0', 'fmt': 'xml'},
    {'command': 'verify', 'suite': 'everything'},
    {'command': 'verify', 'C': 0.5},
    {'command': 'plot'},
])
def test_validate_rejects(kwargs):
    with pytest.raises(PreconditionError):
        cli.RunConfig(**kwargs).validate()


def test_json_safe():
    out = cli.json_safe({'a': np.float64(np.inf), 'b': np.arange(2), 'c': 1 + 2j, 'd': np.bool_(True), 1: None,
                         'e': (np.int64(3), float('nan'))})
    assert out == {'a': 'inf', 'b': [0, 1], 'c': [1.0, 2.0], 'd': True, '1': None, 'e': [3, 'nan']}
    json.dumps(out)


def test_hs_csv_with_sidecar(tmp_path):
    path = tmp_path / 'out' / 'hs.csv'
    argv = ['hs', '--symbol', 'scale:0.6', '--space', 'D', '--output', str(path)]
    assert cli.main(argv) == cli.EXIT_OK
    first = path.read_bytes()
    assert first.splitlines()[0] == b'route,index,partial'
    meta = json.loads((tmp_path / 'out' / 'hs.csv.meta.json').read_text())
    assert meta['metadata']['command'] == 'hs'
    assert meta['summary']['verdict'] == 'finite-evidence'
    assert meta['summary']['space'] == 'D'
    # reruns are byte-identical
    assert cli.main(argv) == cli.EXIT_OK
    assert path.read_bytes() == first


def test_capacity_json(tmp_path):
    path = tmp_path / 'cap.json'
    argv = ['capacity', '--set', 'point:0', '--budgets', '16', '32', '64', '128', '--format', 'json',
            '--output', str(path)]
    assert cli.main(argv) == cli.EXIT_OK
    payload = json.loads(path.read_text())
    assert payload['columns'][0] == 'atoms'
    assert [row[0] for row in payload['rows']] == [16, 32, 64, 128]
    assert payload['summary']['trend'] == 'decaying'
    assert payload['metadata']['config']['budgets'] == [16, 32, 64, 128]


def test_bad_symbol_exits_with_error(capsys):
    assert cli.main(['hs', '--symbol', 'spiral:0.5']) == cli.EXIT_ERROR
    assert 'error:' in capsys.readouterr().err


def test_run_returns_report():
    cfg = cli.RunConfig('norms', symbol='scale:0.5', n_max=8, N=64)
    status, report = cli.run(cfg, quiet=True)
    assert status == cli.EXIT_OK
    assert report.summary['dirichlet_integral'] == pytest.approx(0.25)
    assert len(report.rows) == 8
