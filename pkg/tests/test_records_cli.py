import json
import math

import numpy as np
import pytest

from puncvol import cli
from puncvol.base import NumericFailure
from puncvol.cli import build_parser, run
from puncvol.records import RunRecord, _plain, read_csv, to_csv, write_atomic

small_product = '{"kind": "product", "resolution": [8, 8, 8]}'
small_parallel = '{"kind": "parallel", "resolution": [16, 32]}'


# ═══════════════════════════════════════════════════════════════════
#  Records
# ═══════════════════════════════════════════════════════════════════

def test_record_round_trip():
    record = RunRecord(command='volume', config={'n': 1}, payload={'value': math.pi / 3},
                       seeds=[7], grids=[{'kind': 'product'}], duration=0.25)
    back = RunRecord.from_json(record.to_json())
    assert back == record
    assert back.payload['value'] == math.pi / 3
    assert record.timestamp


def test_record_floats_carry_17_digits():
    record = RunRecord(command='volume', config={}, payload={'a': 0.1, 'b': 1.0, 'c': 1e-20, 'k': 3})
    text = record.to_json()
    assert '"a": 0.10000000000000001' in text
    assert '"b": 1.0' in text
    assert '"k": 3' in text
    assert RunRecord.from_json(text).payload == {'a': 0.1, 'b': 1.0, 'c': 1e-20, 'k': 3}


def test_record_rejects_other_schema():
    data = RunRecord(command='bounds', config={}, payload={}).to_dict()
    data['schema'] = 99
    with pytest.raises(ValueError):
        RunRecord.from_dict(data)


def test_plain_values():
    out = _plain({'a': np.float64(1.5), 'b': np.arange(3), 'c': float('nan'), 1: (np.int64(2),)})
    assert out == {'a': 1.5, 'b': [0, 1, 2], 'c': None, '1': [2]}
    json.dumps(out, allow_nan=False)


def test_csv():
    text = to_csv([(0.1, 2.0), (0.2, 2.0)], 'scan')
    assert text.splitlines()[0] == 'theta,flux'
    header, rows = read_csv(text)
    assert header == ['theta', 'flux']
    assert rows == [[0.1, 2.0], [0.2, 2.0]]
    table = to_csv([{'n': 1, 'volM': 1.0, 'radial': 2.0, 'pedersen': 2.5, 'hopf': 2.0, 'bcn_a': 2.0}], 'table')
    assert table.splitlines()[1] == '1,1.0,2.0,2.5,2.0,2.0'


def test_write_atomic(tmp_path):
    target = tmp_path / 'out.json'
    write_atomic(str(target), 'first')
    write_atomic(str(target), 'second')
    assert target.read_text() == 'second'
    assert [p.name for p in tmp_path.iterdir()] == ['out.json']


# ═══════════════════════════════════════════════════════════════════
#  Command line
# ═══════════════════════════════════════════════════════════════════

def run_json(capsys, argv):
    assert run(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_parser_commands():
    parser = build_parser()
    args = parser.parse_args(['chain-table', '--n', '1,3'])
    assert args.n == [1, 3]
    args = parser.parse_args(['bounds', '--indices', '2,-2'])
    assert args.indices == [2, -2]


def test_volume_command(capsys):
    record = run_json(capsys, ['volume', '--field', 'hopf', '--n', '1', '--grid', small_product])
    assert record['command'] == 'volume'
    assert np.isclose(record['payload']['normalized'], 2.0)
    assert record['config']['grid'] == {'kind': 'product', 'resolution': [8, 8, 8]}
    assert record['grids'][0]['nodes'] == 8 * 8 * 8
    assert record['schema'] == 1


def test_volume_command_writes_file(tmp_path, capsys):
    out = tmp_path / 'radial.json'
    code = run(['volume', '--field', 'radial', '--n', '1', '--out', str(out),
                '--grid', '{"kind": "sliced", "slices": 8, "parallel": [8, 16]}'])
    assert code == 0
    assert capsys.readouterr().out == ''
    record = RunRecord.from_json(out.read_text())
    assert np.isclose(record.payload['normalized'], 2.0)


def test_monte_carlo_volume_records_seed(capsys):
    record = run_json(capsys, ['volume', '--field', 'hopf', '--grid', '{"kind": "monte-carlo", "count": 500}',
                               '--seed', '12'])
    assert record['seeds'] == [12]
    assert record['payload']['seed'] == 12


def test_euler_scan_csv(capsys):
    code = run(['euler-scan', '--field', 'radial', '--n', '1', '--thetas=-0.5,0.5',
                '--grid', small_parallel, '--format', 'csv'])
    assert code == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ['theta', 'flux']
    assert [r[0] for r in rows] == [-0.5, 0.5]
    assert np.allclose([r[1] for r in rows], 2.0, atol=1e-9)


def test_euler_scan_json(capsys):
    record = run_json(capsys, ['euler-scan', '--field', 'radial', '--thetas=-0.3,0.3', '--grid', small_parallel])
    assert np.isclose(record['payload']['south']['index_estimate'], -1.0)


def test_index_command(capsys):
    record = run_json(capsys, ['index', '--field', 'radial', '--n', '1', '--radius', '0.1'])
    assert record['payload']['index'] == 1
    assert record['payload']['residual'] < 1e-2


def test_bounds_command(capsys):
    record = run_json(capsys, ['bounds', '--n', '1', '--indices', '1,-1'])
    assert set(record['payload']['bounds']) == {'thmA', 'corollary', 'bcj3', 'thmB', 'bcn_a', 'volM'}


def test_chain_table_csv(capsys):
    assert run(['chain-table', '--n', '1,2', '--format', 'csv']) == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ['n', 'volM', 'radial', 'pedersen', 'hopf', 'bcn_a']
    assert rows[0][:3] == [1.0, 1.0, 2.0]
    assert np.isclose(rows[1][2], 8.0 / 3.0)


def test_verify_lemma_command(capsys):
    record = run_json(capsys, ['verify-lemma', '--n', '1', '--self-test'])
    assert record['payload']['status'] == 'verified'
    assert record['payload']['self_test'] == {'perturbed': [1, 2], 'localized': True}


def test_verify_lemma_text_report(capsys):
    assert run(['verify-lemma', '--n', '1', '--format', 'text']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith('n = 1: verified')
    assert not any(line.startswith('!!') for line in lines)


def test_text_report_only_for_verify_lemma(capsys):
    assert run(['chain-table', '--format', 'text']) == 2


def test_numeric_failure_exits_3(monkeypatch, tmp_path, capsys):
    def failing(args, ctx):
        raise NumericFailure('residual check failed')

    monkeypatch.setitem(cli.commands, 'index', failing)
    target = tmp_path / 'out.json'
    assert run(['index', '--field', 'radial', '--out', str(target)]) == 3
    assert not target.exists()
    assert capsys.readouterr().out == ''


def test_probe_command(capsys):
    record = run_json(capsys, ['probe-lemma', '--n', '1', '--trials', '200', '--seed', '7'])
    assert record['seeds'] == [7]
    assert record['payload']['counts']['abs'] >= 1


def test_convergence_csv(capsys):
    code = run(['convergence', '--field', 'hopf', '--levels', '2', '--format', 'csv'])
    assert code == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ['nodes', 'value']
    assert len(rows) == 2
    assert np.isclose(rows[-1][1], 4 * math.pi ** 2)


@pytest.mark.parametrize('argv', [
    ['volume', '--format', 'csv'],
    ['verify-lemma', '--n', '4'],
    ['volume', '--field', 'radial', '--grid', '{"kind": "monte-carlo", "count": 100, "seed": 1}'],
    ['volume', '--field', 'vortex'],
    ['volume', '--grid', '{"kind": "product"'],
    ['euler-scan', '--grid', small_product],
    ['index', '--field', 'radial', '--point', '0.29552,0,0,0.95534', '--radius', '0.2'],
    ['bogus'],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2


def test_version(capsys):
    assert run(['--version']) == 0
    assert 'puncvol' in capsys.readouterr().out
