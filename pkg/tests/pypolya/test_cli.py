import csv
import json
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

from pypolya import pypolya


def read_lines(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text().splitlines()]


def run_cli(*argv):
    pypolya.main([str(a) for a in argv])


def exit_code(*argv) -> int:
    with pytest.raises(SystemExit) as excinfo:
        run_cli(*argv)
    return excinfo.value.code


@pytest.fixture
def draws_file(tmp_path):
    path = tmp_path / 'galaxies.draws.ndjson'
    run_cli('fit', 'galaxies', '--iters', 20, '--burnin', 10, '--thin', 1, '-o', path)
    return path


@pytest.fixture
def mixtures_file(tmp_path, draws_file):
    path = tmp_path / 'galaxies.mixtures.ndjson'
    run_cli('complete', draws_file, '--seed', 5, '-o', path)
    return path


def test_fit_writes_header_and_draws(draws_file):
    header, *records = read_lines(draws_file)
    assert header['format_version'] == '1'
    assert header['kind'] == 'draws'
    assert header['model_family'] == 'dp-normal-nig'
    assert (header['n'], header['T']) == (82, 20)
    assert header['config']['iterations'] == 20
    assert len(records) == 20
    assert [r['t'] for r in records] == list(range(20))
    assert all(len(r['means']) == 82 for r in records)


def test_fit_is_byte_reproducible(tmp_path, draws_file):
    again = tmp_path / 'again.ndjson'
    run_cli('fit', 'galaxies', '--iters', 20, '--burnin', 10, '--thin', 1, '-o', again)
    assert again.read_bytes() == draws_file.read_bytes()


def test_fit_values_file_with_fixed_alpha(tmp_path, values_file):
    out = tmp_path / 'draws.ndjson'
    run_cli(
        'fit', values_file, '--fix-alpha', 1, '--iters', 10, '--burnin', 0, '--thin', 1,
        '-o', out,
    )
    header, *records = read_lines(out)
    assert header['n'] == 4
    assert header['data'] == [9.172, 19.5, 20.1, 23.7]
    assert all(r['alpha'] == 1.0 for r in records)


def test_fit_with_config_file(tmp_path):
    conf = tmp_path / 'model.ini'
    run_cli('init', 'config', '-o', conf)
    conf.write_text(conf.read_text().replace('iterations = 100', 'iterations = 3'))
    out = tmp_path / 'draws.ndjson'
    run_cli('fit', 'galaxies', '--config', conf, '--burnin', 0, '--thin', 1, '-o', out)
    assert read_lines(out)[0]['T'] == 3


def test_fit_rejects_unknown_dataset():
    assert exit_code('fit', 'no-such-data') == 2


def test_complete_writes_one_mixture_per_draw(tmp_path, draws_file, mixtures_file):
    header, *records = read_lines(mixtures_file)
    assert header['kind'] == 'mixtures'
    assert header['completion'] == {'eps': 0.01, 'ups': 0.01, 'seed': 5}
    assert len(records) == 20
    for record in records:
        assert record['provenance'] == 'completed'
        assert sum(record['weights']) == pytest.approx(1.0)

    again = tmp_path / 'again.ndjson'
    run_cli('complete', draws_file, '--seed', 5, '-o', again)
    assert again.read_bytes() == mixtures_file.read_bytes()


def test_complete_refuses_other_files(tmp_path, mixtures_file):
    assert exit_code('complete', mixtures_file) == 2
    bogus = tmp_path / 'bogus.ndjson'
    bogus.write_text('{"format_version": "9", "kind": "draws"}\n')
    assert exit_code('complete', bogus) == 2
    garbage = tmp_path / 'garbage.ndjson'
    garbage.write_text('not json\n')
    assert exit_code('complete', garbage) == 2


def test_analyze_moments_csv(tmp_path, mixtures_file):
    out = tmp_path / 'moments.csv'
    run_cli('analyze', mixtures_file, '--what', 'moments', '-o', out)
    with open(out, newline='') as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 20
    assert all(float(r['variance']) > 0 for r in rows)


def test_analyze_modes_json(tmp_path, mixtures_file):
    out = tmp_path / 'modes.json'
    run_cli('analyze', mixtures_file, '--what', 'modes', '-o', out)
    summary = json.loads(out.read_text())
    assert sum(summary['histogram'].values()) == 20
    assert all(m >= 1 for m in summary['modes'])


def test_analyze_density_rows_integrate_to_one(tmp_path, draws_file):
    out = tmp_path / 'density.csv'
    run_cli(
        'analyze', draws_file, '--what', 'density',
        '--grid-lo', -150, '--grid-hi', 200, '--grid-n', 14001, '-o', out,
    )
    with open(out, newline='') as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 20 * 14001
    x = np.array([float(r['x']) for r in rows[:14001]])
    for t in range(20):
        values = np.array([float(r['value']) for r in rows[t * 14001 : (t + 1) * 14001]])
        assert integrate.trapezoid(values, x) == pytest.approx(1.0, abs=1e-3)


def test_analyze_bands_csv(tmp_path, mixtures_file):
    out = tmp_path / 'bands.csv'
    run_cli('analyze', mixtures_file, '--what', 'bands', '--grid-n', 50, '-o', out)
    with open(out, newline='') as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 50
    for row in rows:
        assert float(row['simultaneous_lower']) <= float(row['pointwise_lower'])
        assert float(row['pointwise_upper']) <= float(row['simultaneous_upper'])


def test_analyze_txt_report(tmp_path, mixtures_file):
    out = tmp_path / 'components.txt'
    run_cli('analyze', mixtures_file, '--what', 'components', '--format', 'txt', '-o', out)
    assert 'Components' in out.read_text()


def test_analyze_bad_arguments(mixtures_file):
    assert exit_code('analyze', mixtures_file, '--what', 'everything') == 2
    assert exit_code('analyze', mixtures_file, '--what', 'cdf', '--level', 2) == 2


def test_bench_with_no_repetitions(tmp_path):
    out = tmp_path / 'bench.json'
    run_cli('bench', '--reps', 0, '-o', out)
    assert json.loads(out.read_text()) == {'fit': [], 'completion': []}


def test_simulate_small_study(tmp_path):
    out = tmp_path / 'study.json'
    run_cli(
        'simulate', '--reps', 1, '--n', 10, '--iters', 5, '--burnin', 5, '--thin', 1,
        '-o', out,
    )
    report = json.loads(out.read_text())
    assert report['summary']['replications'] == 1
    assert len(report['replications']) == 1


def test_init_config_json(tmp_path):
    out = tmp_path / 'model.json'
    run_cli('init', 'config', '-o', out)
    assert json.loads(out.read_text())['model']['A'] == 20.8


def test_analyze_modes_on_single_observation(tmp_path):
    values = tmp_path / 'one.txt'
    values.write_text('3.5\n')
    draws = tmp_path / 'one.draws.ndjson'
    run_cli('fit', values, '--iters', 5, '--burnin', 0, '--thin', 1, '-o', draws)
    mixtures = tmp_path / 'one.mixtures.ndjson'
    run_cli('complete', draws, '-o', mixtures)
    out = tmp_path / 'modes.json'
    run_cli('analyze', mixtures, '--what', 'modes', '-o', out)
    summary = json.loads(out.read_text())
    assert summary['range'] == [3.0, 4.0]
    assert len(summary['modes']) == 5


def test_header_without_counts_is_a_format_error(tmp_path, draws_file):
    header, *records = read_lines(draws_file)
    del header['T']
    broken = tmp_path / 'broken.ndjson'
    broken.write_text(''.join(json.dumps(r) + '\n' for r in [header, *records]))
    assert exit_code('complete', broken) == 2
    assert exit_code('analyze', broken, '--what', 'components') == 2
