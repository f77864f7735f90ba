import json

import numpy
import pytest
from click.testing import CliRunner

import cli
from errors import InputError
from expfun import ExpPolyFunction, ExpPolyTerm, Support
from fileio import read_samples, write_json, write_samples
from fourier import Grid, sample

GRID_N = 1024


@pytest.fixture
def runner():
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


@pytest.fixture
def files(tmp_path):
    """Writes JSON inputs into the temporary directory and returns their paths"""
    def make(name, document):
        path = tmp_path / name
        if isinstance(document, str):
            path.write_text(document)
        else:
            write_json(str(path), document)
        return str(path)
    return make


def poly_document(*coeffs):
    return {'coeffs': [[complex(c).real, complex(c).imag] for c in coeffs]}


def function_document(*terms, support='pos'):
    return ExpPolyFunction([ExpPolyTerm(c, m, z, Support.from_json(support)) for c, m, z in terms]).to_dict()


def run(runner, *args, env=None):
    return runner.invoke(cli.main, [str(a) for a in args], env=env)


def output(result):
    return json.loads(result.stdout)


def test_stability_first_order(runner, files):
    result = run(runner, 'stability', files('p.json', poly_document(2, 1)))
    assert result.exit_code == 0
    document = output(result)
    assert document['hyperbolic'] is True
    assert document['M'] == pytest.approx(0.5)


def test_stability_rejects_axis_root(runner, files):
    result = run(runner, 'stability', files('p.json', poly_document(-1j, 1)))
    assert result.exit_code == 2
    document = output(result)
    assert document['hyperbolic'] is False
    assert document['witness'] == pytest.approx([0, 1], abs=1e-12)


@pytest.mark.parametrize('text', ['{"coeffs": [[1, 0], ', '{"coeffs": [[1, 0], [0, 0]]}', '{"coeffs": [[1]]}',
                                  '{"coeffs": [[3, 0]]}'])
def test_stability_rejects_bad_polynomials(runner, files, text):
    assert run(runner, 'stability', files('p.json', text)).exit_code == 1


def test_usage_errors_exit_with_one(runner, files):
    assert run(runner, '--no-such-flag', 'stability', files('p.json', poly_document(2, 1))).exit_code == 1
    assert run(runner, 'stability').exit_code == 1


def test_solve_writes_samples(runner, files, tmp_path):
    out = tmp_path / 'y.csv'
    result = run(runner, '--grid-N', GRID_N, 'solve', files('p.json', poly_document(1, 1)),
                 files('f.json', function_document((1, 0, -2))), '--out', out)
    assert result.exit_code == 0
    document = output(result)
    assert document['mode'] == 'closed'
    assert document['norm'] == pytest.approx(0.5, rel=1e-9)
    assert document['residual_norm'] <= 1e-10

    s = read_samples(str(out))
    expected = ExpPolyFunction([ExpPolyTerm(1, 0, -1, Support.pos()), ExpPolyTerm(-1, 0, -2, Support.pos())])
    numpy.testing.assert_allclose(s.values, sample(expected, Grid(30, GRID_N)).values, atol=1e-14)
    terms = json.loads((tmp_path / 'y.terms.json').read_text())
    assert len(terms['terms']) == 2


def test_solve_zero_forcing(runner, files, tmp_path):
    out = tmp_path / 'zero.csv'
    result = run(runner, '--grid-N', GRID_N, 'solve', files('p.json', poly_document(1, 1)),
                 files('f.json', {'terms': []}), '--out', out)
    assert result.exit_code == 0
    assert numpy.all(read_samples(str(out)).values == 0)


def test_solve_rejects_axis_root(runner, files, tmp_path):
    result = run(runner, 'solve', files('p.json', poly_document(-1j, 1)), files('f.json', function_document((1, 0, -1))),
                 '--out', tmp_path / 'y.csv')
    assert result.exit_code == 2


def test_solve_needs_an_output(runner, files):
    result = run(runner, 'solve', files('p.json', poly_document(1, 1)), files('f.json', function_document((1, 0, -2))))
    assert result.exit_code == 1


def test_solve_takes_output_from_config(runner, files, tmp_path):
    out = tmp_path / 'from_config.csv'
    config = files('config.json', {'grid': {'N': GRID_N}, 'output': {'out': str(out)}})
    result = run(runner, '--config', config, 'solve', files('p.json', poly_document(1, 1)),
                 files('f.json', function_document((1, 0, -2))))
    assert result.exit_code == 0
    assert read_samples(str(out)).grid == Grid(30, GRID_N)


def test_verify_exact_candidate(runner, files):
    result = run(runner, 'verify', files('p.json', poly_document(1, 1)), files('f.json', function_document((1, 0, -2))),
                 files('y.json', function_document((1, 0, -1), (-1, 0, -2))))
    assert result.exit_code == 0
    document = output(result)
    assert document['satisfied'] is True
    assert document['distance'] <= 1e-12


def test_verify_tight_candidate(runner, files):
    candidate = function_document((1, 0, -1), (-1, 0, -2), (0.01, 1, -1))
    result = run(runner, 'verify', files('p.json', poly_document(1, 1)), files('f.json', function_document((1, 0, -2))),
                 files('y.json', candidate))
    assert result.exit_code == 0
    document = output(result)
    assert document['distance'] == pytest.approx(document['bound'], rel=1e-6)


def test_verify_round_trips_solve_output(runner, files, tmp_path):
    p = files('p.json', poly_document(1, 1))
    f = files('f.json', function_document((1, 0, -2)))
    out = tmp_path / 'y.csv'
    assert run(runner, '--grid-N', GRID_N, 'solve', p, f, '--out', out).exit_code == 0
    result = run(runner, 'verify', p, f, out)
    assert result.exit_code == 0
    document = output(result)
    assert document['mode'] == 'sampled'
    assert document['satisfied'] is True


def test_verify_round_trips_at_the_reference_grid(runner, files, tmp_path):
    p = files('p.json', poly_document(2, 3, 1))
    f = files('f.json', function_document((1, 0, -3)))
    out = tmp_path / 'y.csv'
    assert run(runner, 'solve', p, f, '--out', out).exit_code == 0
    assert read_samples(str(out)).grid == Grid.reference()
    result = run(runner, 'verify', p, f, out)
    assert result.exit_code == 0
    document = output(result)
    assert document['mode'] == 'sampled'
    assert document['distance'] <= 1e-6


def test_verify_reports_violation(runner, files):
    result = run(runner, 'verify', files('p.json', poly_document(1, 1)), files('f.json', {'terms': []}),
                 files('y.json', function_document((1, 0, -1))))
    assert result.exit_code == 3
    document = output(result)
    assert document['satisfied'] is False
    assert document['jumps'][0]['order'] == 0


def test_verify_rejects_low_order_jumps(runner, files):
    result = run(runner, 'verify', files('p.json', poly_document(2, 3, 1)), files('f.json', {'terms': []}),
                 files('y.json', function_document((1, 0, -1))))
    assert result.exit_code == 4


def test_verify_rejects_sampled_step(runner, files, tmp_path):
    candidate = str(tmp_path / 'step.csv')
    write_samples(candidate, sample(ExpPolyFunction.single(1, 0, -1, Support.pos()), Grid(30, 2 ** 13)))
    result = run(runner, 'verify', files('p.json', poly_document(2, 3, 1)), files('f.json', {'terms': []}), candidate)
    assert result.exit_code == 4


def test_probe_rotating_decay(runner):
    result = run(runner, 'probe')
    assert result.exit_code == 0
    report, = output(result)['reports']
    assert report['family'] == 'paper'
    assert report['distance_to_solution_set'] >= 1 - 0.1 / numpy.sqrt(2)


def test_probe_slow(runner):
    result = run(runner, 'probe', '--example', 'slow', '--T', 20)
    assert result.exit_code == 0
    report, = output(result)['reports']
    assert report['ratio'] == pytest.approx(10, rel=1e-9)


def test_probe_ladder_writes_rows(runner, tmp_path):
    out = tmp_path / 'ladder.csv'
    result = run(runner, 'probe', '--example', 'slow', '--eps', 0.05, '--out', out)
    assert result.exit_code == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == 'parameter,residual,distance,ratio'
    assert len(rows) == 6


def test_probe_rejects_bad_eps(runner):
    assert run(runner, 'probe', '--eps', -1).exit_code == 1


def test_suite(runner):
    result = run(runner, 'suite', '--trials', 3, '--max-degree', 2, env={cli.SEED_VARIABLE: '5'})
    assert result.exit_code == 0
    document = output(result)
    assert document['seed'] == 5
    assert document['trials'] == 3
    assert document['all_satisfied'] is True


def test_suite_rejects_bad_seed(runner):
    result = run(runner, 'suite', '--trials', 1, env={cli.SEED_VARIABLE: 'abc'})
    assert result.exit_code == 1


@pytest.mark.parametrize('config', [{'grid': {'N': 1000}}, {'grid': {'T': -1}}, {'colour': 'red'},
                                    {'tolerances': {'axis_tol': 0.5}}, {'tolerances': {'verify_slack': 1.0}}])
def test_bad_config_exits_with_one(runner, files, config):
    result = run(runner, '--config', files('config.json', config), 'stability', files('p.json', poly_document(2, 1)))
    assert result.exit_code == 1


def test_config_overrides(files):
    path = files('config.json', {'grid': {'T': 10, 'N': 64}, 'tolerances': {'verify_slack': 1e-4}})
    config = cli.Config.load(path, N=128, axis_tol=1e-8)
    assert config.grid == Grid(10, 128)
    assert config.axis_tol == 1e-8
    assert config.verify_slack == 1e-4
    assert cli.Config.from_dict(config.to_dict()).grid == config.grid
    with pytest.raises(InputError):
        cli.Config(axis_tol=1.0)
