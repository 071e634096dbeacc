import json

import pytest
from loguru import logger

from parahyper.catalog import CASE_HEADER
from parahyper.cli import CommandLineInterface
from parahyper.config import SEED_ENV_VAR
from parahyper.errors import InvalidConfig
from parahyper.main import main

from .test_catalog import case_text


@pytest.fixture(autouse=True)
def quiet_logger(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    yield
    logger.remove()


def test_no_such_case_exits_with_two():
    assert main(['verify', '--case', 'no-such']) == 2


def test_verify_writes_json(tmp_path):
    out = tmp_path / 'reports' / 'r3.json'
    code = main(['verify', '--case', 'r3-mixed', '--suite', 'axioms', '--samples', '3',
                 '--format', 'json', '--out', str(out)])
    assert code == 0
    data = json.loads(out.read_text(encoding='utf-8'))
    assert data['version'] == 1
    assert data['seed'] == 0
    assert data['config']['suites'] == ['axioms']
    assert {r['entry'] for r in data['reports']} == {'r3-mixed'}
    assert all(r['verdict'] == 'pass' for r in data['reports'])


def test_seed_comes_from_environment_then_flag(tmp_path, monkeypatch):
    out = tmp_path / 'seed.json'
    args = ['verify', '--case', 'r4-phc', '--suite', 'axioms', '--samples', '2', '--format', 'json',
            '--out', str(out)]
    monkeypatch.setenv(SEED_ENV_VAR, '42')
    assert main(args) == 0
    assert json.loads(out.read_text(encoding='utf-8'))['seed'] == 42
    assert main(args + ['--seed', '5']) == 0
    assert json.loads(out.read_text(encoding='utf-8'))['seed'] == 5


def test_text_report_goes_to_stdout(capsys):
    assert main(['verify', '--case', 'r3-mixed', '--suite', 'axioms', '--samples', '2']) == 0
    out = capsys.readouterr().out
    assert '[r3-mixed]' in out
    assert 'mixed-axioms' in out
    assert '检查总数' in out


@pytest.mark.parametrize('argv', [
    ['verify', '--tol', 'bogus=1'],
    ['verify', '--tol', 'nested'],
    ['verify', '--suite', 'everything'],
    ['verify', '--jobs', '0'],
    [],
])
def test_configuration_errors_exit_with_two(argv):
    assert main(argv) == 2


def test_list_shows_every_entry(capsys):
    assert main(['list']) == 0
    out = capsys.readouterr().out
    for case_id in ('r3-mixed', 'tm-conformal-ph', 'cone-s3-1-sphere', 's7-3-sphere'):
        assert case_id in out
    assert '[heavy]' in out


def test_list_suites(capsys):
    assert main(['--list-suites']) == 0
    out = capsys.readouterr().out
    for suite in ('axioms', 'averaging', 'nijenhuis', 'lifts', 'constructions', 'einstein'):
        assert suite in out


def test_load_validates_user_files(tmp_path, capsys):
    good = tmp_path / 'good.txt'
    good.write_text(case_text(), encoding='utf-8')
    assert main(['load', str(good)]) == 0
    assert 'my-r3' in capsys.readouterr().out
    bad = tmp_path / 'bad.txt'
    bad.write_text(case_text().replace(CASE_HEADER, 'not a case'), encoding='utf-8')
    assert main(['load', str(bad)]) == 2


def test_build_run_config():
    cli = CommandLineInterface()
    args = cli.parse_arguments(['verify', '--case', 'tm-*', '--suite', 'lifts', '--suite', 'lifts',
                                '--fd-step', '1e-3', '--fd-order', '4', '--tol', 'nested=1e-2', '--jobs', '3'])
    config = cli.build_run_config(args)
    assert config.cases == ('tm-*',)
    assert config.suites == ('lifts',)
    assert config.scheme.step == 1e-3
    assert config.scheme.order == 4
    assert config.scheme.nested_step == pytest.approx(1e-2)
    assert config.tolerances.nested == 1e-2
    assert config.jobs == 3


def test_nonpositive_tolerance_is_rejected():
    cli = CommandLineInterface()
    with pytest.raises(InvalidConfig):
        cli.build_run_config(cli.parse_arguments(['verify', '--tol', 'exact=0']))


@pytest.mark.parametrize('step', [1e-4, 5e-5, 1e-2])
def test_nested_step_scales_with_fd_step(step):
    cli = CommandLineInterface()
    config = cli.build_run_config(cli.parse_arguments(['verify', '--fd-step', str(step)]))
    assert config.scheme.step == step
    assert config.scheme.nested_step == pytest.approx(10 * step)


def test_unwritable_output_exits_with_two(tmp_path):
    assert main(['verify', '--case', 'r3-mixed', '--suite', 'axioms', '--samples', '2',
                 '--out', str(tmp_path)]) == 2
