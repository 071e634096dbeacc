import json

import pytest

from parahyper import suites
from parahyper.config import RunConfig
from parahyper.errors import CaseNotFound
from parahyper.report import FAIL, PASS, SKIP
from parahyper.runner import VerificationRunner
from parahyper.smooth import SamplePlan


def make_config(cases, suite_names=(), **kwargs) -> RunConfig:
    kwargs.setdefault('plan', SamplePlan(count=4, seed=11))
    return RunConfig(cases=tuple(cases), suites=tuple(suite_names), **kwargs)


def test_axioms_on_r3_pass(catalog):
    result = VerificationRunner(make_config(['r3-mixed'], ['axioms']), catalog.values()).run()
    assert result.exit_code == 0
    identities = [r.identity for r in result.reports]
    assert identities == sorted(identities)
    assert 'mixed-axioms' in identities
    assert all(r.verdict == PASS for r in result.reports)


def test_output_does_not_depend_on_parallelism(catalog):
    cases = ['r3-mixed', 'r4-phc', 'conjugated-triple', 'circle-r3-mixed']
    suite_names = ['axioms', 'averaging', 'nijenhuis']
    serial = VerificationRunner(make_config(cases, suite_names, jobs=1), catalog.values()).run()
    parallel = VerificationRunner(make_config(cases, suite_names, jobs=8), catalog.values()).run()
    assert serial.to_json() == parallel.to_json()


def test_json_layout(catalog):
    result = VerificationRunner(make_config(['r4-phc'], ['axioms']), catalog.values()).run()
    data = json.loads(result.to_json())
    assert list(data) == ['version', 'seed', 'config', 'reports']
    assert data['version'] == 1
    assert data['seed'] == 11
    assert 'jobs' not in data['config']
    assert 'wall_time' not in data['reports'][0]
    assert list(data['reports'][0])[:3] == ['entry', 'suite', 'identity']


def test_timings_are_opt_in(catalog):
    result = VerificationRunner(make_config(['r4-phc'], ['axioms'], timings=True), catalog.values()).run()
    assert 'wall_time' in json.loads(result.to_json())['reports'][0]


def test_unknown_case_raises(catalog):
    with pytest.raises(CaseNotFound) as info:
        VerificationRunner(make_config(['r3-mixed', 'no-such']), catalog.values()).select_entries()
    assert info.value.pattern == 'no-such'
    assert 'r3-mixed' in info.value.available


def test_globs_and_heavy_entries(catalog):
    light = VerificationRunner(make_config(['s*-sphere']), catalog.values()).select_entries()
    assert [e.id for e in light] == ['s3-1-sphere']
    heavy = VerificationRunner(make_config(['s*-sphere'], heavy=True), catalog.values()).select_entries()
    assert [e.id for e in heavy] == ['s3-1-sphere', 's7-3-sphere']
    tangent = VerificationRunner(make_config(['tm-*']), catalog.values()).select_entries()
    assert [e.id for e in tangent] == ['tm-flat-parakahler', 'tm-conformal-ph']


def test_explicit_suite_that_does_not_apply_is_skipped(catalog):
    result = VerificationRunner(make_config(['r3-mixed'], ['lifts']), catalog.values()).run()
    assert [(r.identity, r.verdict) for r in result.reports] == [('not-applicable', SKIP)]
    assert result.exit_code == 0


def test_expected_failures_keep_exit_zero(catalog):
    result = VerificationRunner(make_config(['conjugated-triple'], ['nijenhuis']), catalog.values()).run()
    verdicts = {r.identity: r.verdict for r in result.reports}
    assert verdicts['nijenhuis-J1'] == FAIL
    assert verdicts['nijenhuis-J2'] == PASS
    assert verdicts['nijenhuis-J3'] == FAIL
    assert verdicts['two-imply-third'] == PASS
    assert result.exit_code == 0


def test_exceptions_become_error_reports(catalog, monkeypatch):
    def broken(entry, config):
        raise RuntimeError('boom')

    monkeypatch.setitem(suites.SUITES, 'axioms', broken)
    result = VerificationRunner(make_config(['r3-mixed'], ['axioms']), catalog.values()).run()
    [report] = result.reports
    assert report.identity == 'error'
    assert report.verdict == FAIL
    assert report.details['error'] == 'RuntimeError'
    assert result.exit_code == 1
    assert result.unexpected == [report]


@pytest.mark.slow
def test_full_default_run_matches_expectations(catalog):
    result = VerificationRunner(make_config(['*'], plan=SamplePlan(count=3)), catalog.values()).run()
    assert result.unexpected == []
    assert result.exit_code == 0
