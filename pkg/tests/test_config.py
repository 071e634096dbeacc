import pytest

from parahyper.config import DEFAULT_TOLERANCES, SEED_ENV_VAR, ConfigManager, RunConfig
from parahyper.errors import InvalidConfig
from parahyper.report import FAIL, PASS, SKIP, CheckReport, skipped


def test_tolerance_overrides():
    tolerances = DEFAULT_TOLERANCES.with_overrides({'nested': 1e-2})
    assert tolerances.nested == 1e-2
    assert DEFAULT_TOLERANCES.nested == 5e-3
    with pytest.raises(InvalidConfig):
        DEFAULT_TOLERANCES.with_overrides({'loose': 1.0})
    with pytest.raises(InvalidConfig):
        DEFAULT_TOLERANCES.with_overrides({'exact': -1.0})


def test_constant_fields_use_the_exact_budget():
    assert DEFAULT_TOLERANCES.for_field(True) == 1e-12
    assert DEFAULT_TOLERANCES.for_field(False) == 1e-9


def test_seed_resolution(monkeypatch):
    manager = ConfigManager()
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    assert manager.resolve_seed(None) == 0
    monkeypatch.setenv(SEED_ENV_VAR, '17')
    assert manager.resolve_seed(None) == 17
    assert manager.resolve_seed(3) == 3
    monkeypatch.setenv(SEED_ENV_VAR, 'seventeen')
    with pytest.raises(InvalidConfig):
        manager.resolve_seed(None)


def test_suites_are_validated_and_deduplicated():
    manager = ConfigManager()
    assert manager.validate_suites(['lifts', 'axioms', 'lifts']) == ('lifts', 'axioms')
    with pytest.raises(InvalidConfig):
        manager.validate_suites(['axioms', 'nope'])


def test_case_filter_uses_glob_semantics():
    spec = ConfigManager().build_case_filter(['tm-*', 'r4-phc'])
    assert spec.match_file('tm-flat-parakahler')
    assert spec.match_file('r4-phc')
    assert not spec.match_file('r3-mixed')


def test_echo_lists_all_suites_by_default():
    config = RunConfig()
    assert config.echo()['suites'] == ConfigManager().get_suite_names()
    assert not config.explicit_suites


def test_verdicts():
    assert CheckReport('x', 'a', 1e-10, 1e-9, 1).verdict == PASS
    assert CheckReport('x', 'a', 1e-8, 1e-9, 1).verdict == FAIL
    assert CheckReport('x', 'a', float('nan'), 1e-9, 1).verdict == FAIL
    assert CheckReport('x', 'a', None, 1e-9, 1).to_dict()['residual'] is None
    report = skipped('not-applicable', 'no lifts')
    assert report.verdict == SKIP
    assert report.as_expected


def test_expected_failure_counts_as_expected():
    report = CheckReport('nijenhuis-J1', 'N = 0', 0.3, 1e-5, 4).with_context('conjugated-triple', 'nijenhuis',
                                                                             expected=FAIL)
    assert report.verdict == FAIL
    assert report.as_expected
    assert report.sort_key == ('conjugated-triple', 'nijenhuis', 'nijenhuis-J1')
