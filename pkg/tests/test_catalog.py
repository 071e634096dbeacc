import numpy as np
import pytest

from parahyper.catalog import (CASE_HEADER, R3_ETA, R3_PHI, R3_XI, load_builtin, load_user, parse_case,
                               validate_case)
from parahyper.errors import CaseNotFound, ParseError, ValidationFailed
from parahyper.report import FAIL, PASS

BUILTIN_IDS = [
    'r3-mixed', 'r7-mixed', 'r11-mixed', 'r4-phc', 'flat-parakahler', 'conformal-ph', 'conjugated-triple',
    's3-1-sphere', 's7-3-sphere', 'tm-flat-parakahler', 'tm-conformal-ph',
    'product-r3-mixed-f1', 'product-r3-mixed-f2', 'product-r7-mixed-f1', 'product-r7-mixed-f2',
    'product-s3-1-sphere-f1', 'product-s3-1-sphere-f2',
    'circle-r3-mixed', 'circle-r7-mixed', 'cone-s3-1-sphere', 'circle-s3-1-sphere',
]


def _rows(matrix) -> str:
    return '\n'.join('  ' + ' '.join(f'{v:g}' for v in row) for row in matrix)


def case_text(phis=R3_PHI, xis=R3_XI, etas=R3_ETA, metric=None, case_id='my-r3') -> str:
    lines = ['# 用户算例', CASE_HEADER, f'id: {case_id}', 'dim: 3']
    for a, (phi, xi, eta) in enumerate(zip(phis, xis, etas), start=1):
        lines += [f'phi{a}: 3x3', _rows(phi), f'xi{a}: 3', _rows([xi]), f'eta{a}: 3  # 余向量', _rows([eta])]
    if metric is not None:
        lines += ['metric: 3x3', _rows(metric)]
    return '\n'.join(lines) + '\n'


def test_builtin_catalog_ids(catalog):
    assert list(catalog) == BUILTIN_IDS
    assert [e.id for e in catalog.values() if e.heavy] == ['s7-3-sphere']


def test_builtin_dimensions(catalog):
    dims = {key: entry.dim for key, entry in catalog.items()}
    assert dims['r11-mixed'] == 11
    assert dims['tm-flat-parakahler'] == 8
    assert dims['product-r3-mixed-f2'] == 4
    assert dims['product-r7-mixed-f1'] == 8
    assert dims['circle-r7-mixed'] == 8
    assert dims['cone-s3-1-sphere'] == 4
    assert dims['s7-3-sphere'] == 7


def test_expected_failures_are_declared(catalog):
    conjugated = catalog['conjugated-triple']
    assert conjugated.expectation('nijenhuis-J1').verdict == FAIL
    assert conjugated.expectation('nijenhuis-J2').verdict == PASS
    assert catalog['r7-mixed'].expectation('mixed-sasakian').verdict == FAIL
    assert catalog['s3-1-sphere'].expectation('mixed-sasakian').verdict == PASS
    assert catalog['tm-conformal-ph'].expectation('lifted-integrable').verdict == FAIL


def test_catalog_is_deterministic(scheme):
    first = load_builtin(scheme)
    second = load_builtin(scheme)
    point = np.zeros(7)
    a = next(e for e in first if e.id == 'r7-mixed')
    b = next(e for e in second if e.id == 'r7-mixed')
    assert np.array_equal(a.mixed.g(point), b.mixed.g(point))


def test_parse_valid_case():
    data = parse_case(case_text())
    assert data['id'] == 'my-r3'
    assert data['dim'] == 3
    assert np.array_equal(data['phi1'], np.array(R3_PHI[0], float))
    assert np.array_equal(data['eta3'], np.array(R3_ETA[2], float))
    assert 'metric' not in data


def test_missing_header_reports_position():
    text = case_text().replace(CASE_HEADER, 'parahyper-case v2')
    with pytest.raises(ParseError) as info:
        parse_case(text)
    assert info.value.line == 2
    assert info.value.column == 1


def test_bad_number_reports_column():
    text = case_text().replace('  0 1 0\n', '  0 x 0\n', 1)
    with pytest.raises(ParseError) as info:
        parse_case(text)
    assert info.value.column == 5


def test_wrong_shape_is_rejected():
    with pytest.raises(ParseError, match='3x3'):
        parse_case(case_text().replace('phi2: 3x3', 'phi2: 3x2'))


def test_missing_field_is_rejected():
    text = case_text()
    cut = text.index('eta3:')
    with pytest.raises(ParseError, match='eta3'):
        parse_case(text[:cut])


def test_flipped_phi1_fails_mixed_relations():
    phis = (np.negative(R3_PHI[0]).tolist(), R3_PHI[1], R3_PHI[2])
    with pytest.raises(ValidationFailed) as info:
        validate_case(parse_case(case_text(phis=phis)))
    assert info.value.axiom == 'mixed-phi-xi'
    assert info.value.residual > 1.0


def test_broken_contact_axiom_is_named():
    xis = ([0, 2, 0], R3_XI[1], R3_XI[2])
    with pytest.raises(ValidationFailed) as info:
        validate_case(parse_case(case_text(xis=xis)))
    assert info.value.axiom == 'almost-contact-1'


def test_incompatible_metric_is_rejected():
    with pytest.raises(ValidationFailed) as info:
        validate_case(parse_case(case_text(metric=np.eye(3))))
    assert info.value.axiom == 'mixed-metric'


def test_load_user_builds_entry(tmp_path):
    path = tmp_path / 'case.txt'
    path.write_text(case_text(), encoding='utf-8')
    entry = load_user(path)
    assert entry.id == 'my-r3'
    assert entry.suites == ('axioms', 'averaging')
    assert entry.signature == (1, 2)
    assert not entry.sasakian


def test_load_user_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_user(tmp_path / 'absent.txt')


def test_case_not_found_lists_available():
    error = CaseNotFound('no-such', BUILTIN_IDS)
    assert error.available == BUILTIN_IDS
    assert 'r3-mixed' in str(error)
