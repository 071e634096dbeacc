import numpy as np
import pytest

from parahyper.algebra import gram, residual_norm, signature
from parahyper.catalog import block_mixed_matrices, mixed_seed_matrix, pseudosphere
from parahyper.errors import DegenerateIntermediate, IncompatibleInputs
from parahyper.mixed3 import (MetricMixed, MixedTriple, check_contact, check_metric_compatibility,
                              check_mixed_axioms, compatible_form, compatible_metric, mixed_axiom_residuals,
                              mixed_frame, sasakian_defect)
from parahyper.report import FAIL, PASS
from parahyper.smooth import Chart, MetricField, SamplePlan, levi_civita, ricci


def block_mixed(n: int) -> MixedTriple:
    return MixedTriple.constant(Chart.cube(f'R{4 * n + 3}', 4 * n + 3), *block_mixed_matrices(n))


@pytest.mark.parametrize('n', [0, 1, 2])
def test_block_structures_satisfy_the_axioms(n, plan):
    m = block_mixed(n)
    names = [check_contact(t, plan).identity for t in m.triples]
    assert names == ['almost-contact', 'lorentzian-paracontact', 'lorentzian-paracontact']
    assert all(check_contact(t, plan).residual == 0.0 for t in m.triples)
    report = check_mixed_axioms(m, plan)
    assert report.verdict == PASS
    assert list(report.details) == ['mixed-eta-xi', 'mixed-phi-xi', 'mixed-eta-phi', 'mixed-phi-phi']


def test_flipping_phi1_breaks_the_mixed_relations():
    phis, xis, etas = block_mixed_matrices(0)
    m = MixedTriple.constant(Chart.cube('R3', 3), [-phis[0], phis[1], phis[2]], xis, etas)
    residuals = mixed_axiom_residuals(m, np.zeros(3))
    assert residuals['mixed-eta-xi'] == 0.0
    assert residuals['mixed-phi-xi'] > 0.5


def test_reoriented_triple_keeps_the_axioms(plan):
    m = block_mixed(1).reoriented()
    assert check_mixed_axioms(m, plan).verdict == PASS
    assert all(check_contact(t, plan).verdict == PASS for t in m.triples)


@pytest.mark.parametrize('n, expected', [(0, (1, 2)), (1, (3, 4)), (2, (5, 6))])
def test_four_step_metric(n, expected, plan):
    m = block_mixed(n)
    dim = 4 * n + 3
    g = compatible_metric(m, MetricField.const(m.chart, mixed_seed_matrix(dim)), plan)
    mm = MetricMixed(m, g)
    assert check_metric_compatibility(mm, plan).verdict == PASS
    assert signature(g(np.zeros(dim))) == expected
    again = compatible_metric(m, g, plan)
    assert np.allclose(again(np.zeros(dim)), g(np.zeros(dim)))


def test_intermediate_forms_are_reported_in_order():
    m = block_mixed(0)
    data = [t.at(np.zeros(3)) for t in m.triples]
    forms = compatible_form(mixed_seed_matrix(3), data)
    assert len(forms) == 4
    assert all(np.allclose(f, f.T) for f in forms)


def test_degenerate_seed_names_the_step():
    m = block_mixed(0)
    with pytest.raises(DegenerateIntermediate) as info:
        compatible_metric(m, MetricField.const(m.chart, np.zeros((3, 3))), SamplePlan(count=2))
    assert info.value.step == 1


def test_asymmetric_seed_is_rejected():
    m = block_mixed(0)
    seed = np.eye(3)
    seed[0, 1] = 0.5
    with pytest.raises(IncompatibleInputs):
        compatible_metric(m, MetricField.const(m.chart, seed), SamplePlan(count=2))


@pytest.mark.parametrize('n', [0, 1])
def test_mixed_frame_is_pseudo_orthonormal(n):
    m = block_mixed(n)
    dim = 4 * n + 3
    g = compatible_metric(m, MetricField.const(m.chart, mixed_seed_matrix(dim)))
    frame = mixed_frame(MetricMixed(m, g), np.zeros(dim))
    form = gram(g(np.zeros(dim)), frame)
    assert len(frame) == dim
    assert np.allclose(form, np.diag(np.sign(np.diag(form))))
    assert np.allclose(frame[-3:], [t.xi(np.zeros(dim)) for t in m.triples])


def test_flat_structure_is_not_sasakian(plan, scheme):
    m = block_mixed(0)
    g = compatible_metric(m, MetricField.const(m.chart, mixed_seed_matrix(3)))
    assert sasakian_defect(MetricMixed(m, g), scheme, plan).verdict == FAIL


@pytest.mark.slow
def test_pseudosphere_is_mixed_sasakian(scheme):
    mm = pseudosphere(0)
    plan = SamplePlan(count=4, seed=1)
    assert check_mixed_axioms(mm.mixed, plan, tol=1e-9).verdict == PASS
    assert check_metric_compatibility(mm, plan, tol=1e-9).verdict == PASS
    report = sasakian_defect(mm, scheme, plan)
    assert report.verdict == PASS
    assert report.details['literal_alpha2'] > report.details['alpha2']


@pytest.mark.slow
def test_pseudosphere_is_einstein(catalog, scheme):
    entry = catalog['s3-1-sphere']
    g = entry.mixed.g
    conn = levi_civita(g, scheme)
    assert entry.einstein_constant == 2.0
    for x in g.chart.sample(SamplePlan(count=4)):
        assert residual_norm(ricci(g, x, scheme, conn), 2.0 * g(x)) < 5e-3
