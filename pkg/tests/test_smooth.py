import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parahyper.catalog import conformal_factor
from parahyper.errors import ChartMismatch, InvalidConfig, OutOfDomain
from parahyper.smooth import (Chart, FDScheme, MetricField, SamplePlan, ScalarField, VectorField, apply_riemann,
                              curvature, directional_derivative, jacobian, levi_civita, lie_bracket,
                              probe_fields, ricci, riemann_tensor)


def sphere_metric() -> MetricField:
    """单位球面 dθ² + sin²θ dφ²，Ric = g"""
    chart = Chart('S2', (0.6, -1.0), (2.4, 1.0))
    return MetricField(chart, lambda x: np.diag([1.0, math.sin(x[0]) ** 2]))


def test_chart_validates_bounds():
    with pytest.raises(InvalidConfig):
        Chart('bad', (0.0, 1.0), (1.0, 1.0))
    with pytest.raises(InvalidConfig):
        Chart('bad', (0.0,), (1.0, 2.0))


def test_sampling_is_reproducible_and_inside_margin():
    chart = Chart.cube('C', 3)
    plan = SamplePlan(count=50, seed=3, margin=0.1)
    a, b = chart.sample(plan), chart.sample(plan)
    assert np.array_equal(a, b)
    assert np.all(np.abs(a) <= 0.8 + 1e-12)
    assert not np.array_equal(a, chart.sample(SamplePlan(count=50, seed=4)))


def test_scheme_rejects_bad_order():
    with pytest.raises(InvalidConfig):
        FDScheme(order=3)


@pytest.mark.parametrize('order, tol', [(2, 2e-6), (4, 1e-10)])
def test_directional_derivative_of_cubic(order, tol):
    chart = Chart.cube('C', 2)
    f = ScalarField(chart, lambda x: x[0] ** 3 + x[0] * x[1])
    point = np.array([0.3, -0.4])
    value = directional_derivative(f, point, 0, FDScheme(step=1e-3, order=order))
    assert float(value) == pytest.approx(3 * 0.3 ** 2 - 0.4, abs=tol)


def test_derivative_outside_collar_raises(scheme):
    chart = Chart.cube('C', 2)
    f = ScalarField(chart, lambda x: x[0])
    with pytest.raises(OutOfDomain):
        directional_derivative(f, np.array([1.5, 0.0]), 0, scheme)


def test_lie_bracket_of_coordinate_fields(scheme):
    chart = Chart.cube('C', 2)
    d_x = VectorField.const(chart, [1.0, 0.0])
    x_d_y = VectorField(chart, lambda x: np.array([0.0, x[0]]))
    bracket = lie_bracket(d_x, x_d_y, scheme)
    assert np.allclose(bracket(np.array([0.2, 0.1])), [0.0, 1.0], atol=1e-8)


def test_lie_bracket_requires_same_chart(scheme):
    a = VectorField.const(Chart.cube('A', 2), [1.0, 0.0])
    b = VectorField.const(Chart.cube('B', 2, 0.0, 1.0), [1.0, 0.0])
    with pytest.raises(ChartMismatch):
        lie_bracket(a, b, scheme)


def test_levi_civita_of_sphere(scheme):
    g = sphere_metric()
    conn = levi_civita(g, scheme)
    theta = 1.1
    gamma = conn(np.array([theta, 0.2]))
    assert gamma[0, 1, 1] == pytest.approx(-math.sin(theta) * math.cos(theta), abs=1e-7)
    assert gamma[1, 0, 1] == pytest.approx(math.cos(theta) / math.sin(theta), abs=1e-7)
    assert gamma[1, 1, 0] == pytest.approx(gamma[1, 0, 1])


def test_constant_metric_is_flat(scheme):
    chart = Chart.cube('C', 3)
    conn = levi_civita(MetricField.const(chart, np.diag([1.0, -1.0, 1.0])), scheme)
    assert conn.flat
    assert not np.any(riemann_tensor(conn, np.zeros(3), scheme))


def test_ricci_of_unit_sphere(scheme):
    g = sphere_metric()
    for point in g.chart.sample(SamplePlan(count=4)):
        assert np.allclose(ricci(g, point, scheme), g(point), atol=1e-4)


def test_curvature_field_matches_riemann_tensor(scheme):
    g = sphere_metric()
    conn = levi_civita(g, scheme)
    X, Y = probe_fields(g.chart)
    Z = VectorField(g.chart, lambda x: np.array([x[1], 1.0]))
    field = curvature(conn, X, Y, Z, scheme)
    point = np.array([1.2, 0.3])
    rm = riemann_tensor(conn, point, scheme)
    assert np.allclose(field(point), apply_riemann(rm, X(point), Y(point), Z(point)), atol=1e-3)


def test_nested_step_follows_the_first_step():
    scheme = FDScheme.from_step(5e-5, order=4)
    assert scheme.order == 4
    assert scheme.nested_step == pytest.approx(5e-4)
    assert FDScheme.from_step(FDScheme().step) == FDScheme()
    with pytest.raises(InvalidConfig):
        FDScheme.from_step(0.0)


coefficient = st.floats(min_value=-1.0, max_value=1.0)
inner = st.floats(min_value=-0.5, max_value=0.5)


@settings(max_examples=15, deadline=None)
@given(st.tuples(coefficient, coefficient, coefficient), st.tuples(inner, inner, inner))
def test_lie_bracket_satisfies_jacobi(c, point):
    chart = Chart.cube('R3', 3)
    X, Y = probe_fields(chart)
    Z = VectorField(chart, lambda x: np.array([c[0] * x[1] * x[2], c[1] + x[0] ** 2, c[2] * x[0] * x[1]]))
    scheme = FDScheme()

    def nested(A, B, C):
        return lie_bracket(A, lie_bracket(B, C, scheme), scheme, nested=True)

    total = nested(X, Y, Z)(point) + nested(Y, Z, X)(point) + nested(Z, X, Y)(point)
    assert np.max(np.abs(total)) < 1e-5


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.8, max_value=2.2), st.floats(min_value=-0.8, max_value=0.8))
def test_levi_civita_is_metric_compatible(theta, phi):
    g = sphere_metric()
    scheme = FDScheme()
    conn = levi_civita(g, scheme)
    x = np.array([theta, phi])
    metric, gamma = g(x), conn(x)
    dg = jacobian(g, x, scheme)  # dg[i, j, k] = ∂_k g_ij
    nabla_g = dg - np.einsum('lki,lj->ijk', gamma, metric) - np.einsum('lkj,il->ijk', gamma, metric)
    assert np.max(np.abs(nabla_g)) < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.floats(min_value=0.8, max_value=2.2), st.floats(min_value=-0.8, max_value=0.8))
def test_riemann_tensor_antisymmetries(theta, phi):
    g = sphere_metric()
    scheme = FDScheme()
    x = np.array([theta, phi])
    rm = riemann_tensor(levi_civita(g, scheme), x, scheme)
    assert np.allclose(rm, -rm.transpose(0, 1, 3, 2), atol=1e-12)
    lowered = np.einsum('ea,abcd->ebcd', g(x), rm)
    assert np.allclose(lowered, -lowered.transpose(1, 0, 2, 3), atol=5e-3)


@settings(max_examples=20, deadline=None)
@given(st.tuples(inner, inner, inner, inner))
def test_conformal_christoffel_symbols(catalog, point):
    g = catalog['conformal-ph'].base_metric
    x = np.array(point)
    grad = np.array([0.3 * math.cos(x[0]), 0.2 * x[2], 0.2 * x[1], 0.2 * x[3]])
    flat = g(x) * math.exp(-2.0 * conformal_factor(x))
    eye = np.eye(4)
    expected = (np.einsum('ki,j->kij', eye, grad) + np.einsum('kj,i->kij', eye, grad)
                - np.einsum('ij,kl,l->kij', flat, np.linalg.inv(flat), grad))
    assert np.allclose(levi_civita(g, FDScheme())(x), expected, atol=1e-6)
