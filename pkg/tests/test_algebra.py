import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from parahyper.algebra import (block, check_nondegenerate, gram, is_symmetric, pseudo_orthonormal_frame,
                               pullback, residual_norm, signature)
from parahyper.catalog import paraquaternionic_matrices, split_metric
from parahyper.errors import DegenerateForm, DimensionMismatch

nonzero = st.floats(min_value=0.1, max_value=10.0) | st.floats(min_value=-10.0, max_value=-0.1)


@given(st.lists(nonzero, min_size=1, max_size=8))
def test_signature_counts_diagonal_signs(entries):
    expected = (sum(v > 0 for v in entries), sum(v < 0 for v in entries))
    assert signature(np.diag(entries)) == expected


@settings(max_examples=50)
@given(st.lists(nonzero, min_size=2, max_size=6), st.integers(min_value=0, max_value=2**31 - 1))
def test_signature_is_invariant_under_congruence(entries, seed):
    rng = np.random.default_rng(seed)
    n = len(entries)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    b = np.diag(entries)
    assert signature(pullback(b, q)) == signature(b)


def test_zero_form_is_degenerate():
    with pytest.raises(DegenerateForm):
        signature(np.zeros((3, 3)))
    with pytest.raises(DegenerateForm):
        check_nondegenerate(np.diag([1.0, 1e-14]))


def test_pullback_rejects_mismatched_shapes():
    with pytest.raises(DimensionMismatch):
        pullback(np.eye(3), np.eye(2))


def test_residual_norm_is_max_abs_difference():
    assert residual_norm([1.0, -2.0, 3.0], [1.0, 2.0, 3.5]) == pytest.approx(4.0)
    with pytest.raises(DimensionMismatch):
        residual_norm(np.zeros(2), np.zeros(3))


def test_block_places_column_and_row():
    m = block(np.eye(2), [5.0, 6.0], [7.0, 8.0], 9.0)
    assert m.tolist() == [[1.0, 0.0, 5.0], [0.0, 1.0, 6.0], [7.0, 8.0, 9.0]]


def test_is_symmetric():
    assert is_symmetric(np.array([[1.0, 2.0], [2.0, 3.0]]))
    assert not is_symmetric(np.array([[1.0, 2.0], [0.0, 3.0]]))


@pytest.mark.parametrize('n', [1, 2, 3])
def test_frame_on_split_metric_is_pseudo_orthonormal(n):
    g = split_metric(n)
    frame = pseudo_orthonormal_frame(g, paraquaternionic_matrices(n))
    form = gram(g, frame)
    assert residual_norm(form, np.diag(np.diag(form))) < 1e-12
    assert residual_norm(np.abs(np.diag(form)), np.ones(4 * n)) < 1e-12
    assert (int(np.sum(np.diag(form) > 0)), int(np.sum(np.diag(form) < 0))) == (2 * n, 2 * n)


def test_frame_rejects_groups_that_do_not_fit():
    with pytest.raises(DimensionMismatch):
        pseudo_orthonormal_frame(np.eye(3), [np.eye(3)])


square = arrays(np.float64, (3, 3), elements=st.floats(min_value=-2.0, max_value=2.0))


@given(square, square, square)
def test_pullback_composes(g, a, b):
    g = g + g.T
    assert np.allclose(pullback(g, a @ b), pullback(pullback(g, a), b), atol=1e-9)


@given(square, square, square)
def test_residual_norm_triangle_inequality(a, b, c):
    assert residual_norm(a, c) <= residual_norm(a, b) + residual_norm(b, c) + 1e-12
    assert residual_norm(a, a) == 0.0
    assert residual_norm(a, b) == residual_norm(b, a)
