import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phitaylor import OpCounter, SparseMatrix, normest_power


def test_small_matrices_are_exact():
    a = np.array([[1.0, -2.0], [0.5, 3.0]])
    est = normest_power(a, 3)
    assert est.value == pytest.approx(np.linalg.norm(np.linalg.matrix_power(a, 3), 1))


def test_counts_and_determinism(rng):
    a = rng.standard_normal((40, 40))
    c1, c2 = OpCounter(), OpCounter()
    e1 = normest_power(a, 2, counter=c1)
    e2 = normest_power(a, 2, counter=c2)
    assert e1 == e2
    assert c1.norm_est_count == 1
    assert c1.matvec_count == e1.products_used


def test_sparse_and_dense_agree(rng):
    a = rng.standard_normal((30, 30)) * (rng.random((30, 30)) < 0.2)
    assert normest_power(a, 4).value == pytest.approx(
        normest_power(SparseMatrix.from_dense(a), 4).value, rel=1e-13)


def test_nonnegative_matrix_is_exact(rng):
    a = rng.random((50, 50))
    exact = np.linalg.norm(np.linalg.matrix_power(a, 2), 1)
    assert normest_power(a, 2).value == pytest.approx(exact, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 40), st.integers(1, 5), st.integers(0, 2**31), st.booleans())
def test_estimate_is_a_lower_bound_and_usually_close(n, p, seed, complex_):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    if complex_:
        a = a + 1j * rng.standard_normal((n, n))
    exact = np.linalg.norm(np.linalg.matrix_power(a, p), 1)
    est = normest_power(a, p).value
    assert est <= exact * (1 + 1e-12)
    assert est >= exact / 10
