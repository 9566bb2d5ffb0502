"""Exact rational linear algebra helpers."""

from fractions import Fraction

import numpy as np
import pytest

from heiscot import _exact
from heiscot._exact import (
    det,
    feye,
    fmat,
    fr,
    inv,
    is_exact,
    ldl_inertia,
    nullspace_sparse,
    solve,
    to_float,
)


def test_fr_rejects_floats():
    with pytest.raises(TypeError):
        fr(0.5)
    assert fr(3) == Fraction(3)
    assert fr(Fraction(1, 3)) == Fraction(1, 3)


def test_inv_and_solve_roundtrip():
    a = fmat([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    ai = inv(a)
    assert (to_float(a @ ai) == np.eye(3)).all()
    b = fmat([[1], [0], [2]])
    x = solve(a, b)
    assert (to_float(a @ x - b) == 0).all()


def test_inv_singular_raises():
    a = fmat([[1, 2], [2, 4]])
    with pytest.raises(ZeroDivisionError):
        inv(a)


def test_det_matches_cofactor_oracle():
    a = fmat([[1, 2, 3], [0, 4, 5], [1, 0, 6]])
    # 1*(24-0) - 2*(0-5) + 3*(0-4) = 24 + 10 - 12
    assert det(a) == Fraction(22)


def test_nullspace_sparse_known_kernel():
    # x + y = 0, y + z = 0  ->  kernel spanned by (1, -1, 1)
    rows = [{0: fr(1), 1: fr(1)}, {1: fr(1), 2: fr(1)}]
    basis = nullspace_sparse(rows, 3)
    assert len(basis) == 1
    v = basis[0]
    assert v[0] == -v[1] == v[2] != 0


def test_ldl_inertia_signature():
    a = fmat([[2, 0, 0], [0, -3, 0], [0, 0, 0]])
    assert ldl_inertia(a) == (1, 1, 1)
    b = fmat([[0, 1], [1, 0]])   # hyperbolic plane, needs a pivot swap
    assert ldl_inertia(b) == (1, 1, 0)


def test_is_exact_discriminates():
    assert is_exact(feye(2))
    assert not is_exact(np.eye(2))
