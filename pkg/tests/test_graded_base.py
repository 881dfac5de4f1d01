"""Truncated graded quotient bases: dimensions, normal forms, products."""

import pytest

from dgkernel import (QQ, GF, BaseVariable, BasePresentation, TruncatedBase,
                      HomogeneityError)
from _fixtures import ring_base


def test_hypersurface_dims():
    R = ring_base(QQ, [("x", 1)], [{(2,): 1}], 6)
    assert [R.dim(j) for j in range(7)] == [1, 1, 0, 0, 0, 0, 0]


def test_truncated_polynomial_dims():
    # k[x]/(x^3): dims 1,1,1,0,...
    R = ring_base(QQ, [("x", 1)], [{(3,): 1}], 6)
    assert [R.dim(j) for j in range(5)] == [1, 1, 1, 0, 0]


def test_golod_base_dims():
    # k[x,y]/(x^2, xy): degree j >= 1 has basis {y^j, x for j=1}
    R = ring_base(QQ, [("x", 1), ("y", 1)], [{(2, 0): 1}, {(1, 1): 1}], 6)
    assert R.dim(0) == 1
    assert R.dim(1) == 2
    assert all(R.dim(j) == 1 for j in range(2, 7))


def test_ci_base_dims():
    R = ring_base(QQ, [("x", 1), ("y", 1)], [{(2, 0): 1}, {(0, 2): 1}], 6)
    assert [R.dim(j) for j in range(4)] == [1, 2, 1, 0]


def test_normal_form_reduces():
    R = ring_base(QQ, [("x", 1), ("y", 1)], [{(2, 0): 1, (0, 2): -1}], 6)
    # x^2 = y^2 in the quotient: both normal forms agree
    assert R.normal_form(2, (2, 0)) == R.normal_form(2, (0, 2))


def test_multiplication_associative_sample():
    R = ring_base(QQ, [("x", 1), ("y", 1)], [{(2, 0): 1}, {(1, 1): 1}], 8)
    x = R.normal_form(1, (1, 0))
    y = R.normal_form(1, (0, 1))
    xy = R.multiply(1, x, 1, y)
    assert not xy  # x*y = 0
    yy = R.multiply(1, y, 1, y)
    yyy1 = R.multiply(2, yy, 1, y)
    assert yyy1 == R.normal_form(3, (0, 3))


def test_graded_hdeg_generator():
    # k[x0]/(x0^2) with |x0| = 2: degree-1 slice sits in homological deg 2
    v = BaseVariable("x0", 1, 2)
    R = TruncatedBase(BasePresentation(QQ, [v], [{(2,): 1}]), 4)
    assert R.dim(1) == 1
    assert R.basis_hdeg(1, 0) == 2
    assert R.dim(2) == 0


def test_nonhomogeneous_relation_rejected():
    with pytest.raises(HomogeneityError):
        BasePresentation(QQ, [BaseVariable("x", 1)], [{(2,): 1, (1,): 1}])


def test_linear_relation_rejected():
    with pytest.raises(HomogeneityError):
        BasePresentation(QQ, [BaseVariable("x", 1)], [{(1,): 1}])


def test_odd_base_hdeg_rejected():
    with pytest.raises(ValueError):
        BaseVariable("x", 1, 3)


def test_characteristic_p_base():
    R = ring_base(GF(2), [("x", 1)], [{(2,): 1}], 4)
    assert R.dim(1) == 1
    two_x = R.multiply(0, {0: GF(2).from_int(2)}, 1, {0: GF(2).one})
    assert not two_x
