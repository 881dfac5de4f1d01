"""Structural laws of the dg-algebra layer: d^2 = 0, Leibniz, graded
commutativity, divided powers, parity rules, minimality detection."""

import math
import random

import pytest

from dgkernel import (QQ, GF, ParityError, NotCycleError,
                      EXTERIOR, POLYNOMIAL, DIVIDED_POWER)
from dgkernel import acyclic_closure
from _fixtures import hypersurface, complete_intersection, golod


def closure_algebra(field, N=6, D=6):
    A = complete_intersection(field, N=N, D=D)
    return acyclic_closure(A, N, D).algebra


def random_element(U, i, j, rng):
    basis = U.basis_of_bidegree(i, j)
    if not basis:
        return None
    coords = {}
    for n in range(len(basis)):
        c = U.field.from_int(rng.randint(-3, 3))
        if not U.field.is_zero(c):
            coords[n] = c
    return U.element_from_coords(i, j, coords)


def random_elements(U, rng, count):
    out = []
    while len(out) < count:
        i = rng.randint(0, U.max_hdeg)
        j = rng.randint(0, U.max_intdeg)
        u = random_element(U, i, j, rng)
        if u is not None and not u.is_zero():
            out.append(u)
    return out


@pytest.mark.parametrize("field", [QQ, GF(2), GF(3)])
def test_d_squared_zero(field):
    U = closure_algebra(field)
    rng = random.Random(11)
    for u in random_elements(U, rng, 40):
        ddu = U.differential(U.differential(u))
        assert ddu.is_zero()


@pytest.mark.parametrize("field", [QQ, GF(2), GF(3)])
def test_leibniz(field):
    U = closure_algebra(field)
    rng = random.Random(13)
    F = U.field
    for _ in range(40):
        u, v = random_elements(U, rng, 2)
        if u.hdeg + v.hdeg > U.max_hdeg or u.intdeg + v.intdeg > U.max_intdeg:
            continue
        lhs = U.differential(U.multiply(u, v))
        sign = F.from_int((-1) ** u.hdeg)
        # d(uv) = du*v + (-1)^|u| u*dv
        rhs_terms = dict(U.multiply(U.differential(u), v).terms)
        for key, c in U.multiply(u, U.differential(v)).terms.items():
            s = F.add(rhs_terms.get(key, F.zero), F.mul(sign, c))
            if F.is_zero(s):
                rhs_terms.pop(key, None)
            else:
                rhs_terms[key] = s
        assert lhs.terms == rhs_terms


@pytest.mark.parametrize("field", [QQ, GF(2), GF(3)])
def test_graded_commutativity(field):
    U = closure_algebra(field)
    rng = random.Random(17)
    F = U.field
    for _ in range(40):
        u, v = random_elements(U, rng, 2)
        if u.hdeg + v.hdeg > U.max_hdeg or u.intdeg + v.intdeg > U.max_intdeg:
            continue
        uv = U.multiply(u, v)
        vu = U.multiply(v, u)
        sign = F.from_int((-1) ** (u.hdeg * v.hdeg))
        scaled = {k: F.mul(sign, c) for k, c in vu.terms.items()}
        assert uv.terms == scaled


@pytest.mark.parametrize("field", [QQ, GF(2), GF(3)])
def test_divided_power_law(field):
    U = closure_algebra(field)
    dp = [v for v in U.variables if v.kind == DIVIDED_POWER]
    assert dp, "closure of a complete intersection has divided powers"
    v = dp[0]
    F = U.field
    for a in range(1, 3):
        for b in range(1, 3):
            if (a + b) * v.hdeg > U.max_hdeg or \
                    (a + b) * v.intdeg > U.max_intdeg:
                continue
            prod = U.multiply(U.var_element(v.id, a), U.var_element(v.id, b))
            expect = U.var_element(v.id, a + b)
            binom = F.from_int(math.comb(a + b, a))
            scaled = {k: F.mul(binom, c) for k, c in expect.terms.items()
                      if not F.is_zero(F.mul(binom, c))}
            assert prod.terms == scaled


def test_odd_squares_vanish():
    U = closure_algebra(QQ)
    odd = [v for v in U.variables if v.hdeg % 2 == 1][0]
    e = U.var_element(odd.id)
    assert U.multiply(e, e).is_zero()


def test_adjoin_parity_enforced():
    A = hypersurface(QQ, N=6, D=6)
    x = A.base_element(1, A.base.normal_form(1, (1,)))
    with pytest.raises(ParityError):
        A.adjoin_variable(x, POLYNOMIAL)
    A1 = A.adjoin_variable(x, EXTERIOR, name="e")
    e = A1.var_element(0)
    with pytest.raises(ParityError):
        A1.adjoin_variable(A1.multiply(
            A1.base_element(1, A1.base.normal_form(1, (1,))), e), EXTERIOR)


def test_adjoin_requires_cycle():
    A = hypersurface(QQ, N=6, D=6)
    x = A.base_element(1, A.base.normal_form(1, (1,)))
    A1 = A.adjoin_variable(x, EXTERIOR, name="e")
    e = A1.var_element(0)  # d(e) = x != 0
    with pytest.raises(NotCycleError):
        A1.adjoin_variable(e, POLYNOMIAL)


def test_differential_lowers_degree_and_preserves_intdeg():
    U = closure_algebra(QQ)
    rng = random.Random(19)
    for u in random_elements(U, rng, 20):
        du = U.differential(u)
        assert du.hdeg == u.hdeg - 1
        assert du.intdeg == u.intdeg


def test_is_minimal_on_closure():
    U = closure_algebra(QQ)
    ok, witness = U.is_minimal()
    assert ok, witness
