import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from courantlab.exactlin import (
    BilinearForm,
    DimensionMismatchError,
    ExactSubspace,
    det,
    frac,
    identity,
    inverse,
    mat_mul,
    matrix,
    nullspace,
    quotient_coords,
    rank,
    rref,
    solve,
    span,
    transpose,
    vector,
    vector_from_json,
    vector_to_json,
)


def test_span_dependent_rows_collapse():
    s = span([(1, 0), (2, 0)])
    assert s.basis == ((F(1), F(0)),)
    assert s.dim == 1


def test_empty_span_needs_ambient():
    s = span([], ambient_dim=3)
    assert s.dim == 0 and s.ambient_dim == 3
    with pytest.raises(DimensionMismatchError):
        span([])


def test_span_full_space_from_determinant():
    assert span([(1, 1), (1, -1)]).dim == 2


def test_span_permutation_canonical():
    rng = random.Random(11)
    for _ in range(25):
        vecs = [
            tuple(F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(5))
            for _ in range(4)
        ]
        shuffled = vecs[:]
        rng.shuffle(shuffled)
        assert span(vecs).basis == span(shuffled).basis


def test_intersect_examples():
    assert span([(1, 0)]).intersect(span([(0, 1)])).dim == 0
    s = span([(1, 2), (0, 1)])
    assert s.intersect(s) == s
    got = span([(1, 0), (0, 1)]).intersect(span([(1, 1)]))
    assert got.basis == ((F(1), F(1)),)


def test_sum_and_quotient():
    full = span([(1, 0)]).sum(span([(0, 1)]))
    assert full.dim == 2
    q = quotient_coords(span([(1, 1)]), span([(1, 1)]))
    assert q.dim == 0
    q2 = quotient_coords(ExactSubspace.full(2), span([(1, 1)]))
    assert q2.dim == 1
    # map is (x, y) -> x - y up to the scale fixed by the complement (1, 0)
    assert q2.coords((3, 1)) == (F(2),)
    assert q2.coords((5, 5)) == (F(0),)
    with pytest.raises(ValueError):
        quotient_coords(span([(1, 0)]), span([(0, 1)]))


def test_orth_complement_examples():
    b = BilinearForm(matrix([[1, 0], [0, -1]]))
    assert b.orth_complement(span([(1, 1)])).basis == ((F(1), F(1)),)
    assert b.orth_complement(span([], ambient_dim=2)).dim == 2
    assert b.orth_complement(ExactSubspace.full(2)).dim == 0


def test_signature():
    assert BilinearForm(matrix([[0, 1], [1, 0]])).signature() == (1, 1, 0)
    assert BilinearForm(matrix([[2, 0], [0, 3]])).signature() == (2, 0, 0)
    assert BilinearForm(matrix([[0, 0], [0, 0]])).signature() == (0, 0, 2)
    assert BilinearForm(
        matrix([[0, 0, 4], [0, 8, 0], [4, 0, 0]])
    ).signature() == (2, 1, 0)


def test_solve_and_inverse():
    a = matrix([[1, 2], [3, 4]])
    x = solve(a, vector((5, 6)))
    assert x is not None and tuple(
        sum(r[i] * x[i] for i in range(2)) for r in a
    ) == (F(5), F(6))
    assert mat_mul(a, inverse(a)) == identity(2)
    assert solve(matrix([[1, 0], [1, 0]]), vector((0, 1))) is None
    assert det(a) == F(-2)


def test_nullspace():
    ker = nullspace(matrix([[1, 2, 3], [2, 4, 6]]), 3)
    assert ker.dim == 2
    a = matrix([[1, 2, 3], [2, 4, 6]])
    for row in ker.basis:
        assert all(sum(r[i] * row[i] for i in range(3)) == 0 for r in a)


def test_json_roundtrip():
    v = vector(("1/2", -3, "7/5"))
    assert vector_from_json(vector_to_json(v)) == v
    s = span([(1, 2, "1/3")])
    assert ExactSubspace.from_json(s.to_json()) == s


@st.composite
def subspace_pairs(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    def sub():
        rows = draw(
            st.lists(
                st.lists(
                    st.fractions(min_value=-3, max_value=3, max_denominator=3),
                    min_size=n, max_size=n,
                ),
                min_size=0, max_size=n,
            )
        )
        return ExactSubspace.span([tuple(map(F, r)) for r in rows], ambient_dim=n)
    return sub(), sub()


@given(subspace_pairs())
@settings(max_examples=60, deadline=None)
def test_grassmann_dimension_identity(pair):
    s1, s2 = pair
    assert s1.dim + s2.dim == s1.sum(s2).dim + s1.intersect(s2).dim


def _hyperbolic(n):
    rows = []
    for i in range(2 * n):
        row = [F(0)] * (2 * n)
        row[(i + n) % (2 * n)] = F(1)
        rows.append(tuple(row))
    return BilinearForm(tuple(rows))


@given(subspace_pairs(), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40, deadline=None)
def test_orthogonal_laws_nondegenerate(pair, _seed):
    s1, s2 = pair
    b = _hyperbolic(s1.ambient_dim)
    big1 = ExactSubspace.span(
        [row + (F(0),) * s1.ambient_dim for row in s1.basis],
        ambient_dim=2 * s1.ambient_dim,
    )
    big2 = ExactSubspace.span(
        [row + (F(0),) * s2.ambient_dim for row in s2.basis],
        ambient_dim=2 * s2.ambient_dim,
    )
    assert b.orth_complement(b.orth_complement(big1)) == big1
    assert b.orth_complement(big1.sum(big2)) == b.orth_complement(big1).intersect(
        b.orth_complement(big2)
    )
