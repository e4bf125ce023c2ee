"""Seeded random instances: split-form-preserving matrices, Lagrangian
splittings, anchors with coisotropic stabilizers, and Lagrangian
relations.  Entries stay small rationals so the exact elimination
downstream is fast and overflow-free.

Everything is driven by a caller-supplied ``random.Random`` so fixed
seeds reproduce identical instances byte for byte.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .exactlin import (
    ExactSubspace,
    Matrix,
    det,
    identity,
    inverse,
    mat_mul,
    matrix,
    transpose,
)
from .lagrel import LinearRelation, SplitSpace, hyperbolic_space
from .quadlie import QuadraticLieAlgebra


def small_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-2, 2), rng.randint(1, 3))


def random_antisym(rng: random.Random, k: int) -> Matrix:
    rows = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            x = small_fraction(rng)
            rows[i][j] = x
            rows[j][i] = -x
    return tuple(tuple(r) for r in rows)


def random_invertible(rng: random.Random, k: int) -> Matrix:
    while True:
        a = matrix(
            [[small_fraction(rng) for _ in range(k)] for _ in range(k)]
        )
        if det(a) != 0:
            return a


def random_split_transform(rng: random.Random, k: int, words: int = 3) -> Matrix:
    """A word of elementary transformations preserving the hyperbolic form
    [[0, I], [I, 0]] on Q^2k."""
    g = identity(2 * k)
    for _ in range(words):
        kind = rng.randrange(3)
        if kind == 0:
            a = random_invertible(rng, k)
            from .liegrp import block_diag

            factor = block_diag(a, transpose(inverse(a)))
        else:
            n = random_antisym(rng, k)
            rows = []
            for i in range(2 * k):
                row = [Fraction(1 if i == j else 0) for j in range(2 * k)]
                for j in range(2 * k):
                    if kind == 1 and i < k and j >= k:
                        row[j] += n[i][j - k]
                    if kind == 2 and i >= k and j < k:
                        row[j] += n[i - k][j]
                rows.append(tuple(row))
            factor = matrix(rows)
        g = mat_mul(g, factor)
    return g


def random_lagrangian_splitting(
    rng: random.Random, k: int
) -> tuple[SplitSpace, ExactSubspace, ExactSubspace]:
    """A hyperbolic space with a random transverse Lagrangian pair."""
    space = hyperbolic_space(k)
    g = random_split_transform(rng, k)
    cols = transpose(g)
    e = ExactSubspace.span(cols[:k], ambient_dim=2 * k)
    f = ExactSubspace.span(cols[k:], ambient_dim=2 * k)
    return space, e, f


def random_lagrangian_subspace(rng: random.Random, k: int) -> ExactSubspace:
    g = random_split_transform(rng, k)
    return ExactSubspace.span(transpose(g)[:k], ambient_dim=2 * k)


def random_coisotropic_anchor(
    rng: random.Random, k: int
) -> tuple[Matrix, int]:
    """An anchor on Q^2k (hyperbolic form) whose kernel is coisotropic.

    The kernel is the orthogonal of a random isotropic subspace of
    dimension j <= k; the chart dimension equals j.
    """
    j = rng.randint(0, k)
    g = random_split_transform(rng, k)
    ginv = inverse(g)
    tmix = random_invertible(rng, j) if j else ()
    # read the first j "f"-coordinates of g^-1 x: kernel = g(span of the
    # orthogonal of the first j isotropic e-directions)
    rows = []
    for r in range(j):
        rows.append(tuple(ginv[k + r][c] for c in range(2 * k)))
    anchor = mat_mul(tmix, matrix(rows)) if j else ()
    return (anchor if j else ()), j


def random_abelian_split_algebra(k: int) -> QuadraticLieAlgebra:
    """The abelian quadratic algebra on the hyperbolic Q^2k."""
    form = hyperbolic_space(k).form
    return QuadraticLieAlgebra.from_triples(2 * k, [], form.matrix)


def random_relation(
    rng: random.Random, k_source: int, k_target: int
) -> LinearRelation:
    """A random Lagrangian relation between hyperbolic spaces.

    Built from a random Lagrangian subspace of the graph space, using a
    hyperbolic frame of target (+) source-bar.
    """
    source = hyperbolic_space(k_source)
    target = hyperbolic_space(k_target)
    kk = k_source + k_target
    nt = 2 * k_target
    # hyperbolic frame of the graph space: (e', e) paired with (f', -f)
    frame_cols = []
    for i in range(k_target):
        v = [Fraction(0)] * (2 * kk)
        v[i] = Fraction(1)
        frame_cols.append(tuple(v))
    for i in range(k_source):
        v = [Fraction(0)] * (2 * kk)
        v[nt + i] = Fraction(1)
        frame_cols.append(tuple(v))
    for i in range(k_target):
        v = [Fraction(0)] * (2 * kk)
        v[k_target + i] = Fraction(1)
        frame_cols.append(tuple(v))
    for i in range(k_source):
        v = [Fraction(0)] * (2 * kk)
        v[nt + k_source + i] = Fraction(-1)
        frame_cols.append(tuple(v))
    h = transpose(matrix(frame_cols))
    g = random_split_transform(rng, kk)
    m = mat_mul(h, g)
    rows = transpose(m)[:kk]
    graph = ExactSubspace.span(rows, ambient_dim=2 * kk)
    return LinearRelation(source, target, graph)
