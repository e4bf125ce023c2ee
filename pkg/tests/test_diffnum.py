import numpy as np
import pytest

from courantlab.anchored import AnchoredPoint, SectionJet, courant_bracket_jets
from courantlab.contexts import sl2_algebra
from courantlab.diffnum import (
    ChartBivectorField,
    Trivector,
    action_axiom_check,
    courant_bracket_jets_np,
    main_identity_rhs,
    push_trivector,
    relatedness_check,
    schouten_fd,
    structure_tensor_np,
    vf_bracket_fd,
    wedge3,
)
from courantlab.exactlin import matrix
from courantlab.quadlie import build_double, cartan_trivector, diagonal_subspace
from courantlab.randgen import random_abelian_split_algebra


def field(fn, dim=3, h=1e-4):
    return ChartBivectorField(dim, fn, step=h)


def test_constant_field_zero_bracket():
    p = np.array([[0.0, 2.0, -1.0], [-2.0, 0.0, 0.5], [1.0, -0.5, 0.0]])
    tri = schouten_fd(field(lambda x: p), np.zeros(3))
    assert tri.max_abs() < 1e-14


def test_rank_two_linear_field_zero():
    def sampler(x):
        out = np.zeros((3, 3))
        out[1, 2] = x[0]
        out[2, 1] = -x[0]
        return out

    tri = schouten_fd(field(sampler), np.array([0.4, -0.2, 1.1]))
    assert tri.max_abs() < 1e-13


def test_regression_nonzero_bracket():
    # pi = x2 d1^d2 + d2^d3: the bracket is the constant -2 d1^d2^d3
    def sampler(x):
        out = np.zeros((3, 3))
        out[0, 1] = x[1]
        out[1, 0] = -x[1]
        out[1, 2] = 1.0
        out[2, 1] = -1.0
        return out

    tri = schouten_fd(field(sampler), np.array([0.3, -0.7, 0.25]))
    assert tri.values[0, 1, 2] == pytest.approx(-2.0, abs=1e-10)
    # full antisymmetry of the output table
    v = tri.values
    assert v[1, 0, 2] == pytest.approx(2.0, abs=1e-10)
    assert v[1, 2, 0] == pytest.approx(-2.0, abs=1e-10)


def _curved_poisson():
    def sampler(y):
        y1, y2, _ = y
        w = y2 - y1 * y1
        p13 = 2.0 * y1 * w
        p23 = 4.0 * y1 * y1 * w - w * w
        return np.array(
            [[0.0, 1.0, p13], [-1.0, 0.0, p23], [-p13, -p23, 0.0]]
        )

    return sampler


def test_second_order_ladder():
    # analytically zero case with quartic entries: the ratio is exactly 4
    point = np.array([0.3, 0.7, 0.2])
    res = {}
    for h in (1e-3, 5e-4, 2.5e-4):
        res[h] = schouten_fd(field(_curved_poisson(), h=h), point).max_abs()
    assert res[1e-3] > 1e-9  # genuinely nonzero truncation
    assert res[1e-3] / res[5e-4] == pytest.approx(4.0, abs=0.5)
    assert res[5e-4] / res[2.5e-4] == pytest.approx(4.0, abs=0.5)


def test_sampler_shape_and_antisymmetry_guard():
    bad = ChartBivectorField(2, lambda x: np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):
        bad(np.zeros(2))
    wrong = ChartBivectorField(2, lambda x: np.zeros((3, 3)))
    with pytest.raises(ValueError):
        wrong(np.zeros(2))


def test_wedge3_convention():
    u, v, w = np.eye(3)
    table = wedge3(u, v, w)
    assert table[0, 1, 2] == 1.0
    assert table[1, 0, 2] == -1.0
    assert table[2, 0, 1] == 1.0


def test_push_trivector_zeros():
    a = np.eye(3)
    assert push_trivector(a, (), [np.zeros(3)] * 3).max_abs() == 0.0
    vals = (((0, 1, 2), 5),)
    zero_anchor = np.zeros((3, 3))
    assert push_trivector(zero_anchor, vals, np.eye(3)).max_abs() == 0.0
    got = push_trivector(a, vals, np.eye(3))
    assert got.values[0, 1, 2] == 5.0


def test_vf_bracket_examples():
    # coordinate fields commute
    b = vf_bracket_fd(lambda x: np.array([1.0, 0.0]), lambda x: np.array([0.0, 1.0]),
                      np.array([0.2, 0.4]))
    assert np.max(np.abs(b)) < 1e-12
    # rotation and scaling commute
    rot = lambda x: np.array([-x[1], x[0]])
    scale = lambda x: np.array([x[0], x[1]])
    b2 = vf_bracket_fd(rot, scale, np.array([0.7, -0.3]))
    assert np.max(np.abs(b2)) < 1e-10


def test_action_axiom_check_sl2_fields():
    # matrix-commutator fields X(g) = g u realize the bracket
    import courantlab.liegrp as liegrp
    from courantlab.contexts import sl2_context

    ctx = sl2_context()
    fc = liegrp.FloatChart.build(ctx, ctx.sample_points[1])

    def rho(i, t):
        g = fc.point(t)
        amb = g @ fc.basis[i]
        xi = fc.coords_of_algebra(np.linalg.solve(g, amb))
        return np.linalg.solve(fc.dexp_matrix(t), xi)

    rep = action_axiom_check(rho, ctx.algebra, [np.zeros(3)], tol=1e-7)
    assert rep.passed, rep.max_residual


def test_relatedness_check():
    pi = np.array([[0.0, 1.0], [-1.0, 0.0]])
    ok, r = relatedness_check(np.eye(2), pi, pi)
    assert ok and r == 0.0
    ok2, _ = relatedness_check(np.zeros((2, 2)), pi, np.zeros((2, 2)))
    assert ok2
    ok3, _ = relatedness_check(np.zeros((2, 2)), pi, pi, tol=1e-9)
    assert not ok3


def test_float_jet_bracket_matches_exact():
    import random
    from fractions import Fraction as F

    from courantlab.randgen import random_coisotropic_anchor

    rng = random.Random(31)
    alg = random_abelian_split_algebra(2)
    anchor, j = random_coisotropic_anchor(rng, 2)
    while j == 0:
        anchor, j = random_coisotropic_anchor(rng, 2)
    pt = AnchoredPoint(alg, anchor, j)

    def jet():
        v = [F(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(4)]
        jac = [[F(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(j)] for _ in range(4)]
        return SectionJet(v, jac)

    x, y = jet(), jet()
    exact = courant_bracket_jets(pt, x, y)
    a_np = np.array([[float(c) for c in row] for row in pt.anchor])
    got = courant_bracket_jets_np(
        alg,
        a_np,
        np.array([float(c) for c in x.value]),
        np.array([[float(c) for c in row] for row in x.jacobian]),
        np.array([float(c) for c in y.value]),
        np.array([[float(c) for c in row] for row in y.jacobian]),
    )
    assert np.max(np.abs(got - np.array([float(c) for c in exact]))) < 1e-12


def test_main_identity_rhs_vanishes_for_subalgebra_pairs():
    # both halves of the triangular splitting are subalgebras
    from courantlab.contexts import sl2_context, triangular_complement
    from courantlab.liegrp import double_action_anchor

    ctx = sl2_context()
    d = build_double(ctx.algebra)
    pt = double_action_anchor(ctx, ctx.sample_points[3])
    rhs = main_identity_rhs(
        d, diagonal_subspace(ctx.algebra, 1), triangular_complement(), pt.exact_anchor()
    )
    assert rhs.max_abs() == 0.0
