import random
from fractions import Fraction as F

import numpy as np
import pytest

import courantlab.liegrp as liegrp

from courantlab.anchored import check_coisotropic_stabilizer, stabilizer
from courantlab.contexts import (
    abelian2_triple,
    get_group_context,
    sl2_context,
    sl2_pair_context,
    sl2_triangular_triple,
    sl2c_realified_context,
    sl2c_triangular_complement,
    triangular_complement,
    twisted_diagonal_complement,
)
from courantlab.diffnum import (
    action_axiom_check,
    main_identity_rhs,
    relatedness_check,
    schouten_fd,
    verify_main_identity,
)
from courantlab.exactlin import (
    ExactSubspace,
    concat_vec,
    identity,
    mat_vec,
    matrix,
    transpose,
)
from courantlab.lagrel import (
    backward_image,
    backward_image_subspace,
    product_subspace,
    related_splitting,
)
from courantlab.liegrp import (
    GroupContext,
    action_morphism_check,
    adjoint_matrix,
    amb_inv,
    amb_mul,
    ambient_to_chart,
    double_action_anchor,
    double_chart_at,
    dmult_fd,
    dressing_anchor,
    dressing_field_sampler,
    dressing_pullback_check,
    exp_chart,
    g1_bivector_field,
    g1_poisson_bivector,
    np_matrix,
    p_phi_fiber,
    pair_multiplication_check,
    phi_r_homomorphism_residual,
    pi_plus_minus,
    pi_plus_minus_invariant,
    product_splittings,
    q_mult_fiber,
    q_mult_kernel_expected,
    r_matrix,
    s_phi_fiber,
    t_psi_fiber,
    validate_context,
)
from courantlab.quadlie import (
    ManinTriple,
    build_double,
    diagonal_subspace,
    is_lagrangian,
    is_subalgebra,
    validate_algebra,
    validate_manin_triple,
)

CTX = sl2_context()
PAIR = sl2_pair_context()
TRIPLE = sl2_triangular_triple()


def test_contexts_validate():
    for name in ("sl2-double", "sl2-pair", "abelian-2", "sl2c-real"):
        ctx = get_group_context(name)
        validate_context(ctx)
        assert validate_algebra(ctx.algebra).passed


def test_context_json_roundtrip():
    data = CTX.to_json()
    again = GroupContext.from_json(data, name="sl2-copy")
    validate_context(again)
    assert again.algebra == CTX.algebra
    assert again.sample_points == CTX.sample_points


def test_exp_chart_frame():
    frame = exp_chart(CTX, CTX.sample_points[0])
    # at the identity the frame is the basis itself
    for i, b in enumerate(CTX.algebra_basis):
        coords = ambient_to_chart(frame, b)
        assert coords == tuple(F(1 if j == i else 0) for j in range(3))
    # chart derivative along one direction: numerical vs g0 . X
    import courantlab.liegrp as liegrp

    g0 = CTX.sample_points[5]
    fc = liegrp.FloatChart.build(CTX, g0)
    h = 1e-6
    for a in range(3):
        t = np.zeros(3)
        t[a] = h
        tm = np.zeros(3)
        tm[a] = -h
        fd = (fc.point(t) - fc.point(tm)) / (2 * h)
        exact = np_matrix(g0) @ fc.basis[a]
        assert np.max(np.abs(fd - exact)) < 1e-9


def test_double_action_stabilizer():
    for g in CTX.sample_points[:6]:
        pt = double_action_anchor(CTX, g)
        adg = adjoint_matrix(CTX, g)
        rows = [concat_vec(mat_vec(adg, v), v) for v in identity(3)]
        assert stabilizer(pt) == ExactSubspace.span(rows, ambient_dim=6)
        ok, _ = check_coisotropic_stabilizer(pt)
        assert ok


def test_pi_plus_minus_exact_identities():
    for d in PAIR.sample_points:
        pip, pim = pi_plus_minus(TRIPLE, d)
        plus, minus = pi_plus_minus_invariant(TRIPLE, d)
        assert pip.matrix == plus
        assert pim.matrix == minus
    pip_e, pim_e = pi_plus_minus(TRIPLE, PAIR.sample_points[0])
    assert all(x == 0 for row in pim_e.matrix for x in row)
    two_r = tuple(tuple(2 * x for x in row) for row in r_matrix(TRIPLE).matrix)
    assert pip_e.matrix == two_r


def test_mult_anchor_equivariance():
    worst = pair_multiplication_check(PAIR, PAIR.sample_points[1], PAIR.sample_points[2])
    assert worst < 1e-9


def test_dressing_anchors():
    for g in CTX.sample_points:
        right, left = dressing_anchor(TRIPLE, g)
        assert check_coisotropic_stabilizer(right)[0]
        assert check_coisotropic_stabilizer(left)[0]
    # at the identity the right action restricted to g1 is the full frame
    right_e, _ = dressing_anchor(TRIPLE, CTX.sample_points[0])
    for i in range(3):
        diag_vec = tuple(
            F(1 if (j == i or j == i + 3) else 0) for j in range(6)
        )
        got = right_e.apply(diag_vec)
        assert got == tuple(F(1 if r == i else 0) for r in range(3))


def test_dressing_action_axiom_fd():
    rho = dressing_field_sampler(TRIPLE, CTX.sample_points[2])
    rep = action_axiom_check(rho, TRIPLE.d_algebra, [np.zeros(3)], tol=1e-6)
    assert rep.passed, rep.max_residual


def test_phi_r_homomorphism():
    worst = 0.0
    for d0 in PAIR.sample_points[:2]:
        for (i, j) in [(0, 4), (1, 5)]:
            z1 = tuple(F(1 if a == i else 0) for a in range(6))
            z2 = tuple(F(1 if a == j else 0) for a in range(6))
            worst = max(worst, phi_r_homomorphism_residual(TRIPLE, d0, z1, z2))
    assert worst < 1e-6


def test_dressing_pullback_identification():
    for g in CTX.sample_points[:6]:
        assert dressing_pullback_check(TRIPLE, g)


def test_p_phi_backward_images():
    eplus, fplus, eminus, fminus = product_splittings(TRIPLE)
    for g in CTX.sample_points[:5]:
        p = p_phi_fiber(TRIPLE, g)
        assert backward_image_subspace(eminus, p) == TRIPLE.g1
        img_f, _ = backward_image(fminus, p)
        assert img_f == TRIPLE.g2
        # both plus-splitting halves pull back to the same subspace
        assert backward_image_subspace(eplus, p) == backward_image_subspace(fplus, p)
    rel = related_splitting(
        (TRIPLE.g1, TRIPLE.g2), (eminus, fminus), p_phi_fiber(TRIPLE, CTX.sample_points[3])
    )
    assert rel.related


def test_q_mult_fiber():
    rng = random.Random(4)
    gpps = [CTX.sample_points[0]] + [rng.choice(CTX.sample_points) for _ in range(5)]
    for gpp in gpps:
        gp = rng.choice(CTX.sample_points)
        q = q_mult_fiber(TRIPLE, gp, gpp)
        assert q.kernel() == q_mult_kernel_expected(TRIPLE, gpp)
        assert q.range_().dim == 6
    # unit fiber kernel is the plain anti-diagonal of g1
    q0 = q_mult_fiber(TRIPLE, CTX.sample_points[1], CTX.sample_points[0])
    expect = ExactSubspace.span(
        [concat_vec(xi, tuple(-x for x in xi)) for xi in TRIPLE.g1.basis],
        ambient_dim=12,
    )
    assert q0.kernel() == expect
    rel = related_splitting(
        (product_subspace(TRIPLE.g1, TRIPLE.g1), product_subspace(TRIPLE.g2, TRIPLE.g2)),
        (TRIPLE.g1, TRIPLE.g2),
        q_mult_fiber(TRIPLE, CTX.sample_points[1], CTX.sample_points[2]),
    )
    assert rel.related


def test_section52_relatedness_table():
    from courantlab.lagrel import pair_groupoid_relation

    eplus, fplus, eminus, fminus = product_splittings(TRIPLE)
    big = pair_groupoid_relation(TRIPLE.d_algebra)
    cases = [
        ((eminus, eminus), (fminus, fminus), (eminus, fminus), True),
        ((eplus, fplus), (fplus, eplus), (eminus, fminus), True),
        ((eplus, fminus), (fplus, eminus), (eplus, fplus), True),
        ((eminus, eplus), (fminus, fplus), (eplus, fplus), True),
        ((eplus, eplus), (fplus, fplus), (eplus, fplus), False),
    ]
    for (ea, eb), (fa, fb), tgt, expect in cases:
        rep = related_splitting(
            (product_subspace(ea, eb), product_subspace(fa, fb)), tgt, big
        )
        assert rep.related == expect
        if not expect:
            assert "kernel_not_split" in rep.reasons


def test_t_psi_fibers():
    eplus, fplus, eminus, fminus = product_splittings(TRIPLE)
    for sub in (TRIPLE.g1, TRIPLE.g2, twisted_diagonal_complement()):
        t_rel = t_psi_fiber(TRIPLE, sub)
        assert related_splitting((eplus, fplus), (TRIPLE.g1, TRIPLE.g2), t_rel).related
        assert related_splitting((eminus, fminus), (TRIPLE.g1, TRIPLE.g2), t_rel).related
    # graph of a nontrivial inner automorphism breaks the splitting condition
    adg = adjoint_matrix(CTX, matrix([[1, 1], [0, 1]]))
    gtheta = ExactSubspace.span(
        [concat_vec(v, mat_vec(adg, v)) for v in identity(3)], ambient_dim=6
    )
    assert is_lagrangian(TRIPLE.d_algebra, gtheta)
    assert is_subalgebra(TRIPLE.d_algebra, gtheta)
    rep = related_splitting(
        (eplus, fplus), (TRIPLE.g1, TRIPLE.g2), t_psi_fiber(TRIPLE, gtheta)
    )
    assert not rep.related and "kernel_not_split" in rep.reasons


def test_s_phi_morphism():
    for (g, m) in [
        (PAIR.sample_points[1], PAIR.sample_points[4]),
        (PAIR.sample_points[2], PAIR.sample_points[6]),
    ]:
        assert action_morphism_check(PAIR, g, m)
    s = s_phi_fiber(PAIR)
    eplus, fplus, eminus, fminus = product_splittings(TRIPLE)
    rep1 = related_splitting(
        (product_subspace(eplus, TRIPLE.g2), product_subspace(fplus, TRIPLE.g1)),
        (TRIPLE.g1, TRIPLE.g2), s,
    )
    rep2 = related_splitting(
        (product_subspace(eminus, TRIPLE.g1), product_subspace(fminus, TRIPLE.g2)),
        (TRIPLE.g1, TRIPLE.g2), s,
    )
    assert rep1.related and rep2.related


def test_g1_poisson_structure():
    pi_e = g1_poisson_bivector(TRIPLE, CTX.sample_points[0])
    assert all(x == 0 for row in pi_e.matrix for x in row)
    for g in CTX.sample_points[1:6]:
        pig = g1_poisson_bivector(TRIPLE, g)
        _, pim = pi_plus_minus(TRIPLE, TRIPLE.embed(g))
        ok, r = relatedness_check(
            np_matrix(TRIPLE.inclusion), np_matrix(pig.matrix), np_matrix(pim.matrix),
            tol=1e-9,
        )
        assert ok, r
    # the G1 bivector field is Poisson: FD Jacobi defect is tiny
    fld = g1_bivector_field(TRIPLE, CTX.sample_points[2])
    tri = schouten_fd(fld, np.zeros(3))
    assert tri.max_abs() < 1e-6


def test_main_identity_sl2_cases():
    d = build_double(CTX.algebra)
    gd = diagonal_subspace(CTX.algebra, 1)
    gad = diagonal_subspace(CTX.algebra, -1)
    tri = triangular_complement()
    charts = [double_chart_at(CTX, g, gd, tri) for g in CTX.sample_points[:6]]
    assert verify_main_identity(charts, gd, tri, d, tol=1e-6).passed
    charts_q = [double_chart_at(CTX, g, gd, gad) for g in CTX.sample_points[:6]]
    assert verify_main_identity(charts_q, gd, gad, d, tol=1e-6).passed


def test_sl2c_context_and_nonzero_defect():
    ctx = sl2c_realified_context()
    d = build_double(ctx.algebra)
    gd = diagonal_subspace(ctx.algebra, 1)
    lc = sl2c_triangular_complement()
    assert validate_manin_triple(ManinTriple(d, gd, lc)).passed
    from courantlab.suites import _sheared_quasi_splitting

    _, d2, e, f = _sheared_quasi_splitting()
    pt = double_action_anchor(ctx, ctx.sample_points[7])
    rhs = main_identity_rhs(d2, e, f, pt.exact_anchor())
    assert rhs.max_abs() > 0.1
    chart = double_chart_at(ctx, ctx.sample_points[7], e, f)
    lhs = 0.5 * schouten_fd(chart.field, np.zeros(6)).values
    correct = float(np.max(np.abs(lhs - rhs.values)))
    flipped = float(np.max(np.abs(lhs + rhs.values)))
    assert correct <= 1e-6 * (1.0 + rhs.max_abs())
    assert flipped > 1000 * correct


def test_abelian_triple_suite_pieces():
    t = abelian2_triple()
    for g in t.g1_ctx.sample_points[:4]:
        right, left = dressing_anchor(t, g)
        assert check_coisotropic_stabilizer(right)[0]
        pig = g1_poisson_bivector(t, g)
        assert all(x == 0 for row in pig.matrix for x in row)
    d = t.d_ctx.sample_points[1]
    pip, pim = pi_plus_minus(t, d)
    assert all(x == 0 for row in pim.matrix for x in row)


def test_poisson_lie_suite_runs():
    recs = liegrp.poisson_lie_suite(TRIPLE, samples=4, tol=1e-6)
    assert all(r["status"] == "pass" for r in recs)
    assert len(recs) == 5
    # abelian triple: all bivector phases are trivial but still checked
    recs_ab = liegrp.poisson_lie_suite(abelian2_triple(), samples=4, tol=1e-9)
    assert all(r["status"] == "pass" for r in recs_ab)


def test_poisson_lie_suite_fail_fast():
    from dataclasses import replace

    from courantlab.quadlie import QuadraticLieAlgebra

    bad_alg = QuadraticLieAlgebra.from_triples(
        6,
        [(i, j, k, v) for (i, j, row) in TRIPLE.d_algebra.bracket
         for k, v in enumerate(row) if v != 0],
        [[(9 if (i == j == 1) else x) for j, x in enumerate(row)]
         for i, row in enumerate(TRIPLE.d_algebra.form.matrix)],
    )
    bad_ctx = replace(TRIPLE.d_ctx, algebra=bad_alg)
    bad_triple = replace(TRIPLE, d_ctx=bad_ctx)
    recs = liegrp.poisson_lie_suite(bad_triple, samples=2)
    assert recs[0]["status"] == "fail"
    assert len(recs) == 1  # numeric phases never ran


def test_related_splitting_transports_reduced_bivector():
    # through the groupoid relation, the reduced isomorphism carries the
    # reduced splitting bivector onto the reduced splitting bivector
    from courantlab.lagrel import (
        from_algebra,
        pair_groupoid_relation,
        reduce_bivector,
        reduced_iso,
        splitting_bivector,
    )

    eplus, fplus, eminus, fminus = product_splittings(TRIPLE)
    big = pair_groupoid_relation(TRIPLE.d_algebra)
    e = product_subspace(eminus, eminus)
    f = product_subspace(fminus, fminus)
    rep = related_splitting((e, f), (eminus, fminus), big)
    assert rep.related
    pi_src = splitting_bivector(big.source, e, f)
    pi_tgt = splitting_bivector(big.target, eminus, fminus)
    red_src = reduce_bivector(big.source, pi_src, big.transpose().range_(), e, f)
    red_tgt = reduce_bivector(big.target, pi_tgt, big.range_(), eminus, fminus)
    iso = reduced_iso(big)
    m = iso.matrix
    carried = tuple(
        tuple(
            sum(
                m[u][a] * red_src.bivector.matrix[a][b] * m[v][b]
                for a in range(iso.dim)
                for b in range(iso.dim)
            )
            for v in range(iso.dim)
        )
        for u in range(iso.dim)
    )
    assert carried == red_tgt.bivector.matrix


def test_dmult_linear_in_left_trivialization():
    # the product chart map is linear, so the FD Jacobian is essentially exact
    dm = dmult_fd(PAIR, PAIR.sample_points[1], PAIR.sample_points[3])
    adj = adjoint_matrix(PAIR, amb_inv(PAIR.sample_points[3]))
    expect = np.hstack([np_matrix(adj), np.eye(6)])
    assert np.max(np.abs(dm - expect)) < 1e-9
