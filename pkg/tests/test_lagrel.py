import random
from fractions import Fraction as F

import pytest

from courantlab.contexts import sl2_algebra
from courantlab.exactlin import (
    BilinearForm,
    ExactSubspace,
    add_vec,
    concat_vec,
    identity,
    mat_vec,
    matrix,
    quotient_coords,
    sub_vec,
    transpose,
    vector,
    zero_vector,
)
from courantlab.lagrel import (
    Bivector,
    LinearRelation,
    NotLagrangianError,
    ReductionError,
    SplitSpace,
    TransversalityError,
    backward_image,
    backward_image_subspace,
    dual_basis,
    forward_image,
    from_algebra,
    hyperbolic_space,
    pair_groupoid_relation,
    product_subspace,
    reduce_bivector,
    reduced_iso,
    related_lagrangian,
    related_splitting,
    splitting_bivector,
)
from courantlab.quadlie import build_double, courant_form, diagonal_subspace
from courantlab.randgen import (
    random_lagrangian_subspace,
    random_relation,
    random_split_transform,
)

SP2 = SplitSpace(2, BilinearForm(matrix([[0, 1], [1, 0]])))
E2 = ExactSubspace.span([(1, 0)])
F2 = ExactSubspace.span([(0, 1)])


def test_split_space_rejects_nonsplit():
    with pytest.raises(ValueError):
        SplitSpace(2, BilinearForm(matrix([[1, 0], [0, 1]])))
    with pytest.raises(ValueError):
        SplitSpace(3, BilinearForm(matrix([[0, 0, 1], [0, 2, 0], [1, 0, 0]])))


def test_splitting_bivector_dim2():
    pi = splitting_bivector(SP2, E2, F2)
    assert pi.matrix == matrix([[0, "1/2"], ["-1/2", 0]])
    assert splitting_bivector(SP2, F2, E2).matrix == matrix([[0, "-1/2"], ["1/2", 0]])
    # contraction identity iota(w)Pi = (pr_F - pr_E)(w) / 2
    assert pi.contract((1, 0), SP2.form) == (F(-1, 2), F(0))
    assert pi.contract((0, 1), SP2.form) == (F(0), F(1, 2))


def test_splitting_bivector_rejects_bad_input():
    with pytest.raises(NotLagrangianError):
        splitting_bivector(SP2, E2, E2)
    full = ExactSubspace.full(2)
    with pytest.raises(NotLagrangianError):
        splitting_bivector(SP2, full, F2)


def test_identity_relation():
    r = LinearRelation.identity_relation(SP2)
    assert r.kernel().dim == 0
    assert r.range_() == ExactSubspace.full(2)
    assert (r * r).graph == r.graph
    img, alpha = backward_image(E2, r)
    assert img == E2 and alpha == E2.basis


def test_product_relation_kernel_range():
    # R = L' x L has kernel L and range L'
    rows = [concat_vec((F(1), F(0)), zero_vector(2)),
            concat_vec(zero_vector(2), (F(0), F(1)))]
    r = LinearRelation.from_rows(SP2, SP2, rows)
    assert r.kernel() == F2
    assert r.range_() == E2


def test_graph_of_form_preserving_map():
    g = matrix([[2, 0], [0, "1/2"]])
    r = LinearRelation.graph_of_map(SP2, SP2, g)
    img, alpha = backward_image(E2, r)
    assert img == E2  # span(g^-1 e1) = span(e1) here
    assert alpha == ((F(2), F(0)),)
    fwd, _ = forward_image(E2, r)
    assert fwd == E2


def test_pair_groupoid_relation_dims():
    from courantlab.contexts import abelian_algebra_line

    r = pair_groupoid_relation(sl2_algebra())
    assert 2 * r.graph.dim == r.source.dim + r.target.dim
    assert r.kernel().dim == 3
    assert r.range_() == ExactSubspace.full(6)
    tiny = pair_groupoid_relation(abelian_algebra_line())
    assert tiny.kernel().dim == 1
    assert tiny.kernel().basis == ((F(0), F(1), F(1), F(0)),)


def test_transpose_compose_reduced_identity():
    rng = random.Random(2)
    for _ in range(10):
        r = random_relation(rng, rng.randint(1, 3), rng.randint(1, 3))
        t = r.transpose() * r
        iso = reduced_iso(t)
        assert iso.matrix == identity(iso.dim) if iso.dim else iso.matrix == ()
        # and the quotients are ran(R^t)/ker(R) on both sides
        assert t.kernel() == r.kernel()
        assert t.range_() == r.transpose().range_()


def test_isom_lemma_identities_random():
    rng = random.Random(5)
    for _ in range(30):
        r = random_relation(rng, rng.randint(1, 4), rng.randint(1, 4))
        rt = r.transpose()
        assert r.kernel() == r.source.form.orth_complement(rt.range_())
        assert r.range_() == r.target.form.orth_complement(rt.kernel())
        assert r.kernel().dim + r.range_().dim == r.graph.dim
        iso = reduced_iso(r)
        assert iso.dim == rt.range_().dim - r.kernel().dim


def test_composition_lagrangian_random():
    rng = random.Random(8)
    for _ in range(20):
        k0, k1, k2 = (rng.randint(1, 3) for _ in range(3))
        r = random_relation(rng, k0, k1)
        s = random_relation(rng, k1, k2)
        sr = s * r
        assert 2 * sr.graph.dim == sr.source.dim + sr.target.dim


def test_backward_image_transversality_error():
    # relation with co-kernel meeting the subspace: L' x L
    rows = [concat_vec((F(1), F(0)), zero_vector(2)),
            concat_vec(zero_vector(2), (F(0), F(1)))]
    r = LinearRelation.from_rows(SP2, SP2, rows)
    with pytest.raises(TransversalityError) as exc:
        backward_image(E2, r)
    assert exc.value.witness == (F(1), F(0))
    # the subspace-level image is still defined and Lagrangian
    img = backward_image_subspace(E2, r)
    assert r.source.is_lagrangian(img)


def test_courant_tensor_pullback_through_morphism():
    # backward image through the groupoid-multiplication subalgebra
    # relation: the tensor of the image is the pulled-back tensor
    sl2 = sl2_algebra()
    d = build_double(sl2)
    r = pair_groupoid_relation(sl2)
    eprime = diagonal_subspace(sl2, -1)  # the anti-diagonal inside d
    img, alpha = backward_image(eprime, r)
    # source of r is the direct product algebra d (+) d (componentwise)
    triples = []
    for (i, j, row) in d.bracket:
        for k, val in enumerate(row):
            if val != 0:
                triples.append((i, j, k, val))
                triples.append((i + 6, j + 6, k + 6, val))
    form = d.form.direct_sum(d.form)
    from courantlab.quadlie import QuadraticLieAlgebra

    prod_alg = QuadraticLieAlgebra.from_triples(12, triples, form.matrix)
    for a in range(img.dim):
        for b in range(a + 1, img.dim):
            for c in range(b + 1, img.dim):
                lhs = courant_form(prod_alg, img.basis[a], img.basis[b], img.basis[c])
                rhs = courant_form(d, alpha[a], alpha[b], alpha[c])
                assert lhs == rhs


def test_reduce_bivector_dim4():
    sp4 = hyperbolic_space(2)
    e = ExactSubspace.span([(1, 0, 0, 0), (0, 1, 0, 0)])
    f = ExactSubspace.span([(0, 0, 1, 0), (0, 0, 0, 1)])
    pi = splitting_bivector(sp4, e, f)
    w1 = ExactSubspace.span([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1)])
    red = reduce_bivector(sp4, pi, w1, e, f)
    assert red.bivector.matrix == matrix([[0, "1/2"], ["-1/2", 0]])
    assert red.e_red.dim == 1 and red.f_red.dim == 1
    # trivial reduction: W1 = W
    full = ExactSubspace.full(4)
    red2 = reduce_bivector(sp4, pi, full, e, f)
    assert red2.bivector.matrix == pi.matrix


def test_reduce_bivector_witness():
    sp4 = hyperbolic_space(2)
    e = ExactSubspace.span([(1, 0, 0, 0), (0, 1, 0, 0)])
    f = ExactSubspace.span([(0, 0, 1, 0), (0, 0, 0, 1)])
    pi = splitting_bivector(sp4, e, f)
    w0 = ExactSubspace.span([(1, 0, 0, 1)])  # isotropic, outside E and F
    w1 = sp4.form.orth_complement(w0)
    with pytest.raises(ReductionError) as exc:
        reduce_bivector(sp4, pi, w1, e, f)
    assert exc.value.witness == (F(1), F(0), F(0), F(1))


def test_related_splitting_identity():
    r = LinearRelation.identity_relation(SP2)
    rep = related_splitting((E2, F2), (E2, F2), r)
    assert rep.related and rep.reasons == ()
    swapped = related_splitting((E2, F2), (F2, E2), r)
    assert not swapped.related
    assert "e_not_related" in swapped.reasons


def test_reduced_pi_transported_by_related_splittings():
    # relatedness carries the reduced bivector onto the reduced bivector
    rng = random.Random(13)
    for _ in range(6):
        k = 2
        g = random_split_transform(rng, k)
        sp = hyperbolic_space(k)
        cols = transpose(g)
        e = ExactSubspace.span(cols[:k], ambient_dim=2 * k)
        f = ExactSubspace.span(cols[k:], ambient_dim=2 * k)
        r = LinearRelation.graph_of_map(sp, sp, g)
        e0 = ExactSubspace.span(identity(2 * k)[:k], ambient_dim=2 * k)
        f0 = ExactSubspace.span(identity(2 * k)[k:], ambient_dim=2 * k)
        rep = related_splitting((e0, f0), (e, f), r)
        assert rep.related
        pi0 = splitting_bivector(sp, e0, f0)
        pi1 = splitting_bivector(sp, e, f)
        # ker = 0 and ran = all, so the reduced map is g: g Pi g^T = Pi'
        lhs = tuple(
            tuple(
                sum(
                    g[u][a] * pi0.matrix[a][b] * g[v][b]
                    for a in range(2 * k)
                    for b in range(2 * k)
                )
                for v in range(2 * k)
            )
            for u in range(2 * k)
        )
        assert lhs == pi1.matrix


def _t_relation(space, c_perp_vec):
    c_perp = ExactSubspace.span([c_perp_vec], ambient_dim=space.dim)
    c = space.form.orth_complement(c_perp)
    q = quotient_coords(c, c_perp)
    rows = [concat_vec(v, v) for v in q.complement]
    for z in c_perp.basis:
        rows.append(concat_vec(z, zero_vector(space.dim)))
        rows.append(concat_vec(zero_vector(space.dim), z))
    return LinearRelation.from_rows(space, space, rows)


def test_relatedness_does_not_compose():
    # E ~ E through R and through S, yet not through S o R
    space = hyperbolic_space(2)
    gtw1 = matrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, "-1/2", 1, 0], ["1/2", 0, 0, 1]])
    gtw2 = matrix([[0, "-1/3", 0, 0], ["1/2", 1, 0, 0], [0, 0, 6, -3], [0, 0, 2, 0]])
    r = LinearRelation.graph_of_map(space, space, gtw1) * _t_relation(space, (1, 0, 0, 0))
    s = LinearRelation.graph_of_map(space, space, gtw2) * _t_relation(space, (0, 1, 0, 0))
    e = ExactSubspace.span([(1, 0, 0, "-1/8"), (0, 1, "1/8", 0)])
    assert related_lagrangian(e, e, r)
    assert related_lagrangian(e, e, s)
    assert not related_lagrangian(e, e, s * r)


def test_relation_json():
    r = LinearRelation.identity_relation(SP2)
    data = r.to_json()
    assert data["source_dim"] == 2 and data["target_dim"] == 2
    assert len(data["graph_basis"]) == 2
