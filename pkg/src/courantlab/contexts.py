"""Shipped algebra and group data: sl2 with its Killing form, the
double sl2 (+) sl2-bar with the diagonal/triangular Manin triple over
SL2 x SL2, and a split abelian rank-2 triple over a diagonal matrix
group.  All sample points are rational, so adjoint matrices and
relation fibers stay exact."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .exactlin import ExactSubspace, Matrix, det, matrix
from .liegrp import GroupContext, TripleContext, amb, amb_mul, block_diag
from .quadlie import QuadraticLieAlgebra, build_double, diagonal_subspace

F = Fraction

SL2_E = ((F(0), F(1)), (F(0), F(0)))
SL2_H = ((F(1), F(0)), (F(0), F(-1)))
SL2_F = ((F(0), F(0)), (F(1), F(0)))


def sl2_algebra() -> QuadraticLieAlgebra:
    """sl2 in the basis (e, h, f) with its Killing form."""
    return QuadraticLieAlgebra.from_triples(
        3,
        [(0, 1, 0, -2), (0, 2, 1, 1), (1, 2, 2, -2)],
        [[0, 0, 4], [0, 8, 0], [4, 0, 0]],
        basis_names=("e", "h", "f"),
    )


def abelian_algebra_split2() -> QuadraticLieAlgebra:
    return QuadraticLieAlgebra.from_triples(
        2, [], [[0, 1], [1, 0]], basis_names=("a1", "a2")
    )


def abelian_algebra_line() -> QuadraticLieAlgebra:
    return QuadraticLieAlgebra.from_triples(1, [], [[1]], basis_names=("a",))


def _is_sl(g: Matrix) -> bool:
    return det(g) == 1


def sl2_samples() -> tuple[Matrix, ...]:
    up = amb([[1, 1], [0, 1]])
    up_half = amb([[1, F(1, 2)], [0, 1]])
    lo = amb([[1, 0], [1, 1]])
    lo_half = amb([[1, 0], [F(1, 2), 1]])
    dg = amb([[2, 0], [0, F(1, 2)]])
    eye = amb([[1, 0], [0, 1]])
    return (
        eye,
        up,
        lo,
        up_half,
        lo_half,
        dg,
        amb_mul(up, lo),
        amb_mul(lo, up_half),
        amb_mul(up_half, dg),
        amb_mul(dg, lo_half),
        amb_mul(amb_mul(up, lo), dg),
        amb([[1, -1], [0, 1]]),
    )


@lru_cache(maxsize=None)
def sl2_context() -> GroupContext:
    return GroupContext(
        name="sl2",
        ambient_size=2,
        algebra_basis=(amb(SL2_E), amb(SL2_H), amb(SL2_F)),
        algebra=sl2_algebra(),
        sample_points=sl2_samples(),
        membership=_is_sl,
    )


def _is_block_sl2(g: Matrix) -> bool:
    for i in range(4):
        for j in range(4):
            if (i < 2) != (j < 2) and g[i][j] != 0:
                return False
    a = tuple(tuple(g[i][j] for j in range(2)) for i in range(2))
    b = tuple(tuple(g[i][j] for j in range(2, 4)) for i in range(2, 4))
    return det(a) == 1 and det(b) == 1


def _pair(a: Matrix, b: Matrix) -> Matrix:
    return block_diag(a, b)


@lru_cache(maxsize=None)
def sl2_pair_context() -> GroupContext:
    """SL2 x SL2 as 4x4 block diagonals; algebra sl2 (+) sl2-bar."""
    base = (amb(SL2_E), amb(SL2_H), amb(SL2_F))
    zero2 = amb([[0, 0], [0, 0]])
    basis = tuple(_pair(x, zero2) for x in base) + tuple(
        _pair(zero2, x) for x in base
    )
    s = sl2_samples()
    samples = (
        _pair(s[0], s[0]),
        _pair(s[1], s[2]),
        _pair(s[5], s[1]),
        _pair(s[3], s[4]),
        _pair(s[6], s[5]),
        _pair(s[2], s[3]),
        _pair(s[4], s[6]),
        _pair(s[7], s[0]),
        _pair(s[0], s[8]),
        _pair(s[9], s[2]),
        _pair(s[1], s[1]),
        _pair(s[10], s[4]),
    )
    return GroupContext(
        name="sl2-pair",
        ambient_size=4,
        algebra_basis=basis,
        algebra=build_double(sl2_algebra()),
        sample_points=samples,
        membership=_is_block_sl2,
    )


def triangular_complement() -> ExactSubspace:
    """h_{-diag} + (lower (+) upper) inside sl2 (+) sl2-bar."""
    return ExactSubspace.span(
        [
            (0, 1, 0, 0, -1, 0),  # (h, -h)
            (0, 0, 1, 0, 0, 0),   # (f, 0)
            (0, 0, 0, 1, 0, 0),   # (0, e)
        ],
        ambient_dim=6,
    )


def twisted_diagonal_complement() -> ExactSubspace:
    """h_diag + (lower (+) upper): a third Lagrangian subalgebra."""
    return ExactSubspace.span(
        [
            (0, 1, 0, 0, 1, 0),
            (0, 0, 1, 0, 0, 0),
            (0, 0, 0, 1, 0, 0),
        ],
        ambient_dim=6,
    )


@lru_cache(maxsize=None)
def sl2_triangular_triple() -> TripleContext:
    """(sl2 (+) sl2-bar, diagonal, triangular) over D = SL2 x SL2.

    G1 is SL2 embedded diagonally; the inclusion of its algebra sends
    x to (x, x)."""
    d_alg = build_double(sl2_algebra())
    inclusion = matrix(
        [
            (1, 0, 0),
            (0, 1, 0),
            (0, 0, 1),
            (1, 0, 0),
            (0, 1, 0),
            (0, 0, 1),
        ]
    )
    return TripleContext(
        name="sl2-triangular-triple",
        d_ctx=sl2_pair_context(),
        g1=diagonal_subspace(sl2_algebra(), sign=1),
        g2=triangular_complement(),
        g1_ctx=sl2_context(),
        embed=lambda g: _pair(g, g),
        inclusion=inclusion,
    )


def _is_pos_diag(g: Matrix) -> bool:
    return g[0][1] == 0 and g[1][0] == 0 and g[0][0] > 0 and g[1][1] > 0


def _is_pos_diag_unit_second(g: Matrix) -> bool:
    return _is_pos_diag(g) and g[1][1] == 1


@lru_cache(maxsize=None)
def abelian2_group_context() -> GroupContext:
    """Positive diagonal 2x2 matrices: the group of the split abelian d."""
    basis = (amb([[1, 0], [0, 0]]), amb([[0, 0], [0, 1]]))
    samples = (
        amb([[1, 0], [0, 1]]),
        amb([[2, 0], [0, 1]]),
        amb([[1, 0], [0, 3]]),
        amb([[F(1, 2), 0], [0, 2]]),
        amb([[3, 0], [0, F(1, 3)]]),
        amb([[2, 0], [0, F(1, 2)]]),
        amb([[F(2, 3), 0], [0, 1]]),
        amb([[1, 0], [0, F(3, 2)]]),
        amb([[4, 0], [0, 1]]),
        amb([[F(1, 4), 0], [0, F(1, 2)]]),
    )
    return GroupContext(
        name="abelian-2",
        ambient_size=2,
        algebra_basis=basis,
        algebra=abelian_algebra_split2(),
        sample_points=samples,
        membership=_is_pos_diag,
    )


@lru_cache(maxsize=None)
def abelian2_triple() -> TripleContext:
    """Split abelian Q^2 with the coordinate-line Manin triple."""
    g1_basis = (amb([[1, 0], [0, 0]]),)
    g1_samples = (
        amb([[1, 0], [0, 1]]),
        amb([[2, 0], [0, 1]]),
        amb([[F(1, 2), 0], [0, 1]]),
        amb([[3, 0], [0, 1]]),
        amb([[F(2, 3), 0], [0, 1]]),
        amb([[4, 0], [0, 1]]),
        amb([[F(1, 4), 0], [0, 1]]),
        amb([[F(3, 2), 0], [0, 1]]),
        amb([[5, 0], [0, 1]]),
        amb([[F(1, 5), 0], [0, 1]]),
    )
    g1_ctx = GroupContext(
        name="abelian-2-line",
        ambient_size=2,
        algebra_basis=g1_basis,
        algebra=QuadraticLieAlgebra.from_triples(1, [], [[1]], basis_names=("a1",)),
        sample_points=g1_samples,
        membership=_is_pos_diag_unit_second,
    )
    return TripleContext(
        name="abelian-2",
        d_ctx=abelian2_group_context(),
        g1=ExactSubspace.span([(1, 0)]),
        g2=ExactSubspace.span([(0, 1)]),
        g1_ctx=g1_ctx,
        embed=lambda g: g,
        inclusion=matrix([(1,), (0,)]),
    )


def _realify(z_rows) -> Matrix:
    """Complex k x k matrix (entries (re, im)) as a real 2k x 2k matrix."""
    k = len(z_rows)
    out = [[F(0)] * (2 * k) for _ in range(2 * k)]
    for i in range(k):
        for j in range(k):
            re, im = z_rows[i][j]
            re, im = F(re), F(im)
            out[2 * i][2 * j] = re
            out[2 * i][2 * j + 1] = -im
            out[2 * i + 1][2 * j] = im
            out[2 * i + 1][2 * j + 1] = re
    return tuple(tuple(r) for r in out)


def _complex_det_is_one(g: Matrix) -> bool:
    j_mat = _realify([[(0, 1), (0, 0)], [(0, 0), (0, 1)]])
    if amb_mul(g, j_mat) != amb_mul(j_mat, g):
        return False
    z = {}
    for i in range(2):
        for jj in range(2):
            z[(i, jj)] = (g[2 * i][2 * jj], g[2 * i + 1][2 * jj])
    (a, b), (c, d) = z[(0, 0)], z[(0, 1)]
    (e_, f_), (gg, hh) = z[(1, 0)], z[(1, 1)]
    det_re = a * gg - b * hh - (c * e_ - d * f_)
    det_im = a * hh + b * gg - (c * f_ + d * e_)
    return det_re == 1 and det_im == 0


@lru_cache(maxsize=None)
def sl2c_realified_context() -> GroupContext:
    """sl2 over the complex numbers, realified to a 6-dim simple real
    algebra with the real part of the trace form (signature (3, 3)).

    Unlike 3-dimensional factors, the doubled two-sided action here has
    anchors of rank 4 on the diagonal, so the structure trivector
    pushes to a nonzero chart trivector at generic points."""
    cz = (0, 0)
    co = (1, 0)
    ci = (0, 1)
    e_c = [[cz, co], [cz, cz]]
    h_c = [[co, cz], [cz, (-1, 0)]]
    f_c = [[cz, cz], [co, cz]]
    ie_c = [[cz, ci], [cz, cz]]
    ih_c = [[ci, cz], [cz, (0, -1)]]
    if_c = [[cz, cz], [ci, cz]]
    basis = tuple(_realify(m) for m in (e_c, h_c, f_c, ie_c, ih_c, if_c))
    # brackets of (e,h,f,ie,ih,if); [x, iy] = i[x,y], [ix, iy] = -[x,y]
    triples = [
        (0, 1, 0, -2), (0, 2, 1, 1), (1, 2, 2, -2),
        (0, 4, 3, -2), (0, 5, 4, 1), (1, 3, 3, 2),
        (1, 5, 5, -2), (2, 3, 4, -1), (2, 4, 5, 2),
        (3, 4, 0, 2), (3, 5, 1, -1), (4, 5, 2, 2),
    ]
    tform = [[0, 0, 1], [0, 2, 0], [1, 0, 0]]
    form = [
        [tform[i][j] if (i < 3 and j < 3) else
         (-tform[i - 3][j - 3] if (i >= 3 and j >= 3) else 0)
         for j in range(6)]
        for i in range(6)
    ]
    alg = QuadraticLieAlgebra.from_triples(
        6, triples, form, basis_names=("e", "h", "f", "ie", "ih", "if")
    )
    half = F(1, 2)
    samples = (
        _realify([[co, cz], [cz, co]]),
        _realify([[co, co], [cz, co]]),
        _realify([[co, ci], [cz, co]]),
        _realify([[co, cz], [ci, co]]),
        _realify([[co, (1, 1)], [cz, co]]),
        _realify([[(2, 0), cz], [cz, (half, 0)]]),
        _realify([[(1, 1), (0, 0)], [(0, 0), (half, -half)]]),
        _realify([[(1, 0), (1, 0)], [(1, 0), (2, 0)]]),
        _realify([[(1, 0), (0, -1)], [(0, 1), (2, 0)]]),
        _realify([[(2, 0), (1, 1)], [(0, 0), (half, 0)]]),
    )
    return GroupContext(
        name="sl2c-real",
        ambient_size=4,
        algebra_basis=basis,
        algebra=alg,
        sample_points=samples,
        membership=_complex_det_is_one,
    )


def sl2c_triangular_complement() -> ExactSubspace:
    """Complex-Cartan anti-diagonal plus the two complex nilpotent wings,
    inside the double of the realified algebra (ambient dim 12)."""
    rows = []
    n = 6
    for idx in (1, 4):  # h, ih
        v = [0] * (2 * n)
        v[idx] = 1
        v[n + idx] = -1
        rows.append(tuple(v))
    for idx in (2, 5):  # f, if on the left
        v = [0] * (2 * n)
        v[idx] = 1
        rows.append(tuple(v))
    for idx in (0, 3):  # e, ie on the right
        v = [0] * (2 * n)
        v[n + idx] = 1
        rows.append(tuple(v))
    return ExactSubspace.span(rows, ambient_dim=12)


GROUP_CONTEXT_NAMES = ("sl2-double", "sl2-pair", "abelian-2", "sl2c-real")
TRIPLE_CONTEXT_NAMES = ("sl2-triangular-triple", "abelian-2")


def get_group_context(name: str) -> GroupContext:
    if name == "sl2-double":
        return sl2_context()
    if name == "sl2-pair":
        return sl2_pair_context()
    if name == "abelian-2":
        return abelian2_group_context()
    if name == "sl2c-real":
        return sl2c_realified_context()
    raise KeyError(f"unknown context {name!r}")


def get_triple_context(name: str) -> TripleContext:
    if name == "sl2-triangular-triple":
        return sl2_triangular_triple()
    if name == "abelian-2":
        return abelian2_triple()
    raise KeyError(f"unknown triple context {name!r}")
