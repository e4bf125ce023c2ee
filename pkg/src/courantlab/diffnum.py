"""Floating-point chart calculus: finite-difference Schouten brackets,
trivector pushforwards, the main splitting identity, vector-field
bracket tests, and bivector relatedness under chart maps.

Conventions: a bivector field is sampled as its antisymmetric component
matrix P with pi = sum_{u<v} P[u,v] d_u ^ d_v, and a trivector is a
fully antisymmetric 3-index array T with T[i,j,k] the coefficient
against d_i ^ d_j ^ d_k for i < j < k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .exactlin import Matrix
from .lagrel import dual_basis
from .quadlie import CourantTensor3, QuadraticLieAlgebra, courant_form

ANTISYM_TOL = 1e-12


@dataclass
class ChartBivectorField:
    """Pointwise sampler of an antisymmetric matrix over one chart."""

    chart_dim: int
    sampler: Callable[[np.ndarray], np.ndarray]
    step: float = 1e-4

    def __call__(self, point) -> np.ndarray:
        p = np.asarray(self.sampler(np.asarray(point, dtype=float)), dtype=float)
        if p.shape != (self.chart_dim, self.chart_dim):
            raise ValueError("sampler returned a wrong shape")
        if np.max(np.abs(p + p.T)) > ANTISYM_TOL * max(1.0, np.max(np.abs(p))):
            raise ValueError("sampler output is not antisymmetric")
        return p


@dataclass(frozen=True)
class Trivector:
    dim: int
    values: np.ndarray

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.dim else 0.0


def _empty_trivector(dim: int) -> np.ndarray:
    return np.zeros((dim, dim, dim))


def _set_antisym(T: np.ndarray, i: int, j: int, k: int, val: float) -> None:
    T[i, j, k] = val
    T[j, k, i] = val
    T[k, i, j] = val
    T[j, i, k] = -val
    T[i, k, j] = -val
    T[k, j, i] = -val


def schouten_fd(field: ChartBivectorField, point) -> Trivector:
    """Schouten bracket [pi, pi] by central differences, O(h^2).

    Components are twice the coordinate Jacobiator:
    T^ijk = 2 sum_l (P^il d_l P^jk + P^jl d_l P^ki + P^kl d_l P^ij).
    """
    d = field.chart_dim
    x = np.asarray(point, dtype=float)
    h = field.step
    P = field(x)
    dP = np.empty((d, d, d))
    for l in range(d):
        e = np.zeros(d)
        e[l] = h
        dP[l] = (field(x + e) - field(x - e)) / (2.0 * h)
    T = _empty_trivector(d)
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(j + 1, d):
                val = 0.0
                for l in range(d):
                    val += (
                        P[i, l] * dP[l, j, k]
                        + P[j, l] * dP[l, k, i]
                        + P[k, l] * dP[l, i, j]
                    )
                _set_antisym(T, i, j, k, 2.0 * val)
    return Trivector(d, T)


def wedge3(u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Component table of u ^ v ^ w: T[p,q,r] = det [[u_p,v_p,w_p],...]."""
    outer = np.einsum("p,q,r->pqr", u, v, w)
    return (
        outer
        + np.einsum("q,r,p->pqr", u, v, w)
        + np.einsum("r,p,q->pqr", u, v, w)
        - np.einsum("p,r,q->pqr", u, v, w)
        - np.einsum("q,p,r->pqr", u, v, w)
        - np.einsum("r,q,p->pqr", u, v, w)
    )


def push_trivector(
    anchor: np.ndarray,
    values: Sequence[tuple[tuple[int, int, int], object]] | CourantTensor3,
    wedge_vectors: Sequence,
) -> Trivector:
    """Push sum values[i<j<k] * w^i ^ w^j ^ w^k through the anchor matrix.

    ``wedge_vectors`` are the algebra vectors attached to the value table
    (the dual frame fixed by <e_i, f^j> = delta); each is mapped by the
    anchor before wedging.
    """
    a = np.asarray(anchor, dtype=float)
    m = a.shape[0]
    if isinstance(values, CourantTensor3):
        values = values.values
    pushed = [a @ np.asarray([float(x) for x in vec]) for vec in wedge_vectors]
    T = _empty_trivector(m)
    for (i, j, k), val in values:
        T += float(val) * wedge3(pushed[i], pushed[j], pushed[k])
    return Trivector(m, T)


@dataclass(frozen=True)
class PointCheck:
    label: str
    residual: float
    passed: bool


@dataclass(frozen=True)
class IdentityReport:
    checks: tuple[PointCheck, ...]
    h: float
    tol: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def to_json(self) -> dict:
        return {
            "h": self.h,
            "tol": self.tol,
            "pass": self.passed,
            "points": [
                {"label": c.label, "residual": c.residual, "pass": c.passed}
                for c in self.checks
            ],
        }


@dataclass
class ChartAtPoint:
    """One verification site: a bivector field in a local chart centered
    at the point, plus the exact anchor matrix there."""

    label: str
    field: ChartBivectorField
    anchor0: Matrix


def splitting_tensor_tables(alg: QuadraticLieAlgebra, e, f):
    """Value tables and wedge frames for both halves of a splitting.

    Returns ((values_E, wedge_E), (values_F, wedge_F)) where values_E is
    the tensor of E on its stored basis attached to the dual frame in F,
    and values_F is the tensor of F on that dual frame attached to E's
    basis.
    """
    duals = dual_basis(alg.form, e, f)

    def table(basis):
        vals = []
        r = len(basis)
        for i in range(r):
            for j in range(i + 1, r):
                for k in range(j + 1, r):
                    v = courant_form(alg, basis[i], basis[j], basis[k])
                    if v != 0:
                        vals.append(((i, j, k), v))
        return tuple(vals)

    return (table(e.basis), duals), (table(duals), e.basis)


def main_identity_rhs(alg: QuadraticLieAlgebra, e, f, anchor0) -> Trivector:
    """a(Y^E) + a(Y^F) for a Lagrangian splitting, pushed to the chart."""
    (vals_e, wedge_e), (vals_f, wedge_f) = splitting_tensor_tables(alg, e, f)
    a = np.asarray([[float(x) for x in row] for row in anchor0])
    t1 = push_trivector(a, vals_e, wedge_e)
    t2 = push_trivector(a, vals_f, wedge_f)
    return Trivector(t1.dim, t1.values + t2.values)


def verify_main_identity(
    charts: Iterable[ChartAtPoint],
    e,
    f,
    alg: QuadraticLieAlgebra,
    tol: float = 1e-6,
    h: float | None = None,
) -> IdentityReport:
    """Check (1/2)[pi, pi] = a(Y^E) + a(Y^F) at each chart point."""
    checks = []
    used_h = h
    for chart in charts:
        fld = chart.field
        if h is not None:
            fld = ChartBivectorField(fld.chart_dim, fld.sampler, step=h)
        used_h = fld.step
        lhs = 0.5 * schouten_fd(fld, np.zeros(fld.chart_dim)).values
        rhs = main_identity_rhs(alg, e, f, chart.anchor0).values
        residual = float(np.max(np.abs(lhs - rhs)))
        checks.append(PointCheck(chart.label, residual, residual <= tol))
    return IdentityReport(tuple(checks), used_h if used_h is not None else 1e-4, tol)


def vf_bracket_fd(
    v_sampler: Callable[[np.ndarray], np.ndarray],
    w_sampler: Callable[[np.ndarray], np.ndarray],
    point,
    h: float = 1e-4,
) -> np.ndarray:
    """[v, w] = Dw(v) - Dv(w) with central-difference Jacobians."""
    x = np.asarray(point, dtype=float)
    d = x.shape[0]
    v0 = np.asarray(v_sampler(x), dtype=float)
    w0 = np.asarray(w_sampler(x), dtype=float)
    jac_v = np.empty((d, d))
    jac_w = np.empty((d, d))
    for l in range(d):
        e = np.zeros(d)
        e[l] = h
        jac_v[:, l] = (np.asarray(v_sampler(x + e)) - np.asarray(v_sampler(x - e))) / (2 * h)
        jac_w[:, l] = (np.asarray(w_sampler(x + e)) - np.asarray(w_sampler(x - e))) / (2 * h)
    return jac_w @ v0 - jac_v @ w0


def action_axiom_check(
    rho: Callable[[int, np.ndarray], np.ndarray],
    alg: QuadraticLieAlgebra,
    points: Sequence,
    tol: float = 1e-6,
    h: float = 1e-4,
) -> IdentityReport:
    """[rho(b_i), rho(b_j)] = rho([b_i, b_j]) per basis pair and point."""
    checks = []
    n = alg.dim
    for p_idx, point in enumerate(points):
        x = np.asarray(point, dtype=float)
        worst = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                lhs = vf_bracket_fd(
                    lambda q, i=i: rho(i, q), lambda q, j=j: rho(j, q), x, h=h
                )
                coeffs = alg.bracket_basis(i, j)
                rhs = np.zeros_like(lhs)
                for k, c in enumerate(coeffs):
                    if c != 0:
                        rhs += float(c) * np.asarray(rho(k, x), dtype=float)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        checks.append(PointCheck(f"point{p_idx}", worst, worst <= tol))
    return IdentityReport(tuple(checks), h, tol)


def relatedness_check(
    dphi: np.ndarray,
    pi_source: np.ndarray,
    pi_target: np.ndarray,
    tol: float = 1e-6,
) -> tuple[bool, float]:
    """max-norm residual of dPhi pi dPhi^T - pi'."""
    dphi = np.asarray(dphi, dtype=float)
    resid = dphi @ np.asarray(pi_source, dtype=float) @ dphi.T - np.asarray(
        pi_target, dtype=float
    )
    r = float(np.max(np.abs(resid))) if resid.size else 0.0
    return r <= tol, r


def structure_tensor_np(alg: QuadraticLieAlgebra) -> np.ndarray:
    """c[i, j, :] = coordinates of [b_i, b_j]."""
    n = alg.dim
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            c[i, j] = [float(x) for x in alg.bracket_basis(i, j)]
    return c


def courant_bracket_jets_np(
    alg: QuadraticLieAlgebra,
    anchor: np.ndarray,
    x_value: np.ndarray,
    x_jac: np.ndarray,
    y_value: np.ndarray,
    y_jac: np.ndarray,
) -> np.ndarray:
    """Float twin of the exact jet bracket, for FD-sourced jacobians."""
    a = np.asarray(anchor, dtype=float)
    b_np = np.array([[float(x) for x in row] for row in alg.form.matrix])
    c = structure_tensor_np(alg)
    out = np.einsum("ijk,i,j->k", c, x_value, y_value)
    out = out + y_jac @ (a @ x_value) - x_jac @ (a @ y_value)
    pairing = x_jac.T @ (b_np @ y_value)
    astar = np.linalg.solve(b_np, a.T)
    return out + astar @ pairing
