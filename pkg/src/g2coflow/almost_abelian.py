"""Invariant geometry of g = R e7 (x|_A h with h abelian.

The bracket is [e7, v] = A v for v in h = span(e1..e6) and [h, h] = 0.
Invariant forms are constant forms on R^7; the Chevalley-Eilenberg
differential collapses to d a = eta ^ theta(A) a0 where a = a0 + a1 ^ eta
is the splitting along eta = e^7.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOmega, DimensionMismatch, FrameNotAdapted
from .multilinear import (
    KForm,
    basis_kform,
    contract,
    form_inner_product,
    hodge_star,
    kform,
    theta_action,
    wedge,
)
from .stable_forms import (
    SU3Structure,
    g2_from_phi,
    lift_form,
    restrict_form,
    standard_phi,
    su3_assemble,
)

__all__ = [
    "AlmostAbelianAlgebra",
    "split_eta",
    "differential",
    "coclosed_check",
    "su3_reduce",
    "codifferential",
    "laplacian",
    "adjoint_identity_check",
    "metric_adjoint",
    "adapt_frame",
    "g2_metric_7d",
]

_E7 = basis_kform(7, (7,))


@dataclass(frozen=True)
class AlmostAbelianAlgebra:
    """g = R e7 (x|_A h, encoded by A = ad_{e7}|_h in the fixed h-basis."""

    A: np.ndarray  # 6x6, column action

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.shape != (6, 6) or not np.all(np.isfinite(A)):
            raise DimensionMismatch("A must be a finite 6x6 matrix")
        object.__setattr__(self, "A", A)

    def bracket(self, x, y):
        """Lie bracket of 7-vectors: [x, y] = x7 A y_h - y7 A x_h."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(7)
        out[:6] = x[6] * self.A @ y[:6] - y[6] * self.A @ x[:6]
        return out

    @property
    def is_nilpotent(self):
        P = np.linalg.matrix_power(self.A, 6)
        return bool(np.abs(P).max() <= 1e-12 * max(1.0, np.abs(self.A).max()) ** 6)


def split_eta(a: KForm):
    """Write a = a0 + a1 ^ eta with a0, a1 forms on h (returned on R^6).

    a1 carries the sign so that a = lift(a0) + lift(a1) ^ e^7 exactly.
    """
    if a.dim != 7:
        raise DimensionMismatch("split_eta expects a form on R^7")
    part0, part1 = {}, {}
    for key, val in a.coeffs.items():
        if key and key[-1] == 7:
            part1[key[:-1]] = val
        else:
            part0[key] = val
    return KForm(6, a.degree, part0), KForm(6, a.degree - 1, part1) if a.degree >= 1 else KForm(6, 0, {})


def differential(alg: AlmostAbelianAlgebra, a: KForm) -> KForm:
    """Invariant exterior differential: d a = eta ^ theta(A) a0."""
    if a.dim != 7:
        raise DimensionMismatch("differential expects a form on R^7")
    if a.degree >= 7:
        return kform(7, 7, {}) if a.degree == 6 else KForm(7, min(a.degree + 1, 7), {})
    a0, _ = split_eta(a)
    body = theta_action(alg.A, a0)
    return wedge(_E7, lift_form(body, 7))


def coclosed_check(alg: AlmostAbelianAlgebra, omega0: KForm, tol=1e-10) -> bool:
    """True iff theta(A) omega0 = 0, i.e. A in sp(h, omega0)."""
    if omega0.dim != 6 or omega0.degree != 2:
        raise DimensionMismatch("coclosed_check expects a 2-form on R^6")
    top = wedge(wedge(omega0, omega0), omega0).coeff(tuple(range(1, 7)))
    if abs(top) < 1e-12 * max(omega0.norm(), 1e-300) ** 3:
        raise DegenerateOmega("omega0 is degenerate")
    resid = theta_action(alg.A, omega0).norm()
    scale = max(np.abs(alg.A).max() * omega0.norm(), 1e-300)
    return resid <= tol * max(scale, 1.0)


def su3_reduce(alg: AlmostAbelianAlgebra, phi: KForm, phi_hat: KForm | None = None,
               tol=1e-8) -> SU3Structure:
    """Induced SU(3)-structure (omega, psi) = (e7 -| phi, -e7 -| phi_hat).

    The basis must already be adapted: e7 of unit length and orthogonal to h
    in g_phi.  Use adapt_frame first otherwise.
    """
    g2 = g2_from_phi(phi)
    g = g2.metric
    if abs(g[6, 6] - 1.0) > tol or np.abs(g[6, :6]).max() > tol * max(1.0, np.abs(g).max()):
        raise FrameNotAdapted("e7 is not unit-normal to h for g_phi")
    if phi_hat is None:
        phi_hat = g2.phi_hat
    e7 = np.eye(7)[6]
    omega = restrict_form(contract(e7, phi), 6)
    psi = restrict_form(-1.0 * contract(e7, phi_hat), 6)
    return su3_assemble(omega, psi)


def adapt_frame(alg: AlmostAbelianAlgebra, phi: KForm):
    """Rotate the basis so that eta = e^7 is unit-normal to h.

    Returns (new_algebra, P, new_phi) where the columns of P are the new
    basis vectors expressed in the old one (P orthonormalizes h with respect
    to g_phi and replaces e7 by its normalized g_phi-projection away from h)
    and new_phi is phi expressed in the new basis.
    """
    from .multilinear import pullback  # local import to avoid cycle noise

    g = g2_from_phi(phi).metric
    H = g[:6, :6]
    L = np.linalg.cholesky(H)
    basis_h = np.linalg.inv(L).T  # columns: g-orthonormal basis of h
    e7 = np.eye(7)[:, 6]
    # subtract the g-projection of e7 onto h, then normalize
    coeffs = np.linalg.solve(H, g[:6, 6])
    v = e7.copy()
    v[:6] -= coeffs
    v /= np.sqrt(v @ g @ v)
    P = np.zeros((7, 7))
    P[:6, :6] = basis_h
    P[:, 6] = v
    # ad_{v} |_h in the new h-basis; v = e7/m + (h-part), h-part acts trivially
    m = v[6]
    A_new = np.linalg.inv(basis_h) @ (m * alg.A) @ basis_h
    return AlmostAbelianAlgebra(A_new), P, pullback(P, phi)


def codifferential(alg: AlmostAbelianAlgebra, g: np.ndarray, a: KForm) -> KForm:
    """Formal adjoint of d for the metric g: delta = (-1)^k star d star on R^7."""
    if a.degree < 1:
        raise DimensionMismatch("codifferential of a 0-form")
    v = np.sqrt(np.linalg.det(np.asarray(g, dtype=float)))
    vol = kform(7, 7, {tuple(range(1, 8)): v})
    sign = -1.0 if a.degree % 2 else 1.0
    return sign * hodge_star(g, vol, differential(alg, hodge_star(g, vol, a)))


def laplacian(alg: AlmostAbelianAlgebra, g: np.ndarray, a: KForm) -> KForm:
    """Hodge Laplacian d delta + delta d."""
    out = differential(alg, codifferential(alg, g, a)) if a.degree >= 1 else KForm(7, 0, {})
    if a.degree <= 6:
        out = out + codifferential(alg, g, differential(alg, a))
    return out


def metric_adjoint(A: np.ndarray, h: np.ndarray) -> np.ndarray:
    """h-adjoint B of A: h(Ax, y) = h(x, By)."""
    h = np.asarray(h, dtype=float)
    return np.linalg.solve(h, np.asarray(A, dtype=float).T @ h)


def adjoint_identity_check(alg: AlmostAbelianAlgebra, h: np.ndarray, a: KForm) -> float:
    """Residual of star_h theta(A) star_h a = theta(B) a with B the h-adjoint."""
    if a.dim != 6:
        raise DimensionMismatch("adjoint identity lives on 3-forms of h")
    h = np.asarray(h, dtype=float)
    v = np.sqrt(np.linalg.det(h))
    vol = kform(6, 6, {tuple(range(1, 7)): v})
    lhs = hodge_star(h, vol, theta_action(alg.A, hodge_star(h, vol, a)))
    rhs = theta_action(metric_adjoint(alg.A, h), a)
    return (lhs - rhs).norm()


def g2_metric_7d(h: np.ndarray, eps: float) -> np.ndarray:
    """Metric of the lifted 4-form omega0^2/2 + p ^ eta: h (+) eps^{-2} on e7."""
    g = np.zeros((7, 7))
    g[:6, :6] = h
    g[6, 6] = 1.0 / (eps * eps)
    return g
