"""Stable 3-forms in dimensions six and seven.

Dimension 7: a stable positive 3-form phi induces a metric, an orientation
and a Hodge dual 4-form (a linear G2-structure).  Dimension 6: a stable
negative 3-form psi induces a complex structure J_psi, and a compatible
nondegenerate 2-form omega completes it to an SU(3)-structure with metric
h = omega(., J .).

Sign conventions are anchored so that the standard forms below reproduce
each other under every construction in this module (metric = identity,
J e1 = e2, J e3 = e4, J e5 = e6).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateOmega,
    DimensionMismatch,
    NotCompatible,
    NotNegative,
    NotNormalized,
    NotPositive,
    NotStable,
)
from .multilinear import (
    KForm,
    basis_kform,
    contract,
    form_inner_product,
    hodge_star,
    kform,
    pullback,
    wedge,
)

__all__ = [
    "G2Structure",
    "SU3Structure",
    "standard_phi",
    "standard_phi_hat",
    "standard_omega",
    "standard_psi",
    "standard_psi_re",
    "standard_su3",
    "b_form",
    "g2_from_phi",
    "k_operator",
    "lambda_invariant",
    "complex_structure",
    "su3_assemble",
    "hodge6",
    "g2_from_su3",
    "lift_form",
    "restrict_form",
]

_TOP7 = tuple(range(1, 8))
_TOP6 = tuple(range(1, 7))


# -- standard model forms ---------------------------------------------------


def standard_phi() -> KForm:
    """The reference positive 3-form on R^7 (orthonormal adapted frame)."""
    return kform(7, 3, {
        (1, 2, 7): 1.0, (3, 4, 7): 1.0, (5, 6, 7): 1.0,
        (1, 3, 5): 1.0, (1, 4, 6): -1.0, (2, 3, 6): -1.0, (2, 4, 5): -1.0,
    })


def standard_phi_hat() -> KForm:
    """Hodge dual of standard_phi for the flat metric."""
    return kform(7, 4, {
        (1, 2, 3, 4): 1.0, (3, 4, 5, 6): 1.0, (1, 2, 5, 6): 1.0,
        (2, 4, 6, 7): -1.0, (1, 3, 6, 7): 1.0, (1, 4, 5, 7): 1.0,
        (2, 3, 5, 7): 1.0,
    })


def standard_omega() -> KForm:
    return kform(6, 2, {(1, 2): 1.0, (3, 4): 1.0, (5, 6): 1.0})


def standard_psi() -> KForm:
    """Im(e1+ie2)^(e3+ie4)^(e5+ie6): the reference negative 3-form."""
    return kform(6, 3, {
        (2, 4, 6): -1.0, (1, 3, 6): 1.0, (1, 4, 5): 1.0, (2, 3, 5): 1.0,
    })


def standard_psi_re() -> KForm:
    """Re(e1+ie2)^(e3+ie4)^(e5+ie6) = -J* standard_psi."""
    return kform(6, 3, {
        (1, 3, 5): 1.0, (1, 4, 6): -1.0, (2, 3, 6): -1.0, (2, 4, 5): -1.0,
    })


# -- dimension lifting -------------------------------------------------------


def lift_form(a: KForm, dim: int) -> KForm:
    """Inject a form on R^m into R^dim (same multi-indices)."""
    if dim < a.dim:
        raise DimensionMismatch("cannot lift to a smaller space")
    return KForm(dim, a.degree, dict(a.coeffs))


def restrict_form(a: KForm, dim: int) -> KForm:
    """Restrict to the span of the first `dim` basis vectors.

    Requires every stored monomial to use indices <= dim.
    """
    for key in a.coeffs:
        if key and key[-1] > dim:
            raise DimensionMismatch(f"monomial {key} does not restrict to dim {dim}")
    return KForm(dim, a.degree, dict(a.coeffs))


# -- linear G2-structures ----------------------------------------------------


@dataclass(frozen=True)
class G2Structure:
    """A positive 3-form with its induced metric, volume and dual 4-form."""

    phi: KForm
    metric: np.ndarray      # 7x7 symmetric positive definite
    vol: KForm              # unit-norm oriented volume, degree 7
    phi_hat: KForm          # star_phi phi, degree 4
    norm_squared: float     # |phi|^2 in its own metric (7 when normalized)
    orientation: float      # sign of det b_phi

    @property
    def is_normalized(self):
        return abs(self.norm_squared - 7.0) < 1e-8


def b_form(phi: KForm) -> np.ndarray:
    """b(x,y) = (1/6) (x -| phi) ^ (y -| phi) ^ phi on the e^{1..7} coefficient."""
    if phi.dim != 7 or phi.degree != 3:
        raise DimensionMismatch("b_form expects a 3-form on R^7")
    contractions = [contract(np.eye(7)[i], phi) for i in range(7)]
    b = np.empty((7, 7))
    for i in range(7):
        for j in range(i, 7):
            val = wedge(wedge(contractions[i], contractions[j]), phi).coeff(_TOP7) / 6.0
            b[i, j] = val
            b[j, i] = val
    return b


def g2_from_phi(phi: KForm, stab_tol=1e-10) -> G2Structure:
    """Metric, orientation, volume and dual 4-form of a positive 3-form."""
    b = b_form(phi)
    scale = max(np.abs(b).max(), 1e-300)
    det = np.linalg.det(b)
    if abs(det) < (stab_tol * scale) ** 7:
        raise NotStable("det b_phi vanishes: the 3-form is not stable")
    # real ninth root keeps the sign of det; g = b / vol is then well defined
    vol_coef = np.sign(det) * abs(det) ** (1.0 / 9.0)
    g = b / vol_coef
    eig = np.linalg.eigvalsh(g)
    if eig[0] <= 1e-9 * np.abs(eig).max():
        raise NotPositive("induced bilinear form is not positive definite")
    vol = kform(7, 7, {_TOP7: vol_coef})
    phi_hat = hodge_star(g, vol, phi)
    nsq = form_inner_product(g, phi, phi)
    return G2Structure(phi=phi, metric=g, vol=vol, phi_hat=phi_hat,
                       norm_squared=nsq, orientation=float(np.sign(det)))


# -- linear SU(3)-structures --------------------------------------------------


def k_operator(psi: KForm) -> np.ndarray:
    """Matrix of K_psi(x) = (x -| psi) ^ psi in the e^{1..6} trivialization.

    The Lambda^5 = U (x) Lambda^6 identification is fixed by the pairing
    mu ^ alpha = alpha(K x) e^{123456}; with it the standard psi induces the
    standard complex structure (J e1 = e2).
    """
    if psi.dim != 6 or psi.degree != 3:
        raise DimensionMismatch("k_operator expects a 3-form on R^6")
    K = np.zeros((6, 6))
    for j in range(6):
        mu = wedge(contract(np.eye(6)[j], psi), psi)
        for i in range(6):
            K[i, j] = wedge(mu, basis_kform(6, (i + 1,))).coeff(_TOP6)
    return K


def lambda_invariant(psi: KForm) -> float:
    """lambda(psi) = tr(K_psi^2)/6; stable iff nonzero, negative orbit iff < 0."""
    K = k_operator(psi)
    return float(np.trace(K @ K) / 6.0)


def complex_structure(psi: KForm, tol=1e-10) -> np.ndarray:
    """J_psi = K_psi / sqrt(-lambda) for a negative 3-form."""
    K = k_operator(psi)
    lam = float(np.trace(K @ K) / 6.0)
    scale = max(psi.norm(), 1e-300)
    if lam >= -tol * scale ** 4:
        raise NotNegative(f"lambda(psi) = {lam:g} is not negative")
    return K / np.sqrt(-lam)


@dataclass(frozen=True)
class SU3Structure:
    """A positive couple (omega, psi) with its derived data."""

    omega: KForm            # nondegenerate 2-form
    psi: KForm              # negative 3-form, psi ^ omega = 0
    J: np.ndarray           # complex structure of psi, 6x6
    h: np.ndarray           # h(x,y) = omega(x, Jy), 6x6 SPD
    lam: float              # lambda(psi) < 0
    psi_re: KForm           # -J* psi = Re Psi, with Psi = psi_re + i psi
    normalized: bool        # 2 omega^3 = 3 psi ^ J* psi within tolerance


def _omega_matrix(omega: KForm) -> np.ndarray:
    O = np.zeros((6, 6))
    for (i, j), v in omega.coeffs.items():
        O[i - 1, j - 1] = v
        O[j - 1, i - 1] = -v
    return O


def su3_assemble(omega: KForm, psi: KForm, tol=1e-10) -> SU3Structure:
    """Validate and assemble a positive couple into an SU3Structure."""
    if omega.dim != 6 or omega.degree != 2 or psi.dim != 6 or psi.degree != 3:
        raise DimensionMismatch("su3_assemble expects (2-form, 3-form) on R^6")
    cubed = wedge(wedge(omega, omega), omega)
    top = cubed.coeff(_TOP6)
    if abs(top) < tol * max(omega.norm(), 1e-300) ** 3:
        raise DegenerateOmega("omega^3 = 0")
    compat = wedge(psi, omega)
    if compat.norm() > 1e-8 * max(psi.norm() * omega.norm(), 1e-300):
        raise NotCompatible("psi ^ omega != 0")
    J = complex_structure(psi, tol=tol)
    lam = lambda_invariant(psi)
    h = _omega_matrix(omega) @ J
    h = 0.5 * (h + h.T) if np.allclose(h, h.T, atol=1e-10 * max(1.0, np.abs(h).max())) else h
    if not np.allclose(h, h.T, atol=1e-8 * max(1.0, np.abs(h).max())):
        raise NotPositive("omega(., J .) is not symmetric")
    eig = np.linalg.eigvalsh(h)
    if eig[0] <= 1e-9 * np.abs(eig).max():
        raise NotPositive("h is not positive definite")
    psi_re = -1.0 * pullback(J, psi)
    normal = wedge(psi, pullback(J, psi))
    normalized = abs(2.0 * top - 3.0 * normal.coeff(_TOP6)) < 1e-8 * abs(top)
    return SU3Structure(omega=omega, psi=psi, J=J, h=h, lam=lam,
                        psi_re=psi_re, normalized=normalized)


def standard_su3() -> SU3Structure:
    return su3_assemble(standard_omega(), standard_psi())


def hodge6(s: SU3Structure, a: KForm) -> KForm:
    """Hodge star of h with the orientation omega^3 / 6."""
    vol = wedge(wedge(s.omega, s.omega), s.omega) / 6.0
    return hodge_star(s.h, vol, a)


def g2_from_su3(s: SU3Structure):
    """Reassemble (phi, phi_hat) on R^7 = h (+) R e7 from an SU(3)-structure."""
    if not s.normalized:
        raise NotNormalized("the couple must satisfy 2 omega^3 = 3 psi ^ J* psi")
    e7 = basis_kform(7, (7,))
    phi = wedge(lift_form(s.omega, 7), e7) + lift_form(s.psi_re, 7)
    phi_hat = lift_form(wedge(s.omega, s.omega) / 2.0, 7) + wedge(lift_form(s.psi, 7), e7)
    return phi, phi_hat
