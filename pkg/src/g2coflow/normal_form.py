"""Adapted frames for A in sp(omega) relative to an SU(3)-structure.

The symmetric part S of any A in sp(omega) anticommutes with J and the
skew part L commutes with J, so S always admits a frame
(e1, Je1, e2, Je2, e3, Je3) in which

    S e_i = s_i (cos(theta) e_i + sin(theta) J e_i),
    S Je_i = -s_i (-sin(theta) e_i + cos(theta) J e_i),

while omega and psi take their model shapes.  The frame is produced by
diagonalizing S, pairing the +/- eigenspaces through J, and applying the
phase correction Q = Re(w) Id + Im(w) J, where w is the principal cube
root of the ratio between the candidate complex volume and the target one.
For normal A ([S, L] = 0) the skew part additionally decomposes into equal
so(m) blocks over each eigenvalue group, with L e_j = l_j J e_j on the
kernel lines.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import NotInSp, NotNormal
from .multilinear import KForm, kform, pullback, theta_action, wedge
from .stable_forms import SU3Structure, standard_omega, standard_psi

__all__ = [
    "NormalFormData",
    "symmetric_skew_split",
    "anticommutation_check",
    "frame_fit",
    "adapted_frame",
    "model_S",
    "model_sigma_blocks",
    "sp_residual",
]

_PAIR_TOL = 1e-8


def sp_residual(A: np.ndarray, omega: KForm) -> float:
    """Norm of theta(A) omega; zero iff A in sp(omega)."""
    return theta_action(A, omega).norm()


def symmetric_skew_split(A: np.ndarray, h: np.ndarray):
    """h-symmetric and h-skew parts of A (h positive definite)."""
    A = np.asarray(A, dtype=float)
    h = np.asarray(h, dtype=float)
    adj = np.linalg.solve(h, A.T @ h)
    return 0.5 * (A + adj), 0.5 * (A - adj)


def anticommutation_check(S: np.ndarray, L: np.ndarray, J: np.ndarray):
    """Residuals (|SJ + JS|, |LJ - JL|); both vanish for A in sp(omega)."""
    return (float(np.linalg.norm(S @ J + J @ S)),
            float(np.linalg.norm(L @ J - J @ L)))


def model_S(s, theta) -> np.ndarray:
    """The normal form of S in the interleaved frame, for given (s_i, theta)."""
    a, b = np.cos(theta), np.sin(theta)
    out = np.zeros((6, 6))
    for i, si in enumerate(s):
        blk = si * np.array([[a, b], [b, -a]])
        out[2 * i:2 * i + 2, 2 * i:2 * i + 2] = blk
    return out


def model_sigma_blocks(s, theta) -> np.ndarray:
    """The 6x6 part of the soliton operator Sigma in the interleaved frame."""
    a, b = np.cos(theta), np.sin(theta)
    s1, s2, s3 = s
    out = np.zeros((6, 6))
    for i, prod in enumerate((s2 * s3, s1 * s3, s1 * s2)):
        d = -2.0 * prod + 4.0 * a * a * prod
        o = -4.0 * a * b * prod
        out[2 * i:2 * i + 2, 2 * i:2 * i + 2] = np.array([[d, o], [o, -d]])
    return out


@dataclass
class NormalFormData:
    """Adapted frame and invariants of A relative to an SU(3)-structure."""

    frame: np.ndarray                 # 6x6; columns (e1, Je1, e2, Je2, e3, Je3)
    s: tuple                          # (s1, s2, s3), descending, >= 0
    theta: float                      # in [0, 2 pi)
    l: float                          # Im of the complex trace of L
    l_per_line: tuple                 # h(L e_j, J e_j) for each line
    l_per_line_defined: bool          # True when L e_j = l_j J e_j on all lines
    L_blocks: list | None             # skew blocks of L per eigenvalue group (normal A)
    is_normal: bool
    residuals: dict = field(default_factory=dict)

    @property
    def s_squared(self):
        return float(sum(si * si for si in self.s))

    def to_dict(self):
        return {
            "frame": self.frame.tolist(),
            "s": list(self.s),
            "theta": self.theta,
            "l": self.l,
            "lPerLine": list(self.l_per_line),
            "isNormal": self.is_normal,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }


def _complex_wedge(re1, im1, re2, im2):
    """(re1 + i im1) ^ (re2 + i im2) as a (re, im) pair of KForms."""
    return (wedge(re1, re2) - wedge(im1, im2), wedge(re1, im2) + wedge(im1, re2))


def _volume_phase(frame, su3: SU3Structure):
    """z with Psi_candidate = z Psi, where Psi = psi_re + i psi."""
    coframe = np.linalg.inv(frame)
    lines = []
    for i in range(3):
        re = kform(6, 1, {(j + 1,): coframe[2 * i, j] for j in range(6)})
        im = kform(6, 1, {(j + 1,): coframe[2 * i + 1, j] for j in range(6)})
        lines.append((re, im))
    re, im = lines[0]
    for nxt in lines[1:]:
        re, im = _complex_wedge(re, im, *nxt)
    top = tuple(range(1, 7))

    def _pair(re1, im1):
        # (re1 + i im1) ^ conj(Psi), top coefficient
        a = wedge(re1, su3.psi_re) + wedge(im1, su3.psi)
        b = wedge(im1, su3.psi_re) - wedge(re1, su3.psi)
        return complex(a.coeff(top), b.coeff(top))

    num = _pair(re, im)
    den = _pair(su3.psi_re, su3.psi)
    return num / den


def frame_fit(A: np.ndarray, su3: SU3Structure, require_normal=False,
              tol=1e-8) -> NormalFormData:
    """Build the adapted frame putting S in normal form.

    Works for every A in sp(omega); `require_normal` additionally demands
    [A, A^dagger] = 0 and then reports the block structure of L.
    """
    A = np.asarray(A, dtype=float)
    h = su3.h
    J = su3.J
    scale = max(np.abs(A).max(), 1e-300)
    if sp_residual(A, su3.omega) > tol * max(1.0, scale):
        raise NotInSp("A is not an infinitesimal symplectomorphism of omega")
    S, L = symmetric_skew_split(A, h)
    comm = S @ L - L @ S
    is_normal = bool(np.abs(comm).max() <= tol * max(1.0, scale) ** 2)
    if require_normal and not is_normal:
        raise NotNormal("[A, A^dagger] != 0")

    # work in h-orthonormal coordinates
    C = np.linalg.cholesky(h)  # h = C C^T
    T = C.T                    # x -> T x is an isometry onto flat R^6
    Tinv = np.linalg.inv(T)
    St = T @ S @ Tinv
    St = 0.5 * (St + St.T)
    Jt = T @ J @ Tinv

    eigval, eigvec = np.linalg.eigh(St)
    smax = max(np.abs(eigval).max(), 1.0)
    groups = []  # (value >= 0, [orthonormal columns of V_value])
    used = np.zeros(len(eigval), dtype=bool)
    order = np.argsort(-eigval)
    for i in order:
        if used[i]:
            continue
        val = eigval[i]
        if val < -_PAIR_TOL * smax:
            continue
        members = [j for j in range(6) if not used[j]
                   and abs(eigval[j] - val) <= _PAIR_TOL * smax]
        for j in members:
            used[j] = True
        if val > _PAIR_TOL * smax:
            # the -val eigenspace is J of this one; mark it used
            for j in range(6):
                if not used[j] and abs(eigval[j] + val) <= _PAIR_TOL * smax:
                    used[j] = True
            groups.append((float(val), [eigvec[:, j] for j in members]))
        else:
            groups.append((0.0, [eigvec[:, j] for j in members]))

    # assemble one line (v, Jv) per unit of multiplicity
    lines = []       # candidate v vectors, in tilde coordinates
    group_lines = []  # indices of lines belonging to each group, for L blocks
    for val, vecs in groups:
        idx = []
        if val > 0.0:
            for v in vecs:
                v = v / np.linalg.norm(v)
                idx.append(len(lines))
                lines.append((val, v))
        else:
            # V_0 is J-invariant and even dimensional: extract J-pairs
            basis = list(vecs)
            pool = np.array(basis).T if basis else np.zeros((6, 0))
            taken = []
            while pool.shape[1] >= 2:
                u = pool[:, 0]
                for w in taken:
                    u = u - (w @ u) * w
                nu = np.linalg.norm(u)
                u = u / nu
                ju = Jt @ u
                for w in taken:
                    ju = ju - (w @ ju) * w
                ju = ju / np.linalg.norm(ju)
                taken += [u, ju]
                idx.append(len(lines))
                lines.append((0.0, u))
                # re-project the pool off span(u, Ju)
                newcols = []
                for kcol in range(pool.shape[1]):
                    w = pool[:, kcol]
                    w = w - (u @ w) * u - (ju @ w) * ju
                    if np.linalg.norm(w) > 1e-10:
                        newcols.append(w)
                pool = (np.array(newcols).T if newcols
                        else np.zeros((6, 0)))
        group_lines.append((val, idx))
    if len(lines) != 3:
        raise NotInSp("eigenvalue pairing failed; is A in sp(omega)?")

    # deterministic ordering: s descending, ties by lexicographic eigenvector
    def _key(entry):
        val, v = entry
        vv = v if (v[np.abs(v) > 1e-12][0] if np.any(np.abs(v) > 1e-12) else 1.0) > 0 else -v
        return (-val, tuple(np.round(vv, 10)))

    perm = sorted(range(3), key=lambda i: _key(lines[i]))
    lines = [lines[i] for i in perm]
    remap = {old: new for new, old in enumerate(perm)}
    group_lines = [(val, sorted(remap[i] for i in idx)) for val, idx in group_lines]

    frame_t = np.zeros((6, 6))
    for i, (_, v) in enumerate(lines):
        frame_t[:, 2 * i] = v
        frame_t[:, 2 * i + 1] = Jt @ v
    frame = Tinv @ frame_t

    # cube-root phase correction: principal branch, frozen for reproducibility
    z = _volume_phase(frame, su3)
    phase_defect = abs(abs(z) - 1.0)
    w = cmath.exp(1j * cmath.phase(z) / 3.0)
    Q = w.real * np.eye(6) + w.imag * J
    frame = Q @ frame
    zres = abs(_volume_phase(frame, su3) - 1.0)

    s = tuple(val for val, _ in lines)
    # theta read off the first line with s_i > 0
    theta = 0.0
    for i, si in enumerate(s):
        if si > _PAIR_TOL * smax:
            f = frame[:, 2 * i]
            jf = frame[:, 2 * i + 1]
            co = f @ h @ (S @ f) / si
            si_ = jf @ h @ (S @ f) / si
            theta = float(np.arctan2(si_, co)) % (2.0 * np.pi)
            break

    l_lines = tuple(float(frame[:, 2 * i + 1] @ h @ (L @ frame[:, 2 * i]))
                    for i in range(3))
    l_defined = all(
        np.linalg.norm(L @ frame[:, 2 * i] - l_lines[i] * frame[:, 2 * i + 1])
        <= 1e-8 * max(1.0, scale) for i in range(3))
    l_total = float(-np.trace(J @ L) / 2.0)

    L_blocks = None
    if is_normal:
        # complex-diagonalize L on the kernel lines so that L e_j = l_j J e_j
        zero_lines = [i for i, si in enumerate(s) if si <= _PAIR_TOL * smax]
        if len(zero_lines) > 1:
            m = len(zero_lines)
            M = np.zeros((m, m), dtype=complex)
            for a, ia in enumerate(zero_lines):
                ua, jua = frame[:, 2 * ia], frame[:, 2 * ia + 1]
                for b, ib in enumerate(zero_lines):
                    ub = frame[:, 2 * ib]
                    M[a, b] = complex(ua @ h @ (L @ ub), jua @ h @ (L @ ub))
            lj, U = np.linalg.eigh(M / 1j)
            order0 = np.argsort(-lj)
            lj, U = lj[order0], U[:, order0]
            cols = np.array([frame[:, 2 * i] for i in zero_lines]).T
            jcols = np.array([frame[:, 2 * i + 1] for i in zero_lines]).T
            for b, ib in enumerate(zero_lines):
                e = cols @ U[:, b].real + jcols @ U[:, b].imag
                frame[:, 2 * ib] = e
                frame[:, 2 * ib + 1] = J @ e
            l_lines = tuple(float(frame[:, 2 * i + 1] @ h @ (L @ frame[:, 2 * i]))
                            for i in range(3))
            l_defined = True
        L_blocks = []
        for val, idx in group_lines:
            m = len(idx)
            blk = np.zeros((m, m))
            for a in range(m):
                for b in range(m):
                    blk[a, b] = frame[:, 2 * idx[a]] @ h @ (L @ frame[:, 2 * idx[b]])
            L_blocks.append(blk)

    res = {
        "phase_modulus": phase_defect,
        "volume_match": zres,
        "omega_model": (pullback(frame, su3.omega) - standard_omega()).norm(),
        "psi_model": (pullback(frame, su3.psi) - standard_psi()).norm(),
        "S_model": float(np.linalg.norm(
            np.linalg.inv(frame) @ S @ frame - model_S(s, theta))),
    }
    return NormalFormData(frame=frame, s=s, theta=theta, l=l_total,
                          l_per_line=l_lines, l_per_line_defined=bool(l_defined),
                          L_blocks=L_blocks, is_normal=is_normal, residuals=res)


def adapted_frame(A: np.ndarray, su3: SU3Structure, tol=1e-8) -> NormalFormData:
    """Lemma-style normal form; raises NotNormal unless [A, A^dagger] = 0."""
    return frame_fit(A, su3, require_normal=True, tol=tol)
