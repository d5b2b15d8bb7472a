"""Exterior algebra over R^n (n = 6 or 7) with a fixed basis.

Conventions used throughout the library:

* Multi-indices are 1-based, strictly increasing tuples; a k-form stores a
  sparse map from multi-indices to float coefficients, all signs resolved
  at construction time.
* Vectors are numpy arrays of shape (n,); endomorphisms are (n, n) arrays
  acting on column vectors (the image of basis vector e_j is column j).
* theta(A) is minus-transpose on covectors, (theta(A) a)(x) = -a(Ax),
  extended to all degrees as a derivation of the wedge product.  With this
  sign the invariant differential of an almost-abelian algebra reads
  d a = eta ^ theta(A) a.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, NotPositive, SingularMap, G2CoflowError

__all__ = [
    "KForm",
    "kform",
    "basis_kform",
    "wedge",
    "contract",
    "theta_action",
    "pullback",
    "form_inner_product",
    "gram_matrix",
    "hodge_star",
    "sort_multi_index",
    "multi_indices",
]

Endomorphism = np.ndarray  # (n, n) real matrix, column action


def sort_multi_index(indices):
    """Return (sign, sorted tuple) of a multi-index, or (0, ()) on repeats."""
    idx = list(indices)
    sign = 1
    # insertion sort, counting transpositions; k <= 7 so this is cheap
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(idx)


@lru_cache(maxsize=None)
def multi_indices(dim, degree):
    """All sorted multi-indices of the given degree, lexicographic order."""
    return tuple(itertools.combinations(range(1, dim + 1), degree))


@lru_cache(maxsize=None)
def _complement_data(dim, degree):
    """For each index I of Lambda^k: (complement of I, sign of (I, I^c))."""
    full = range(1, dim + 1)
    out = {}
    for idx in multi_indices(dim, degree):
        comp = tuple(i for i in full if i not in idx)
        sign, _ = sort_multi_index(idx + comp)
        out[idx] = (comp, sign)
    return out


class KForm:
    """Alternating k-form with sparse coefficients on sorted multi-indices.

    Instances are treated as immutable; all operations return new forms.
    """

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim, degree, coeffs=None):
        if not 0 <= degree <= dim:
            raise DimensionMismatch(f"degree {degree} out of range for dim {dim}")
        self.dim = int(dim)
        self.degree = int(degree)
        clean = {}
        if coeffs:
            for key, val in coeffs.items():
                key = tuple(key)
                if len(key) != degree:
                    raise DimensionMismatch(f"index {key} has wrong length for degree {degree}")
                if any(not 1 <= i <= dim for i in key):
                    raise DimensionMismatch(f"index {key} out of range for dim {dim}")
                sign, skey = sort_multi_index(key)
                if sign == 0:
                    continue
                val = float(val) * sign
                if val != 0.0:
                    clean[skey] = clean.get(skey, 0.0) + val
        self.coeffs = {k: v for k, v in clean.items() if v != 0.0}

    # -- accessors ---------------------------------------------------------

    def coeff(self, *indices):
        """Coefficient on a (not necessarily sorted) multi-index."""
        if len(indices) == 1 and isinstance(indices[0], (tuple, list)):
            indices = tuple(indices[0])
        sign, key = sort_multi_index(indices)
        if sign == 0:
            return 0.0
        return sign * self.coeffs.get(key, 0.0)

    def to_vector(self):
        """Dense coefficient vector in lexicographic multi-index order."""
        idx = multi_indices(self.dim, self.degree)
        return np.array([self.coeffs.get(i, 0.0) for i in idx])

    @classmethod
    def from_vector(cls, dim, degree, vec):
        idx = multi_indices(dim, degree)
        if len(vec) != len(idx):
            raise DimensionMismatch("coefficient vector has wrong length")
        return cls(dim, degree, dict(zip(idx, vec)))

    def norm(self):
        """Euclidean norm of the coefficient vector (g = Id inner product)."""
        return float(np.sqrt(sum(v * v for v in self.coeffs.values())))

    def is_zero(self, tol=0.0):
        return all(abs(v) <= tol for v in self.coeffs.values())

    # -- linear structure ----------------------------------------------------

    def _check_same_shape(self, other):
        if self.dim != other.dim or self.degree != other.degree:
            raise DimensionMismatch("forms of different dim/degree")

    def __add__(self, other):
        self._check_same_shape(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return KForm(self.dim, self.degree, out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, scalar):
        scalar = float(scalar)
        return KForm(self.dim, self.degree, {k: scalar * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def allclose(self, other, tol=1e-12):
        self._check_same_shape(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeffs.get(k, 0.0) - other.coeffs.get(k, 0.0)) <= tol for k in keys)

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return (self.dim, self.degree, self.coeffs) == (other.dim, other.degree, other.coeffs)

    def __hash__(self):
        return hash((self.dim, self.degree, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        if not self.coeffs:
            return f"KForm({self.dim},{self.degree}; 0)"
        terms = " ".join(
            f"{v:+g}*e{''.join(map(str, k))}" for k, v in sorted(self.coeffs.items())
        )
        return f"KForm({self.dim},{self.degree}; {terms})"


def kform(dim, degree, coeffs=None):
    """Build a KForm; coeffs maps index tuples (any order) to scalars."""
    return KForm(dim, degree, coeffs)


def basis_kform(dim, indices, value=1.0):
    """The monomial value * e^{indices}."""
    return KForm(dim, len(indices), {tuple(indices): value})


# -- products and contractions -------------------------------------------


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product.  Degree overflow yields the zero form."""
    if a.dim != b.dim:
        raise DimensionMismatch("wedge of forms on different spaces")
    deg = a.degree + b.degree
    if deg > a.dim:
        return KForm(a.dim, a.dim, {})
    out = {}
    for ka, va in a.coeffs.items():
        for kb, vb in b.coeffs.items():
            sign, key = sort_multi_index(ka + kb)
            if sign == 0:
                continue
            out[key] = out.get(key, 0.0) + sign * va * vb
    return KForm(a.dim, deg, out)


def wedge_all(*forms):
    """Left-to-right wedge of several forms."""
    it = iter(forms)
    acc = next(it)
    for f in it:
        acc = wedge(acc, f)
    return acc


def contract(v: np.ndarray, a: KForm) -> KForm:
    """Interior product v -| a into the first slot."""
    v = np.asarray(v, dtype=float)
    if v.shape != (a.dim,):
        raise DimensionMismatch("vector/form dimension mismatch")
    if a.degree == 0:
        raise DimensionMismatch("cannot contract a 0-form")
    out = {}
    for key, val in a.coeffs.items():
        for j, idx in enumerate(key):
            comp = v[idx - 1]
            if comp == 0.0:
                continue
            newkey = key[:j] + key[j + 1:]
            sign = -1.0 if j % 2 else 1.0
            out[newkey] = out.get(newkey, 0.0) + sign * comp * val
    return KForm(a.dim, a.degree - 1, out)


def theta_action(A: np.ndarray, a: KForm) -> KForm:
    """Derivation extension of (theta(A) alpha)(x) = -alpha(Ax).

    On a monomial, theta(A) e^{i1..ik} = -sum_{j,l} A[i_j, l] e^{i1..l..ik}.
    Acts as zero on 0-forms and as multiplication by -tr(A) on top forms.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (a.dim, a.dim):
        raise DimensionMismatch("endomorphism/form dimension mismatch")
    out = {}
    for key, val in a.coeffs.items():
        for j, ij in enumerate(key):
            row = A[ij - 1]
            for l in np.nonzero(row)[0]:
                newkey = key[:j] + (int(l) + 1,) + key[j + 1:]
                sign, skey = sort_multi_index(newkey)
                if sign == 0:
                    continue
                out[skey] = out.get(skey, 0.0) - sign * row[l] * val
    return KForm(a.dim, a.degree, out)


def pullback(P: np.ndarray, a: KForm, det_tol=1e-12) -> KForm:
    """Linear pullback (P* a)(x1..xk) = a(P x1, .., P xk).

    Functorial contravariantly: pullback(P @ Q, a) = pullback(Q, pullback(P, a)).
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (a.dim, a.dim):
        raise DimensionMismatch("matrix/form dimension mismatch")
    scale = max(np.abs(P).max(), 1.0)
    if abs(np.linalg.det(P)) < det_tol * scale ** a.dim:
        raise SingularMap("pullback through a singular matrix")
    if a.degree == 0:
        return a
    out = {}
    for J in multi_indices(a.dim, a.degree):
        cols = [j - 1 for j in J]
        total = 0.0
        for I, val in a.coeffs.items():
            rows = [i - 1 for i in I]
            sub = P[np.ix_(rows, cols)]
            total += val * np.linalg.det(sub)
        if total != 0.0:
            out[J] = total
    return KForm(a.dim, a.degree, out)


# -- metric operations -----------------------------------------------------


def _check_metric(g, dim):
    g = np.asarray(g, dtype=float)
    if g.shape != (dim, dim):
        raise DimensionMismatch("metric has wrong shape")
    if not np.allclose(g, g.T, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise NotPositive("metric is not symmetric")
    eig = np.linalg.eigvalsh(g)
    if eig[0] <= 1e-9 * max(eig[-1], 0.0):
        raise NotPositive("metric is not positive definite")
    return g


def gram_matrix(g: np.ndarray, dim: int, degree: int) -> np.ndarray:
    """Gram matrix of <.,.>_g on Lambda^degree in lexicographic index order."""
    g = _check_metric(g, dim)
    idx = multi_indices(dim, degree)
    if degree == 0:
        return np.array([[1.0]])
    ginv = np.linalg.inv(g)
    n = len(idx)
    out = np.empty((n, n))
    for r, I in enumerate(idx):
        ri = [i - 1 for i in I]
        for c, J in enumerate(idx):
            cj = [j - 1 for j in J]
            out[r, c] = np.linalg.det(ginv[np.ix_(ri, cj)])
    return out


def form_inner_product(g: np.ndarray, a: KForm, b: KForm) -> float:
    """Inner product on Lambda^k induced by the metric g."""
    if a.dim != b.dim or a.degree != b.degree:
        raise DimensionMismatch("inner product of forms of different shape")
    if a.degree == 0:
        va = a.coeffs.get((), 0.0)
        vb = b.coeffs.get((), 0.0)
        _check_metric(g, a.dim)
        return va * vb
    g = _check_metric(g, a.dim)
    ginv = np.linalg.inv(g)
    total = 0.0
    for I, va in a.coeffs.items():
        ri = [i - 1 for i in I]
        for J, vb in b.coeffs.items():
            cj = [j - 1 for j in J]
            total += va * vb * np.linalg.det(ginv[np.ix_(ri, cj)])
    return float(total)


def hodge_star(g: np.ndarray, vol: KForm, a: KForm) -> KForm:
    """Hodge star defined by b ^ star(a) = <a, b>_g vol for all b.

    vol must be the positively oriented unit-norm top form of g.
    """
    if vol.degree != a.dim or vol.dim != a.dim:
        raise DimensionMismatch("volume form has wrong shape")
    nm = form_inner_product(g, vol, vol)
    if abs(nm - 1.0) > 1e-8:
        raise G2CoflowError(f"volume form is not unit for g (|vol|^2 = {nm})")
    v = vol.coeffs.get(tuple(range(1, a.dim + 1)), 0.0)
    comp = _complement_data(a.dim, a.degree)
    gram = gram_matrix(g, a.dim, a.degree)
    idx = multi_indices(a.dim, a.degree)
    avec = a.to_vector()
    inner = gram @ avec  # inner[r] = <e^{I_r}, a>
    out = {}
    for r, I in enumerate(idx):
        c, sign = comp[I]
        val = v * sign * inner[r]
        if val != 0.0:
            out[c] = out.get(c, 0.0) + val
    return KForm(a.dim, a.dim - a.degree, out)
