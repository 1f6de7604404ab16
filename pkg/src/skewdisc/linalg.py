"""Dense symmetric linear algebra shared by the whole package.

Everything here is a pure function built on numpy's symmetric
eigensolver. The inverse square root deliberately goes through the full
eigendecomposition (not Cholesky or a Newton iteration) so that the
result is the unique symmetric positive definite root and so that the
singularity floor is an explicit, testable quantity.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NearSingularError, SymmetryError

#: Relative symmetry tolerance used when validating inputs.
SYMMETRY_RTOL = 1e-12

#: Relative eigenvalue floor below which a covariance counts as singular.
SINGULARITY_RTOL = 1e-12


def _check_symmetric(m, rtol=SYMMETRY_RTOL):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    gap = np.linalg.norm(m - m.T)
    scale = max(np.linalg.norm(m), 1.0)
    if gap > rtol * scale:
        raise SymmetryError(
            f"matrix is not symmetric: asymmetry {gap:.3e} exceeds "
            f"{rtol:.1e} relative"
        )
    return m


class SpdMatrix:
    """Symmetric positive definite matrix, validated on construction.

    Parameters
    ----------
    entries : array_like, shape (p, p)
        Symmetric (within 1e-12 relative) matrix with strictly positive
        eigenvalues.

    Raises
    ------
    SymmetryError
        If the input is not symmetric within tolerance.
    ValueError
        If any eigenvalue is nonpositive.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        m = np.array(_check_symmetric(entries), dtype=float)
        vals = np.linalg.eigvalsh(m)
        if vals[0] <= 0.0:
            raise ValueError(
                f"matrix is not positive definite: smallest eigenvalue {vals[0]:.3e}"
            )
        m.flags.writeable = False
        self.entries = m

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self):
        return f"SpdMatrix({self.entries!r})"


@dataclass(frozen=True)
class EigenPair:
    """One eigenvalue with its unit-length eigenvector."""

    value: float
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError("eigenvector is not unit length")
        object.__setattr__(self, "vector", v)


def _fix_sign(vectors):
    # Sign convention: the first coordinate of largest absolute value is
    # made nonnegative, so repeated decompositions are bitwise stable.
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eigen(m):
    """Full eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    m : array_like or SpdMatrix, shape (p, p)
        Symmetric matrix (within 1e-12 relative).

    Returns
    -------
    list of EigenPair
        Eigenpairs sorted by descending eigenvalue. Eigenvectors are
        orthonormal and sign-fixed (largest-magnitude coordinate
        nonnegative).
    """
    m = _check_symmetric(np.asarray(m, dtype=float))
    vals, vecs = np.linalg.eigh(m)
    vecs = _fix_sign(vecs)
    order = np.argsort(vals)[::-1]
    return [EigenPair(float(vals[i]), vecs[:, i]) for i in order]


def inv_sqrt(m, rel_floor=SINGULARITY_RTOL):
    """Symmetric inverse square root of a positive definite matrix.

    Parameters
    ----------
    m : array_like or SpdMatrix, shape (p, p)
    rel_floor : float
        Eigenvalues at or below ``rel_floor * max(eigenvalue)`` raise;
        regularizing silently would make every downstream whitening
        meaningless.

    Returns
    -------
    SpdMatrix
        The unique symmetric positive definite R with R @ m @ R = I.

    Raises
    ------
    NearSingularError
        If the smallest eigenvalue is at or below the floor.
    """
    m = _check_symmetric(np.asarray(m, dtype=float))
    vals, vecs = np.linalg.eigh(m)
    if vals[0] <= rel_floor * vals[-1] or vals[-1] <= 0.0:
        raise NearSingularError(
            f"covariance is numerically singular: eigenvalue range "
            f"[{vals[0]:.3e}, {vals[-1]:.3e}], relative floor {rel_floor:.1e}"
        )
    root = (vecs / np.sqrt(vals)) @ vecs.T
    return SpdMatrix((root + root.T) / 2.0)


def projector_pair(v):
    """Orthogonal projectors onto span(v) and its complement.

    Returns
    -------
    (P, Q) : pair of ndarray, each (p, p)
        P = v v' / ||v||^2 and Q = I - P.
    """
    v = np.asarray(v, dtype=float)
    nrm2 = float(v @ v)
    if nrm2 == 0.0:
        raise ValueError("cannot project onto the zero vector")
    p_mat = np.outer(v, v) / nrm2
    return p_mat, np.eye(len(v)) - p_mat


def commutation_matrix(p):
    """The (p, p)-commutation matrix K with K vec(A) = vec(A') for all A.

    vec stacks columns (Fortran order). K is symmetric, orthogonal and
    an involution.
    """
    if p < 1:
        raise ValueError("p must be a positive integer")
    k = np.zeros((p * p, p * p))
    for i in range(p):
        for j in range(p):
            k[i * p + j, j * p + i] = 1.0
    return k


def kron_sum_inverse(alpha, u):
    """Closed-form inverse of {I kron (I + a uu')} + {(I + a uu') kron I}.

    Parameters
    ----------
    alpha : float
        Nonnegative scalar a.
    u : array_like, shape (p,)
        Unit vector (within 1e-10).

    Returns
    -------
    ndarray, shape (p^2, p^2)
        (1 / (2(a+2))) [I kron I + (a+1) (B kron B)] with
        B = I - (a/(a+1)) uu'.
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-10:
        raise ValueError("u must be a unit vector")
    p = len(u)
    b = np.eye(p) - (alpha / (alpha + 1.0)) * np.outer(u, u)
    return (np.eye(p * p) + (alpha + 1.0) * np.kron(b, b)) / (2.0 * (alpha + 2.0))
