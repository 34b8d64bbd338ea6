"""Complex dense linear-algebra helpers used throughout the simulator.

All routines operate on complex128 arrays and are deterministic: SVD/eigh
outputs are post-processed with a fixed ordering and sign convention so that
repeated runs produce identical matrices.
"""

import numpy as np

__all__ = [
    "crandn",
    "haar_orthonormal",
    "rank_from_singular_values",
    "fix_basis_phase",
    "null_space_basis",
    "column_space_basis",
    "complement_basis",
    "eigh_descending",
    "eigh_ascending",
    "closest_orthonormal",
    "is_orthonormal",
]

_EPS = np.finfo(np.float64).eps


def crandn(rng, *shape):
    """Circularly-symmetric complex Gaussian CN(0,1) samples.

    Real and imaginary parts each carry variance 1/2 so the complex entries
    have unit variance.
    """
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_orthonormal(rng, rows, cols):
    """Draw a rows x cols matrix with orthonormal columns, Haar-uniform.

    QR of a complex Gaussian with the R-diagonal phase folded into Q, which
    makes the distribution exactly Haar rather than merely orthonormal.
    """
    if cols > rows:
        raise ValueError(f"cannot build {cols} orthonormal columns in dimension {rows}")
    a = crandn(rng, rows, cols)
    q, r = np.linalg.qr(a)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    return q * (d / np.abs(d))


def rank_from_singular_values(s, shape):
    """Numerical rank: singular values above max(dim) * eps * s_max count."""
    if len(s) == 0:
        return 0
    tol = max(shape) * _EPS * s[0]
    return int(np.sum(s > tol))


def fix_basis_phase(basis):
    """Rotate each column so its first nonzero component is real positive.

    Pins the phase ambiguity of singular/eigen vectors, making basis
    computations reproducible across runs.
    """
    basis = np.array(basis)
    for j in range(basis.shape[1]):
        col = basis[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e3 * _EPS * max(np.abs(col).max(), _EPS))
        if len(nz) == 0:
            continue
        pivot = col[nz[0]]
        basis[:, j] = col * (np.conj(pivot) / np.abs(pivot))
    return basis


def null_space_basis(a):
    """Orthonormal basis of the right null space of ``a`` via full SVD."""
    a = np.atleast_2d(a)
    if a.shape[0] == 0:
        return fix_basis_phase(np.eye(a.shape[1], dtype=complex))
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r = rank_from_singular_values(s, a.shape)
    return fix_basis_phase(vh[r:, :].conj().T)


def column_space_basis(a):
    """Orthonormal basis of the column space of ``a`` via full SVD."""
    a = np.atleast_2d(a)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=True)
    r = rank_from_singular_values(s, a.shape)
    return fix_basis_phase(u[:, :r])


def complement_basis(a):
    """Orthonormal basis of the orthogonal complement of ``a``'s column space."""
    a = np.atleast_2d(a)
    if a.shape[1] == 0:
        return fix_basis_phase(np.eye(a.shape[0], dtype=complex))
    u, s, _ = np.linalg.svd(a, full_matrices=True)
    r = rank_from_singular_values(s, a.shape)
    return fix_basis_phase(u[:, r:])


def eigh_descending(a):
    """Hermitian eigendecomposition sorted by descending eigenvalue.

    Ties keep the smaller original index first (stable sort), so selection of
    the "most significant" eigenvectors is deterministic.
    """
    w, v = np.linalg.eigh(a)
    order = np.argsort(-w, kind="stable")
    return w[order], fix_basis_phase(v[:, order])


def eigh_ascending(a):
    """Hermitian eigendecomposition sorted by ascending eigenvalue."""
    w, v = np.linalg.eigh(a)
    return w, fix_basis_phase(v)


def closest_orthonormal(a):
    """Polar projection: the orthonormal-column matrix nearest to ``a``."""
    u, _, vh = np.linalg.svd(a, full_matrices=False)
    return u @ vh


def is_orthonormal(a, tol=1e-10):
    g = a.conj().T @ a
    return bool(np.max(np.abs(g - np.eye(a.shape[1]))) < tol) if a.shape[1] else True
