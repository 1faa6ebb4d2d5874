"""
Dense complex linear algebra primitives and random-matrix sampling.

Matrices are numpy arrays of dtype complex128 in row-major order; every
public operation returns finite entries or raises. Stochastic operations
take an explicit ``numpy.random.Generator`` so that no global state is
ever consulted; see `seeded_rng` / `realization_rng` for the seeding
conventions used across the package.
"""

from typing import NamedTuple

import numpy as np

__all__ = [
    "NUMERICAL_NULL",
    "HermitianEig",
    "multiply",
    "eig_hermitian",
    "eigvals_hermitian",
    "haar_unitary",
    "haar_vector",
    "kron",
    "dagger",
    "seeded_rng",
    "realization_rng",
]

# Eigenvalues below this are reported but carry no numerical meaning:
# the spectra handled here span many decades, down past machine precision.
NUMERICAL_NULL = 1e-14

_HERM_TOL = 1e-10


class HermitianEig(NamedTuple):
    """Spectral decomposition of a Hermitian matrix.

    Attributes
    ----------
    eigenvalues : (n,) real ndarray
        Sorted descending; ties keep the solver's original order.
    eigenvectors : (n, n) complex ndarray
        Unitary; column j belongs to ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def multiply(a, b):
    """Matrix product a @ b with an explicit shape check.

    Parameters
    ----------
    a, b : (m, k) and (k, n) complex ndarrays

    Returns
    -------
    (m, n) complex ndarray

    Raises
    ------
    ValueError
        If the inner dimensions disagree; the message names both shapes.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(f"multiply expects matrices, got shapes {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} cannot multiply {b.shape}")
    return a @ b


def _check_hermitian(m, tol):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, np.abs(m).max()) if m.size else 1.0
    dev = np.abs(m - m.conj().T).max() if m.size else 0.0
    if dev > tol * scale:
        raise ValueError(f"matrix is not Hermitian: max deviation {dev:.3e} exceeds tolerance {tol:.1e}")
    return m


def eig_hermitian(m, tol=_HERM_TOL):
    """Eigen-decompose a Hermitian matrix, eigenvalues sorted descending.

    The input is symmetrized as (M + M†)/2 before solving, after checking
    that the Hermiticity deviation is within ``tol`` (relative to the
    largest entry). Ties are broken stably so that repeated calls, and the
    rank truncation built on them, are reproducible.

    Returns
    -------
    HermitianEig
    """
    m = _check_hermitian(m, tol)
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    order = np.argsort(-vals, kind="stable")
    return HermitianEig(vals[order], vecs[:, order])


def eigvals_hermitian(m, tol=_HERM_TOL):
    """Eigenvalues only (sorted descending); cheaper than `eig_hermitian`."""
    m = _check_hermitian(m, tol)
    vals = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return vals[::-1]


def haar_unitary(n, rng):
    """Draw an n x n unitary from the Haar measure.

    QR decomposition of a complex Ginibre matrix, followed by the
    R-diagonal phase correction q[:, j] *= r[j, j] / |r[j, j]|. The
    correction is what makes the distribution exactly Haar rather than
    merely unitary; without it QR's sign convention biases the sample.

    Parameters
    ----------
    n : int
    rng : numpy.random.Generator

    Returns
    -------
    (n, n) complex ndarray with U†U = I to 1e-12.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return q


def haar_vector(n, rng):
    """Unit vector uniform on the sphere in C^n (Gaussian, normalized)."""
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def kron(a, b):
    """Kronecker product with a-index major, so kron(A, B)[i*p + k, j*q + l] = A[i, j] B[k, l]."""
    return np.kron(np.asarray(a), np.asarray(b))


def dagger(a):
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def seeded_rng(seed):
    """Generator for a 64-bit master seed (PCG64 through SeedSequence)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def realization_rng(seed, index):
    """Independent stream for one realization of an ensemble.

    The master seed and the realization index are mixed through
    ``SeedSequence(seed, spawn_key=(index,))``, so streams for different
    indices are statistically independent and reproducible; sequential
    reseeding (seed + index) is never used.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
