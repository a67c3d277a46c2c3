"""Orthonormal traceless Hermitian operator bases and Haar sampling."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidDimensionError


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HermitianBasis:
    """The d**2 - 1 traceless elements of an orthonormal Hermitian basis.

    The identity element I/sqrt(d) is implicit and not stored.
    ``elements`` has shape (d**2 - 1, d, d) and satisfies
    Tr(G_i G_j) = delta_ij.
    """

    dim: int
    elements: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        els = _frozen(np.asarray(self.elements, dtype=np.complex128))
        d = self.dim
        if els.shape != (d * d - 1, d, d):
            raise InvalidDimensionError(
                f"expected {d * d - 1} elements of shape ({d}, {d}), got {els.shape}"
            )
        object.__setattr__(self, "elements", els)

    def __len__(self):
        return len(self.elements)

    def gram(self):
        """Hilbert-Schmidt Gram matrix Tr(G_i G_j)."""
        return np.einsum("aij,bji->ab", self.elements, self.elements)


def gell_mann_basis(d):
    """Generalized Gell-Mann matrices normalized to Tr(G_i G_j) = delta_ij.

    Order: symmetric off-diagonal pairs (j<k), antisymmetric pairs (j<k),
    then the d-1 diagonal matrices.
    """
    if d < 2:
        raise InvalidDimensionError(f"gell_mann_basis needs d >= 2, got {d}")
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    out = []
    for j, k in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[j, k] = m[k, j] = 1
        out.append(m / np.sqrt(2))
    for j, k in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[j, k] = -1j
        m[k, j] = 1j
        out.append(m / np.sqrt(2))
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        out.append(np.diag(diag).astype(np.complex128) / np.sqrt(l * (l + 1)))
    return HermitianBasis(d, np.array(out), name="gell-mann")


_PAULI = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def pauli_basis(d):
    """Normalized n-qubit Pauli strings (identity string dropped), d = 2**n.

    With M = 2 and x = d/2 this basis yields genuine projective (N, 2)-POVMs.
    """
    n = int(round(np.log2(d))) if d >= 2 else 0
    if d < 2 or 2**n != d:
        raise InvalidDimensionError(f"pauli_basis needs d = 2**n >= 2, got {d}")
    out = []
    for idx in np.ndindex(*([4] * n)):
        if not any(idx):
            continue
        out.append(reduce(np.kron, (_PAULI[i] for i in idx)) / np.sqrt(d))
    return HermitianBasis(d, np.array(out), name="pauli")


def random_unitary(d, seed):
    """Haar-random d x d unitary (QR of a Ginibre matrix, phases fixed).

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if d < 1:
        raise InvalidDimensionError(f"random_unitary needs d >= 1, got {d}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_orthogonal(n, seed):
    """Haar-random real n x n orthogonal matrix (either determinant)."""
    if n < 1:
        raise InvalidDimensionError(f"random_orthogonal needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diagonal(r))
