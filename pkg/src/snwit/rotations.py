"""Orthogonal M x M matrices that fix the all-ones vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, InvalidDimensionError
from .operator_basis import random_orthogonal


@dataclass(frozen=True)
class RotationFamily:
    """N real orthogonal matrices O^(a), stored as an (N, M, M) array."""

    matrices: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrices, dtype=np.float64)
        if a.ndim != 3 or a.shape[1] != a.shape[2]:
            raise InvalidDimensionError(f"rotation family must have shape (N, M, M), got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "matrices", a)

    @property
    def N(self):
        return self.matrices.shape[0]

    @property
    def M(self):
        return self.matrices.shape[1]

    def orthogonality_error(self):
        O = self.matrices
        return float(np.abs(np.einsum("agl,agm->alm", O, O) - np.eye(self.M)).max())

    def ones_error(self):
        """Largest deviation of any row or column sum from 1."""
        O = self.matrices
        return float(max(np.abs(O.sum(axis=2) - 1).max(), np.abs(O.sum(axis=1) - 1).max()))

    def is_valid(self, tol=1e-12):
        return self.orthogonality_error() < tol and self.ones_error() < tol

    def transposed(self):
        return RotationFamily(self.matrices.transpose(0, 2, 1))

    def diag_sum(self):
        """Sum over a and g of O^(a)_{gg}."""
        return float(np.einsum("agg->", self.matrices))

    def to_dict(self):
        return {"N": self.N, "M": self.M, "matrices": self.matrices.tolist()}

    @classmethod
    def from_dict(cls, obj):
        return cls(np.asarray(obj["matrices"], dtype=np.float64))


def identity_rotation_family(N, M):
    if N < 1 or M < 1:
        raise InvalidDimensionError(f"need N, M >= 1, got N={N}, M={M}")
    return RotationFamily(np.broadcast_to(np.eye(M), (N, M, M)))


def ones_complement(M):
    """Orthonormal M x (M-1) basis of the complement of (1, ..., 1)."""
    # Helmert construction: column j is (1, ..., 1, -j, 0, ...) normalized
    B = np.zeros((M, M - 1))
    for j in range(1, M):
        B[:j, j - 1] = 1.0
        B[j, j - 1] = -j
        B[:, j - 1] /= np.sqrt(j * (j + 1))
    return B


def random_rotation_family(N, M, seed):
    """O = J/M + B Q B^T with Haar-random orthogonal Q on the complement.

    For M = 2 each O^(a) is either the identity or the swap.
    """
    if M < 2:
        raise DegenerateError("M = 1 admits only the identity")
    rng = np.random.default_rng(seed)
    B = ones_complement(M)
    J = np.full((M, M), 1.0 / M)
    mats = [J + B @ random_orthogonal(M - 1, rng) @ B.T for _ in range(N)]
    return RotationFamily(np.array(mats))
