"""Bipartite states, Schmidt decompositions and the isotropic-state closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DomainError, InvalidKError, NotAStateError, OutOfRangeError
from .operator_basis import random_unitary
from .positive_maps import h_coefficient

# Comparison visibility quoted for d=3, k=2 with the SIC/MUB witness family (L=4).
BASELINE_VISIBILITY = 0.685


@dataclass(frozen=True)
class BipartiteState:
    matrix: np.ndarray
    dA: int
    dB: int

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=np.complex128)
        n = self.dA * self.dB
        if rho.shape != (n, n):
            raise DimensionMismatchError(f"state of shape {rho.shape} does not match {self.dA}x{self.dB}")
        if np.abs(rho - rho.conj().T).max() > 1e-12:
            raise NotAStateError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise NotAStateError(f"trace is {np.trace(rho).real:.3e}, not 1")
        lam = np.linalg.eigvalsh(rho).min()
        if lam < -1e-10:
            raise NotAStateError(f"minimum eigenvalue {lam:.3e} is negative")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def pure(cls, psi, dA, dB):
        psi = np.asarray(psi, dtype=np.complex128)
        return cls(np.outer(psi, psi.conj()), dA, dB)

    def purity(self):
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    rank: int
    left: np.ndarray
    right: np.ndarray

    def reconstruct(self):
        """sum_i lambda_i u_i (x) v_i over all stored terms."""
        return np.einsum("i,ai,bi->ab", self.coefficients, self.left, self.right).reshape(-1)


def max_entangled_vector(d):
    return np.eye(d, dtype=np.complex128).reshape(-1) / math.sqrt(d)


def isotropic_state(d, v):
    if not 0 <= v <= 1:
        raise OutOfRangeError(f"visibility v = {v} outside [0, 1]")
    psi = max_entangled_vector(d)
    rho = v * np.outer(psi, psi.conj()) + (1 - v) / d**2 * np.eye(d * d)
    return BipartiteState(rho, d, d)


def _check_unitary(U, d):
    U = np.asarray(U)
    if U.shape != (d, d) or np.abs(U.conj().T @ U - np.eye(d)).max() > 1e-10:
        raise DomainError("expected a unitary d x d matrix")
    return U


def max_entangled_rank_k(d, k, U, V):
    """(U (x) V) sum_{i<k} |ii> / sqrt(k) as a length d**2 vector."""
    if not 1 <= k <= d:
        raise InvalidKError(f"k must lie in [1, {d}], got {k}")
    U, V = _check_unitary(U, d), _check_unitary(V, d)
    return (U[:, :k] @ V[:, :k].T / math.sqrt(k)).reshape(-1)


def _schmidt_spectrum(rng, k, floor=1e-3):
    while True:
        lam = np.sqrt(rng.dirichlet(np.ones(k)))
        if lam.min() >= floor:
            return lam


def random_pure_schmidt_rank(d, k, seed):
    """Pure state of Schmidt rank exactly k: Haar U, V and squared coefficients flat on the simplex."""
    if not 1 <= k <= d:
        raise InvalidKError(f"k must lie in [1, {d}], got {k}")
    rng = np.random.default_rng(seed)
    U, V = random_unitary(d, rng), random_unitary(d, rng)
    lam = _schmidt_spectrum(rng, k)
    return ((U[:, :k] * lam) @ V[:, :k].T).reshape(-1)


def schmidt_decomposition(psi, dA, dB, rank_tol=1e-8):
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (dA * dB,):
        raise DimensionMismatchError(f"vector of length {psi.size} does not match {dA}x{dB}")
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise DomainError("state vector is not normalized")
    u, s, vh = np.linalg.svd(psi.reshape(dA, dB))
    return SchmidtData(s, int(np.sum(s > rank_tol)), u, vh.T)


def isotropic_expectation_analytic(d, k, M, N, x, v, diag_sum):
    """Closed-form Tr(W_k rho_v); diag_sum = sum over a, g of O^(a)_{gg}."""
    if M == 1:
        raise DomainError("M = 1 makes the intra-group overlap undefined")
    h = h_coefficient(d, M, k, x)
    alpha = (M + N * d * h) / (d * M)
    c = (d - M * x) / (M * (M - 1))
    inner = (x - c) * diag_sum / d + (d - M * x) / (M - 1) * N / d
    return alpha - h * (1 - v) * N / M - v * h * inner


def threshold_v(d, k, M, N, x):
    """Visibility above which the identity-rotation witness flags SN(rho_v) > k.

    Values above 1 are returned unchanged.
    """
    if M**2 * x <= d:
        raise DomainError(f"threshold needs M^2 x > d; got M={M}, x={x}, d={d}")
    return M * (k * d - 1) * math.sqrt(x * (M**2 * x - d)) / ((M**2 * N * x - N * d) * math.sqrt(M * (M - 1)))


def baseline_threshold(d, k, L):
    """sqrt((dk-1)(Lk-L+d-1)) / (dL-L), the comparison bound of the earlier witness family."""
    return math.sqrt((d * k - 1) * (L * k - L + d - 1)) / (d * L - L)
