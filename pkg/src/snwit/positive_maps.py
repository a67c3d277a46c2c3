"""k-positive maps built from an (N, M)-POVM and a rotation family.

The map acts as

    L(X) = Tr(X) I/d - h * sum_{a,g,l} O^(a)_{gl} Tr[(X - Tr(X) I/d) E_{a,l}] E_{a,g}

with h = sqrt(M(M-1) / (x(M^2 x - d))) / (kd - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DomainError, InvalidKError, UnsupportedError
from .operator_basis import random_unitary
from .rotations import RotationFamily, identity_rotation_family


def h_coefficient(d, M, k, x):
    if M**2 * x <= d:
        raise DomainError(f"h_x needs M^2 x > d; got M={M}, x={x}, d={d}")
    if k * d <= 1:
        raise DomainError(f"h_x needs kd > 1; got k={k}, d={d}")
    return math.sqrt(M * (M - 1) / (x * (M**2 * x - d))) / (k * d - 1)


def shrink_factor(d, M, x):
    """Scalar kappa with sum_{a,k} Tr(E s) E = kappa s for traceless s."""
    return (M**2 * x - d) / (M * (M - 1))


@dataclass(frozen=True)
class WitnessMap:
    povm: object
    rotations: RotationFamily
    k: int
    h: float = None

    def __post_init__(self):
        p = self.povm.params
        if not 1 <= self.k <= p.d:
            raise InvalidKError(f"k must lie in [1, {p.d}], got {self.k}")
        if (self.rotations.N, self.rotations.M) != (p.N, p.M):
            raise DimensionMismatchError(
                f"rotations are {self.rotations.N}x{self.rotations.M}, POVM needs {p.N}x{p.M}"
            )
        h = h_coefficient(p.d, p.M, self.k, p.x)
        if self.h is not None and abs(self.h - h) > 1e-14:
            raise DomainError(f"h = {self.h} disagrees with h_x = {h}")
        object.__setattr__(self, "h", h)

    @classmethod
    def identity(cls, povm, k):
        return cls(povm, identity_rotation_family(povm.N, povm.M), k)

    @property
    def d(self):
        return self.povm.params.d

    def transposed(self):
        """Same POVM and k, rotations replaced by their transposes."""
        return WitnessMap(self.povm, self.rotations.transposed(), self.k)

    def predicted_trace_square(self):
        """Tr[(I (x) L)(psi_k)]^2 for any maximally entangled rank-k psi_k.

        Equals 1/(kd-1) exactly when x = d/M and is smaller otherwise.
        """
        p = self.povm.params
        kd = self.k * p.d
        s = self.h * shrink_factor(p.d, p.M, p.x)
        return (1 + (kd - 1) * s**2) / kd


def _check_square(X, d):
    X = np.asarray(X)
    if X.shape[-2:] != (d, d):
        raise DimensionMismatchError(f"expected trailing shape ({d}, {d}), got {X.shape}")
    return X


def apply_map(wmap, X):
    """Evaluate the map on X; stacked inputs of shape (..., d, d) are allowed."""
    d = wmap.d
    X = _check_square(X, d)
    E = wmap.povm.elements
    I = np.eye(d)
    tr = np.trace(X, axis1=-2, axis2=-1)[..., None, None]
    X0 = X - tr * I / d
    tau = np.einsum("...ij,alji->...al", X0, E)
    coef = np.einsum("agl,...al->...ag", wmap.rotations.matrices, tau)
    return tr * I / d - wmap.h * np.einsum("...ag,agij->...ij", coef, E)


def adjoint_map(wmap, Y):
    """Adjoint with respect to Tr(Y L(X)) = Tr(L^dag(Y) X).

    L^dag(Y) = Tr(Y) I/d - h sum O_{gl} Tr(Y E_g) (E_l - Tr(E_l) I/d).
    """
    d = wmap.d
    Y = _check_square(Y, d)
    E = wmap.povm.elements
    I = np.eye(d)
    E0 = E - np.einsum("alii->al", E)[..., None, None] * I / d
    tr = np.trace(Y, axis1=-2, axis2=-1)[..., None, None]
    tau = np.einsum("...ij,agji->...ag", Y, E)
    coef = np.einsum("agl,...ag->...al", wmap.rotations.matrices, tau)
    return tr * I / d - wmap.h * np.einsum("...al,alij->...ij", coef, E0)


def apply_partial(wmap, rho, adjoint=False):
    """(I (x) L)(rho) for a d^2 x d^2 operator rho."""
    d = wmap.d
    rho = np.asarray(rho)
    if rho.shape != (d * d, d * d):
        raise DimensionMismatchError(f"expected ({d * d}, {d * d}), got {rho.shape}")
    blocks = rho.reshape(d, d, d, d).transpose(0, 2, 1, 3)  # [i, k] -> block acting on B
    fn = adjoint_map if adjoint else apply_map
    out = fn(wmap, blocks)
    return out.transpose(0, 2, 1, 3).reshape(d * d, d * d)


def choi_matrix(wmap):
    """sum_{ij} |i><j| (x) L(|i><j|)."""
    d = wmap.d
    units = np.zeros((d, d, d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            units[i, j, i, j] = 1
    blocks = apply_map(wmap, units)
    return blocks.transpose(0, 2, 1, 3).reshape(d * d, d * d)


def _max_entangled(d, k, U, V):
    A = U[:, :k] @ V[:, :k].T / math.sqrt(k)
    return A.reshape(-1)


def _trial_pair(d, seed, trial):
    rng = np.random.default_rng([seed, trial])
    return random_unitary(d, rng), random_unitary(d, rng)


def trace_square_samples(wmap, trials, seed):
    """Tr{[(I (x) L)(|psi_k><psi_k|)]^2} for ``trials`` Haar-random U, V.

    Trial i draws from its own stream (seed, i), so results do not depend
    on evaluation order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d, k = wmap.d, wmap.k
    out = np.empty(trials)
    for i in range(trials):
        psi = _max_entangled(d, k, *_trial_pair(d, seed, i))
        Y = apply_partial(wmap, np.outer(psi, psi.conj()))
        out[i] = np.einsum("ij,ji->", Y, Y).real
    return out


def kpos_trace_square_check(wmap, trials, seed):
    """Max over trials of |T - 1/(kd - 1)|."""
    if wmap.k > wmap.d:
        raise InvalidKError(f"k = {wmap.k} exceeds d = {wmap.d}")
    T = trace_square_samples(wmap, trials, seed)
    return float(np.abs(T - 1 / (wmap.k * wmap.d - 1)).max())


def kpos_min_eigenvalue(wmap, trials, seed, adjoint=False):
    """Smallest eigenvalue of (I (x) L)(psi_k) over sampled rank-k maximally entangled states."""
    d, k = wmap.d, wmap.k
    worst = np.inf
    for i in range(trials):
        psi = _max_entangled(d, k, *_trial_pair(d, seed, i))
        Y = apply_partial(wmap, np.outer(psi, psi.conj()), adjoint=adjoint)
        worst = min(worst, float(np.linalg.eigvalsh(Y).min()))
    return worst


def hs_identity_check(povm, sigma):
    """Both sides of the frame identity for sum_{a,k} |Tr(E_{a,k} sigma)|^2."""
    p = povm.params
    if not p.informationally_complete:
        raise UnsupportedError("the identity needs an informationally complete POVM")
    sigma = _check_square(sigma, p.d)
    d, M, x = p.d, p.M, p.x
    lhs = float(np.sum(np.abs(np.einsum("akij,ji->ak", povm.elements, sigma)) ** 2))
    hs = np.vdot(sigma, sigma).real
    tr2 = abs(np.trace(sigma)) ** 2
    rhs = (d * (M**2 * x - d) * hs + (d**3 - M**2 * x) * tr2) / (d * M * (M - 1))
    return lhs, float(rhs)
