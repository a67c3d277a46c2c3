"""Schmidt-number witnesses of class k+1 and their evaluation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InvalidKError, NotAStateError
from .positive_maps import WitnessMap, apply_partial, h_coefficient
from .rotations import RotationFamily, identity_rotation_family, random_rotation_family
from .states import BipartiteState, _schmidt_spectrum
from .symmetric_measurement import matrix_from_json, matrix_to_json

__all__ = [
    "RotationFamily",
    "WitnessOperator",
    "build_witness",
    "choi_consistency_check",
    "expectation",
    "identity_rotation_family",
    "min_over_schmidt_k",
    "random_rotation_family",
]


@dataclass(frozen=True)
class WitnessOperator:
    """W_k = identity_coefficient * I (x) I - h * sum_operator."""

    matrix: np.ndarray
    d: int
    N: int
    M: int
    x: float
    k: int
    h: float
    identity_coefficient: float
    sum_operator: np.ndarray = field(repr=False)
    rotations: RotationFamily = field(repr=False)

    def __post_init__(self):
        for name in ("matrix", "sum_operator"):
            a = np.array(getattr(self, name), dtype=np.complex128)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def hermiticity_error(self):
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def to_dict(self):
        return {
            "d": self.d,
            "N": self.N,
            "M": self.M,
            "x": self.x,
            "k": self.k,
            "h": self.h,
            "identity_coefficient": self.identity_coefficient,
            "rotations": self.rotations.matrices.tolist(),
            "matrix": matrix_to_json(self.matrix),
            "sum_operator": matrix_to_json(self.sum_operator),
        }

    @classmethod
    def from_dict(cls, obj):
        return cls(
            matrix=matrix_from_json(obj["matrix"]),
            d=int(obj["d"]),
            N=int(obj["N"]),
            M=int(obj["M"]),
            x=float(obj["x"]),
            k=int(obj["k"]),
            h=float(obj["h"]),
            identity_coefficient=float(obj["identity_coefficient"]),
            sum_operator=matrix_from_json(obj["sum_operator"]),
            rotations=RotationFamily(np.asarray(obj["rotations"], dtype=np.float64)),
        )

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def build_witness(povm, rotations, k):
    """Assemble W_k from the POVM elements; the bar is entrywise conjugation."""
    p = povm.params
    d, N, M = p.d, p.N, p.M
    if (rotations.N, rotations.M) != (N, M):
        raise DimensionMismatchError(f"rotations are {rotations.N}x{rotations.M}, POVM needs {N}x{M}")
    if not 1 <= k <= d:
        raise InvalidKError(f"k must lie in [1, {d}], got {k}")
    h = h_coefficient(d, M, k, p.x)
    E = povm.elements
    # F[a, g] = sum_l O_gl conj(E_l); sum_operator = sum_{a,g} F[a, g] (x) E[a, g]
    F = np.einsum("agl,alij->agij", rotations.matrices, E.conj())
    S = np.einsum("agij,agkl->ikjl", F, E).reshape(d * d, d * d)
    alpha = (M + N * d * h) / (d * M)
    W = alpha * np.eye(d * d) - h * S
    return WitnessOperator(W, d, N, M, p.x, k, h, alpha, S, rotations)


def _matrix_of(W):
    return W.matrix if isinstance(W, WitnessOperator) else np.asarray(W)


def expectation(W, rho, tol=1e-10):
    """Tr(W rho) for a state (BipartiteState or density matrix)."""
    Wm = _matrix_of(W)
    if not isinstance(rho, BipartiteState):
        rho = np.asarray(rho)
        n = int(round(np.sqrt(rho.shape[0])))
        rho = BipartiteState(rho, n, n)
    if rho.matrix.shape != Wm.shape:
        raise DimensionMismatchError(f"state {rho.matrix.shape} vs witness {Wm.shape}")
    val = np.einsum("ij,ji->", Wm, rho.matrix)
    if abs(val.imag) > tol:
        raise NotAStateError(f"Tr(W rho) has imaginary part {val.imag:.3e}")
    return float(val.real)


def choi_consistency_check(W, wmap):
    """max |W - d (I (x) L)(Psi_d)|, zero when every rotation fixes (1, ..., 1)."""
    if (W.d, W.k) != (wmap.d, wmap.k) or not np.array_equal(W.rotations.matrices, wmap.rotations.matrices):
        raise DimensionMismatchError("witness and map were built from different parameters")
    d = W.d
    omega = np.eye(d).reshape(-1)
    choi = apply_partial(wmap, np.outer(omega, omega))
    return float(np.abs(W.matrix - choi).max())


def _haar_batch(rng, n, d):
    z = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    return q * (diag / np.abs(diag))[:, None, :]


def _quad(Wm, A):
    a = A.reshape(A.shape[0], -1)
    return np.einsum("ni,ij,nj->n", a.conj(), Wm, a).real


def _refine(Wm, X, Y, iters, rng):
    """Coordinate descent on A = X Y^T / |X Y^T| with per-sweep step halving."""

    def value(X, Y):
        A = X @ Y.T
        return _quad(Wm, (A / np.linalg.norm(A))[None])[0]

    best = value(X, Y)
    step = 0.1
    params = [X, Y]
    for _ in range(iters):
        improved = False
        for which in rng.permutation(2):
            P = params[which]
            for idx in rng.permutation(P.size):
                i, j = divmod(int(idx), P.shape[1])
                for delta in (step, -step, 1j * step, -1j * step):
                    P[i, j] += delta
                    val = value(*params)
                    if val < best:
                        best, improved = val, True
                        break
                    P[i, j] -= delta
        if not improved:
            step *= 0.5
            if step < 1e-12:
                break
    return best


def min_over_schmidt_k(W, k, samples, seed, refine_iters=0, include=(), n_refine=5):
    """Smallest <psi|W|psi> found over pure states of Schmidt rank <= k.

    Random (U (x) V) sum_{i<k} lambda_i |ii> samples are scored; the best
    ``n_refine`` are then polished by ``refine_iters`` coordinate-descent
    sweeps. Vectors in ``include`` are scored but not refined.
    """
    Wm = _matrix_of(W)
    d = int(round(np.sqrt(Wm.shape[0])))
    if not 1 <= k <= d:
        raise InvalidKError(f"k must lie in [1, {d}], got {k}")
    rng = np.random.default_rng(seed)
    U = _haar_batch(rng, samples, d)[:, :, :k]
    V = _haar_batch(rng, samples, d)[:, :, :k]
    lam = np.array([_schmidt_spectrum(rng, k) for _ in range(samples)])
    A = np.einsum("nik,nk,njk->nij", U, lam, V)
    vals = _quad(Wm, A)
    best = float(vals.min())
    for psi in include:
        psi = np.asarray(psi, dtype=np.complex128)
        best = min(best, float(np.vdot(psi, Wm @ psi).real / np.vdot(psi, psi).real))
    if refine_iters > 0:
        for n in np.argsort(vals)[:n_refine]:
            X = U[n] * lam[n]
            Y = V[n].copy()
            best = min(best, _refine(Wm, X, Y, refine_iters, rng))
    return best
