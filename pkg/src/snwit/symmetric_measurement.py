"""(N, M)-POVMs built as E_{a,k} = I/M + t H_{a,k} from a Hermitian basis."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateError,
    IncompatibleParametersError,
    InvalidDimensionError,
    NonPositiveElementError,
    OutOfRangeError,
)
from .operator_basis import HermitianBasis, gell_mann_basis
from .tolerance import default_tol


def x_range(d, M):
    """Open-closed interval (d/M**2, min(d**2/M**2, d/M)] allowed for x."""
    return d / M**2, min(d**2 / M**2, d / M)


def x_of_t(t, d, M):
    return d / M**2 + t**2 * (M - 1) * (math.sqrt(M) + 1) ** 2


def t_of_x(x, d, M):
    """Nonnegative t with x_of_t(t) == x."""
    lo = d / M**2
    if x < lo:
        raise OutOfRangeError(f"x = {x} is below d/M^2 = {lo}")
    if M == 1:
        return 0.0
    return math.sqrt((x - lo) / ((M - 1) * (math.sqrt(M) + 1) ** 2))


@dataclass(frozen=True)
class PovmParameters:
    d: int
    N: int
    M: int
    x: float
    t: float

    def __post_init__(self):
        if self.d < 2 or self.N < 1 or self.M < 2:
            raise InvalidDimensionError(
                f"need d >= 2, N >= 1, M >= 2; got d={self.d}, N={self.N}, M={self.M}"
            )
        lo, hi = x_range(self.d, self.M)
        if not lo < self.x <= hi:
            raise OutOfRangeError(f"x = {self.x} outside ({lo}, {hi}] for d={self.d}, M={self.M}")
        if abs(x_of_t(self.t, self.d, self.M) - self.x) > 1e-12:
            raise IncompatibleParametersError(f"t = {self.t} does not correspond to x = {self.x}")

    @property
    def informationally_complete(self):
        return self.N * (self.M - 1) == self.d**2 - 1

    @property
    def intra_overlap(self):
        """Tr(E_{a,k} E_{a,l}) for k != l."""
        return (self.d - self.M * self.x) / (self.M * (self.M - 1))

    @property
    def inter_overlap(self):
        """Tr(E_{a,k} E_{b,l}) for a != b."""
        return self.d / self.M**2


@dataclass(frozen=True)
class SymmetricPovm:
    """Elements E_{a,k} stored as an (N, M, d, d) array.

    When built with ``require_positive=False`` the elements satisfy every
    trace condition but need not be positive semidefinite; ``is_positive``
    tells which.
    """

    params: PovmParameters
    elements: np.ndarray
    h_operators: np.ndarray = field(repr=False)
    basis_name: str = "custom"

    def __post_init__(self):
        p = self.params
        for name in ("elements", "h_operators"):
            a = np.array(getattr(self, name), dtype=np.complex128)
            if a.shape != (p.N, p.M, p.d, p.d):
                raise InvalidDimensionError(f"{name} has shape {a.shape}, expected {(p.N, p.M, p.d, p.d)}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def d(self):
        return self.params.d

    @property
    def N(self):
        return self.params.N

    @property
    def M(self):
        return self.params.M

    @property
    def x(self):
        return self.params.x

    @property
    def t(self):
        return self.params.t

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.elements).min())

    def is_positive(self, tol=None):
        tol = default_tol() if tol is None else tol
        return self.min_eigenvalue() >= -tol

    def to_dict(self):
        p = self.params
        return {
            "d": p.d,
            "N": p.N,
            "M": p.M,
            "x": p.x,
            "t": p.t,
            "basis": self.basis_name,
            "elements": matrix_to_json(self.elements),
        }

    @classmethod
    def from_dict(cls, obj):
        d, M = int(obj["d"]), int(obj["M"])
        params = PovmParameters(d, int(obj["N"]), M, float(obj["x"]), float(obj["t"]))
        elements = matrix_from_json(obj["elements"])
        if params.t == 0:
            raise DegenerateError("t = 0 carries no H operators")
        h = (elements - np.eye(d) / M) / params.t
        return cls(params, elements, h, obj.get("basis", "custom"))

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def matrix_to_json(a):
    """Nested lists with every complex entry as a [re, im] pair."""
    a = np.asarray(a, dtype=np.complex128)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def matrix_from_json(obj):
    a = np.asarray(obj, dtype=np.float64)
    if a.shape[-1] != 2:
        raise InvalidDimensionError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def build_h_operators(basis, N, M):
    """H_{a,k} for every group a, shape (N, M, d, d).

    Group a takes basis elements a*(M-1) ... (a+1)*(M-1)-1 in basis order.
    """
    d = basis.dim
    if N * (M - 1) != d**2 - 1 or len(basis) != d**2 - 1:
        raise IncompatibleParametersError(
            f"N(M-1) = {N * (M - 1)} must equal d^2-1 = {d**2 - 1}"
        )
    G = basis.elements.reshape(N, M - 1, d, d)
    G_sum = G.sum(axis=1)
    s = math.sqrt(M)
    head = G_sum[:, None] - s * (s + 1) * G
    tail = (s + 1) * G_sum[:, None]
    return np.concatenate([head, tail], axis=1)


def t_interval(h_ops, M):
    """Closed interval of t for which every I/M + tH is positive semidefinite."""
    eig = np.linalg.eigvalsh(np.asarray(h_ops))
    lam_max, lam_min = float(eig.max()), float(eig.min())
    if max(abs(lam_max), abs(lam_min)) < 1e-14:
        raise DegenerateError("all H operators vanish; t is unbounded")
    # traceless H always has lam_max > 0 > lam_min
    return -1.0 / (M * lam_max), 1.0 / (M * abs(lam_min))


def max_positive_x(d, N, M, basis=None):
    """Largest x whose nonnegative t keeps all elements PSD for this basis."""
    basis = gell_mann_basis(d) if basis is None else basis
    _, t_hi = t_interval(build_h_operators(basis, N, M), M)
    return min(x_of_t(t_hi, d, M), x_range(d, M)[1])


def build_nm_povm(d, N, M, x, basis=None, require_positive=True):
    """Build the (N, M)-POVM with purity parameter x.

    ``basis`` defaults to the generalized Gell-Mann basis. With
    ``require_positive=False`` an operator family that satisfies all trace
    conditions but has negative eigenvalues is returned instead of raising.
    """
    basis = gell_mann_basis(d) if basis is None else basis
    if basis.dim != d:
        raise InvalidDimensionError(f"basis dimension {basis.dim} != d = {d}")
    lo, hi = x_range(d, M)
    if not lo < x <= hi:
        raise OutOfRangeError(f"x = {x} outside ({lo}, {hi}] for d={d}, M={M}")
    params = PovmParameters(d, N, M, x, t_of_x(x, d, M))
    t = params.t
    h = build_h_operators(basis, N, M)
    t_lo, t_hi = t_interval(h, M)
    elements = np.eye(d) / M + t * h
    worst = float(np.linalg.eigvalsh(elements).min())
    # boundary t sits on t_hi up to rounding, so judge by the spectrum
    if require_positive and worst < -default_tol():
        raise NonPositiveElementError(
            f"t = {t:.6g} (x = {x}) lies outside [{t_lo:.6g}, {t_hi:.6g}]; "
            f"worst eigenvalue {worst:.3e}",
            worst,
        )
    return SymmetricPovm(params, elements, h, basis.name)


@dataclass(frozen=True)
class ValidationReport:
    """Max absolute deviation of each defining condition."""

    trace: float
    square: float
    intra: float
    inter: float
    completeness: float
    min_eigenvalue: float
    tol: float

    @property
    def positive(self):
        return self.min_eigenvalue >= -self.tol

    @property
    def trace_conditions_pass(self):
        return max(self.trace, self.square, self.intra, self.inter, self.completeness) < self.tol

    @property
    def passed(self):
        return self.trace_conditions_pass and self.positive

    def lines(self):
        def mark(ok):
            return "ok" if ok else "FAIL"

        rows = [
            ("Tr E = d/M", self.trace),
            ("Tr E^2 = x", self.square),
            ("Tr E_k E_l (same a)", self.intra),
            ("Tr E_k E_l (a != b)", self.inter),
            ("sum_k E = I", self.completeness),
        ]
        out = [f"{name:<22} max dev {dev:.3e}  {mark(dev < self.tol)}" for name, dev in rows]
        out.append(f"{'min eigenvalue':<22} {self.min_eigenvalue:.3e}  {mark(self.positive)}")
        return out


def validate_povm(povm, tol=None):
    tol = default_tol() if tol is None else tol
    p = povm.params
    d, N, M = p.d, p.N, p.M
    E = povm.elements
    flat = E.reshape(N * M, d, d)
    gram = np.einsum("aij,bji->ab", flat, flat).reshape(N, M, N, M)

    trace_dev = np.abs(np.einsum("akii->ak", E) - d / M).max()
    same = np.eye(N, dtype=bool)[:, None, :, None]
    diag_k = np.eye(M, dtype=bool)[None, :, None, :]
    sq = np.abs(gram - p.x)[same & diag_k]
    intra = np.abs(gram - p.intra_overlap)[same & ~diag_k]
    inter = np.abs(gram - p.inter_overlap)[~same & np.ones_like(diag_k)]

    def top(a):
        return float(a.max()) if a.size else 0.0

    completeness = np.abs(E.sum(axis=1) - np.eye(d)).max()
    return ValidationReport(
        trace=float(trace_dev),
        square=top(sq),
        intra=top(intra),
        inter=top(inter),
        completeness=float(completeness),
        min_eigenvalue=povm.min_eigenvalue(),
        tol=tol,
    )


def basis_from_elements(elements, x):
    """Recover the Hermitian basis that produces ``elements`` at parameter x.

    Inverts E = I/M + tH: H_{a,M} = (sqrt(M)+1) G_a and
    H_{a,k} = G_a - sqrt(M)(sqrt(M)+1) G_{a,k}. The result is orthonormal only
    if ``elements`` satisfy the (N, M) trace conditions.
    """
    E = np.asarray(elements, dtype=np.complex128)
    N, M, d, _ = E.shape
    t = t_of_x(x, d, M)
    H = (E - np.eye(d) / M) / t
    s = math.sqrt(M)
    G_sum = H[:, -1] / (s + 1)
    G = (G_sum[:, None] - H[:, :-1]) / (s * (s + 1))
    return HermitianBasis(d, G.reshape(N * (M - 1), d, d), name="from-elements")


def _is_prime(n):
    return n >= 2 and all(n % p for p in range(2, int(math.isqrt(n)) + 1))


def mub_projectors(d):
    """Rank-one projectors of d + 1 mutually unbiased bases, prime d.

    Shape (d+1, d, d, d): the computational basis followed by the quadratic
    phase bases.
    """
    if not _is_prime(d):
        raise InvalidDimensionError(f"mub_projectors supports prime d only, got {d}")
    j = np.arange(d)
    bases = [np.eye(d, dtype=np.complex128)]
    for a in range(d):
        if d == 2:
            phase = (1j**a) ** j
            vecs = [phase * (-1.0) ** (b * j) for b in range(d)]
        else:
            w = np.exp(2j * np.pi / d)
            vecs = [w ** ((a * j * j + b * j) % d) for b in range(d)]
        bases.append(np.array(vecs).T / np.sqrt(d))
    B = np.array(bases)  # (d+1, d, d), columns are the vectors
    return np.einsum("aik,ajk->akij", B, B.conj())


def mub_basis(d):
    """Hermitian basis for which the x = 1, M = d construction gives a complete set of MUBs."""
    basis = basis_from_elements(mub_projectors(d), 1.0)
    return HermitianBasis(d, basis.elements, name="mub")
