"""Fedorov ratio and Schmidt number of a double-Gaussian biphoton amplitude.

The amplitude is

    psi(q1, q2) ~ exp(-(q1 + q2)**2 / (4 s_plus**2)) * exp(-(q1 - q2)**2 / (4 s_minus**2))

for which the Fedorov ratio and the Schmidt number coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError, ResolutionError


@dataclass(frozen=True)
class GaussianBiphoton:
    sigma_plus: float
    sigma_minus: float

    def __post_init__(self):
        if not (self.sigma_plus > 0 and self.sigma_minus > 0):
            raise DomainError("both widths must be positive")

    @classmethod
    def with_schmidt_number(cls, K, sigma_minus=1.0):
        """Model with sigma_plus >= sigma_minus whose Schmidt number is K >= 1."""
        if K < 1:
            raise DomainError(f"Schmidt number must be >= 1, got {K}")
        return cls((K + math.sqrt(K * K - 1)) * sigma_minus, sigma_minus)

    def amplitude(self, q1, q2):
        sp, sm = self.sigma_plus, self.sigma_minus
        return np.exp(-((q1 + q2) ** 2) / (4 * sp**2) - (q1 - q2) ** 2 / (4 * sm**2))


@dataclass(frozen=True)
class AmplitudeGrid:
    """Samples psi(q_i, q_j) on the symmetric grid linspace(-extent, extent, n)."""

    values: np.ndarray
    extent: float

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def step(self):
        return 2 * self.extent / (self.n - 1)

    @property
    def axis(self):
        return np.linspace(-self.extent, self.extent, self.n)

    def norm(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.step**2)

    def normalized(self):
        nrm = self.norm()
        if nrm == 0:
            raise DegenerateError("amplitude grid is identically zero")
        return AmplitudeGrid(self.values / math.sqrt(nrm), self.extent)


def sample_grid(g, n=512, extent=None):
    """Normalized samples of a GaussianBiphoton; extent defaults to 8 * max width."""
    L = 8 * max(g.sigma_plus, g.sigma_minus) if extent is None else extent
    q = np.linspace(-L, L, n)
    return AmplitudeGrid(g.amplitude(q[:, None], q[None, :]), L).normalized()


def schmidt_number_gaussian(g):
    sp, sm = g.sigma_plus, g.sigma_minus
    return (sp**2 + sm**2) / (2 * sp * sm)


def fedorov_ratio(g):
    """Width of the q1 marginal over the width of q1 given q2 = 0."""
    sp2, sm2 = g.sigma_plus**2, g.sigma_minus**2
    single = (sp2 + sm2) / 4
    conditional = sp2 * sm2 / (sp2 + sm2)
    return math.sqrt(single / conditional)


def _std(q, w):
    w = w / w.sum()
    mean = np.dot(q, w)
    return math.sqrt(np.dot((q - mean) ** 2, w))


def _conditional_slice(a):
    """|psi(q1, 0)|^2, interpolated log-linearly when 0 falls between columns."""
    p = np.abs(a.values) ** 2
    n = a.n
    if n % 2:
        return p[:, n // 2]
    with np.errstate(divide="ignore"):
        # geometric mean is exact for Gaussian slices
        return np.sqrt(p[:, n // 2 - 1] * p[:, n // 2])


def _checked_conditional_std(a):
    s = _std(a.axis, _conditional_slice(a))
    if s < 3 * a.step:
        raise ResolutionError(
            f"conditional width {s:.3g} is below 3 grid steps ({3 * a.step:.3g}); refine the grid"
        )
    return s


def fedorov_ratio_grid(a, check_resolution=True):
    p = np.abs(a.values) ** 2
    if not p.any():
        raise DegenerateError("amplitude grid is identically zero")
    if check_resolution:
        conditional = _checked_conditional_std(a)
    else:
        conditional = _std(a.axis, _conditional_slice(a))
    single = _std(a.axis, p.sum(axis=1))
    return single / conditional


def participation_ratio_svd(a, check_resolution=True):
    """1 / sum p_i**2 with p_i the normalized squared singular values of psi * dq."""
    if not np.any(a.values):
        raise DegenerateError("amplitude grid is identically zero")
    if check_resolution:
        _checked_conditional_std(a)
    s = np.linalg.svd(a.values * a.step, compute_uv=False)
    p = s**2 / np.sum(s**2)
    return float(1 / np.sum(p**2))
